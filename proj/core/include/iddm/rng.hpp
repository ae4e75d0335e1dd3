// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace iddm {

/// Counter-based splittable generator built on the SplitMix64 finalizer.
///
/// Every stream is identified by a 64-bit key; output i is
/// mix(key + i * GAMMA), a pure function of (key, i). Substreams are derived
/// by hashing an id into the parent key, so any node in the derivation tree
/// is reproducible from the root seed alone.
///
/// Substream derivation used across the library (root = SplitRng(seed)):
///   root.split(component)             component ids in rng_stream below
///   .split(index)                     chain index, trial index, batch step...
///   .split(sub)                       step id, mc draw id where needed
class SplitRng {
 public:
  SplitRng() : SplitRng(0) {}
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kRootSalt)), counter_(0) {}

  /// Derives an independent child stream; does not disturb this stream.
  [[nodiscard]] SplitRng split(std::uint64_t id) const {
    SplitRng child;
    child.key_ = mix(key_ ^ mix(id + kSplitSalt));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n); n must be positive. Small-n bias from the
  /// 53-bit path is far below anything observable at desk scale.
  int next_below(int n) { return static_cast<int>(next_double() * n); }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kRootSalt = 0x1DDA0DD5EEDULL;
  static constexpr std::uint64_t kSplitSalt = 0xC0FFEE123456789ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Component ids for first-level substreams, one per independent consumer.
namespace rng_stream {
inline constexpr std::uint64_t kDenoiserInit = 1;
inline constexpr std::uint64_t kDataset = 2;
inline constexpr std::uint64_t kTraining = 3;
inline constexpr std::uint64_t kChains = 4;
inline constexpr std::uint64_t kElbo = 5;
inline constexpr std::uint64_t kOracle = 6;
}  // namespace rng_stream

}  // namespace iddm
