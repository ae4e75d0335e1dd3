// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "iddm/denoiser.hpp"

namespace iddm {

/// On-disk model snapshot. Fixed little-endian layout:
///   magic "IDDMCKPT" | u32 version | u32 K,L,hidden,time_dim
///   | u64 config length | config bytes | u64 param count | f64 params
///   | u64 FNV-1a checksum over everything above.
/// Version mismatches and checksum failures are rejected on read; writes
/// round-trip bit-exactly.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  DenoiserParams params;
  std::string config_echo;
};

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace iddm
