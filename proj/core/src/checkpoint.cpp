// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#include "iddm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "iddm/errors.hpp"

namespace iddm {

namespace {

constexpr char kMagic[8] = {'I', 'D', 'D', 'M', 'C', 'K', 'P', 'T'};

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<unsigned char>& buf, double v) {
  put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  Reader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  const unsigned char* bytes(std::size_t n) {
    need(n);
    const unsigned char* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > size_) throw FormatError("checkpoint: truncated file");
  }
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a(const unsigned char* data, std::size_t size) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= data[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  const DenoiserParams& p = checkpoint.params;
  if (p.values.size() != p.count()) {
    throw ShapeError("write_checkpoint: parameter buffer does not match layout");
  }

  std::vector<unsigned char> buf;
  buf.reserve(64 + checkpoint.config_echo.size() + 8 * p.values.size());
  buf.insert(buf.end(), kMagic, kMagic + sizeof(kMagic));
  put_u32(buf, Checkpoint::kVersion);
  put_u32(buf, static_cast<std::uint32_t>(p.k));
  put_u32(buf, static_cast<std::uint32_t>(p.length));
  put_u32(buf, static_cast<std::uint32_t>(p.hidden));
  put_u32(buf, static_cast<std::uint32_t>(p.time_dim));
  put_u64(buf, checkpoint.config_echo.size());
  buf.insert(buf.end(), checkpoint.config_echo.begin(), checkpoint.config_echo.end());
  put_u64(buf, p.values.size());
  for (double v : p.values) put_f64(buf, v);
  put_u64(buf, fnv1a(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_checkpoint: cannot open " + path);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write_checkpoint: short write to " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_checkpoint: cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + 4 + 16 + 16 + 8) {
    throw FormatError("checkpoint: file too small");
  }

  const std::uint64_t stored = fnv1a(buf.data(), buf.size() - 8);
  Reader tail(buf.data() + buf.size() - 8, 8);
  if (tail.u64() != stored) throw FormatError("checkpoint: checksum mismatch");

  Reader r(buf.data(), buf.size() - 8);
  if (std::memcmp(r.bytes(sizeof(kMagic)), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("checkpoint: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != Checkpoint::kVersion) {
    throw FormatError("checkpoint: unsupported format version " + std::to_string(version));
  }

  Checkpoint checkpoint;
  checkpoint.params.k = static_cast<int>(r.u32());
  checkpoint.params.length = static_cast<int>(r.u32());
  checkpoint.params.hidden = static_cast<int>(r.u32());
  checkpoint.params.time_dim = static_cast<int>(r.u32());

  const std::uint64_t config_len = r.u64();
  const unsigned char* config = r.bytes(config_len);
  checkpoint.config_echo.assign(reinterpret_cast<const char*>(config), config_len);

  const std::uint64_t count = r.u64();
  if (count != checkpoint.params.count()) {
    throw FormatError("checkpoint: parameter count does not match dimensions");
  }
  checkpoint.params.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) checkpoint.params.values[i] = r.f64();
  if (r.position() != buf.size() - 8) throw FormatError("checkpoint: trailing bytes");
  return checkpoint;
}

}  // namespace iddm
