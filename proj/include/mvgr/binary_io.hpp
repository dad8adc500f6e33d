// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mvgr::io {

// Append-only little-endian encoder. Multi-byte integers are always written
// least significant byte first regardless of host order.
class BinaryWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  void raw(std::string_view s);
  void u32_array(std::span<const std::uint32_t> values);
  void u64_array(std::span<const std::uint64_t> values);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  // Appends the CRC-32 of everything written so far.
  void seal();

 private:
  std::vector<std::uint8_t> bytes_;
};

// Bounds-checked decoder over an in-memory buffer. Truncated input throws
// Error(kFormat).
class BinaryReader {
 public:
  explicit BinaryReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::string raw(std::size_t n);
  std::vector<std::uint32_t> u32_array();
  std::vector<std::uint64_t> u64_array();

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// Verifies and strips the CRC-32 trailer written by BinaryWriter::seal().
std::span<const std::uint8_t> verify_sealed(std::span<const std::uint8_t> bytes,
                                            std::string_view what);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace mvgr::io
