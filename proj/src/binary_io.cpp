// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/binary_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mvgr/error.hpp"

namespace mvgr {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "E_IO";
    case ErrorCode::kParse: return "E_PARSE";
    case ErrorCode::kDuplicateId: return "E_DUPLICATE_ID";
    case ErrorCode::kFormat: return "E_FORMAT";
    case ErrorCode::kChecksum: return "E_CHECKSUM";
    case ErrorCode::kVocabularyMismatch: return "E_VOCAB_MISMATCH";
    case ErrorCode::kInvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::kExists: return "E_EXISTS";
  }
  return "E_UNKNOWN";
}

namespace io {

void BinaryWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
  u64(s.size());
  raw(s);
}

void BinaryWriter::raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

void BinaryWriter::u32_array(std::span<const std::uint32_t> values) {
  u64(values.size());
  for (auto v : values) u32(v);
}

void BinaryWriter::u64_array(std::span<const std::uint64_t> values) {
  u64(values.size());
  for (auto v : values) u64(v);
}

void BinaryWriter::seal() { u32(crc32(bytes_)); }

void BinaryReader::need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) {
    throw Error(ErrorCode::kFormat, "truncated binary payload");
  }
}

std::uint8_t BinaryReader::u8() {
  need(1);
  return bytes_[pos_++];
}

std::uint32_t BinaryReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() { return raw(u64()); }

std::string BinaryReader::raw(std::size_t n) {
  need(n);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::vector<std::uint32_t> BinaryReader::u32_array() {
  const auto n = u64();
  need(n * 4);
  std::vector<std::uint32_t> out(n);
  for (auto& v : out) v = u32();
  return out;
}

std::vector<std::uint64_t> BinaryReader::u64_array() {
  const auto n = u64();
  need(n * 8);
  std::vector<std::uint64_t> out(n);
  for (auto& v : out) v = u64();
  return out;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::span<const std::uint8_t> verify_sealed(std::span<const std::uint8_t> bytes,
                                            std::string_view what) {
  if (bytes.size() < 4) {
    throw Error(ErrorCode::kFormat, std::string(what) + ": file too short");
  }
  auto body = bytes.first(bytes.size() - 4);
  BinaryReader trailer(bytes.last(4));
  if (trailer.u32() != crc32(body)) {
    throw Error(ErrorCode::kChecksum, std::string(what) + ": checksum mismatch");
  }
  return body;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace io
}  // namespace mvgr
