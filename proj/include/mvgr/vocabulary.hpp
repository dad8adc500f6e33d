// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mvgr {

using TokenId = std::uint32_t;

// Reserved ids. The end-of-document sentinel must stay the smallest id so it
// sorts before every other token during suffix sorting.
namespace token {
inline constexpr TokenId kSentinel = 0;
inline constexpr TokenId kTitleStart = 1;
inline constexpr TokenId kTitleEnd = 2;
inline constexpr TokenId kBodyStart = 3;
inline constexpr TokenId kBodyEnd = 4;
inline constexpr TokenId kQueryStart = 5;
inline constexpr TokenId kQueryEnd = 6;
inline constexpr TokenId kFirstByte = 7;
inline constexpr TokenId kFirstWord = kFirstByte + 256;

inline constexpr bool is_delimiter(TokenId id) { return id < kFirstByte; }
inline constexpr bool is_content(TokenId id) { return id >= kFirstByte; }
}  // namespace token

// Splits text into normalized pieces and joins pieces back into text.
// Implementations must be deterministic and must never emit a piece that
// contains whitespace.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> split(std::string_view text) const = 0;
  virtual std::string join(std::span<const std::string> pieces) const = 0;
};

// Lowercased ASCII words; every ASCII punctuation character is its own piece;
// bytes >= 0x80 are treated as word characters so UTF-8 stays intact.
class WordTokenizer final : public Tokenizer {
 public:
  std::vector<std::string> split(std::string_view text) const override;
  std::string join(std::span<const std::string> pieces) const override;
};

const Tokenizer& default_tokenizer();

// Bijective token <-> id table. Ids below token::kFirstWord are fixed: the
// seven delimiters followed by 256 byte-fallback tokens "<0xNN>". Word ids
// follow in lexicographic order of the word strings.
class Vocabulary {
 public:
  Vocabulary();

  // Builds a vocabulary holding the reserved block plus every distinct word.
  static Vocabulary from_words(std::vector<std::string> words);

  std::size_t size() const { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view piece) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  bool contains(TokenId id) const { return id < tokens_.size(); }

  // Unknown pieces fall back to their UTF-8 bytes.
  std::vector<TokenId> encode(std::span<const std::string> pieces) const;
  // Inverse of encode: runs of byte tokens are merged back into one piece.
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

  // Stable 64-bit hash of the full id -> token table.
  std::uint64_t fingerprint() const;

  std::span<const std::string> tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace mvgr
