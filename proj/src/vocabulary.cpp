// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace mvgr {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string byte_token(unsigned b) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
  return buf;
}

}  // namespace

std::vector<std::string> WordTokenizer::split(std::string_view text) const {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c) || std::iscntrl(c)) {
      flush();
    } else {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    }
  }
  flush();
  return out;
}

std::string WordTokenizer::join(std::span<const std::string> pieces) const {
  std::string out;
  for (const auto& p : pieces) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

const Tokenizer& default_tokenizer() {
  static const WordTokenizer tokenizer;
  return tokenizer;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Vocabulary::Vocabulary() {
  tokens_ = {"</d>", "<TS>", "<TE>", "<BS>", "<BE>", "<QS>", "<QE>"};
  for (unsigned b = 0; b < 256; ++b) tokens_.push_back(byte_token(b));
  for (TokenId id = 0; id < tokens_.size(); ++id) ids_.emplace(tokens_[id], id);
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  Vocabulary vocab;
  for (auto& w : words) {
    if (w.empty() || vocab.ids_.contains(w)) continue;
    vocab.ids_.emplace(w, static_cast<TokenId>(vocab.tokens_.size()));
    vocab.tokens_.push_back(std::move(w));
  }
  return vocab;
}

std::optional<TokenId> Vocabulary::find(std::string_view piece) const {
  auto it = ids_.find(std::string(piece));
  if (it == ids_.end() || token::is_delimiter(it->second)) return std::nullopt;
  return it->second;
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> pieces) const {
  std::vector<TokenId> out;
  out.reserve(pieces.size());
  for (const auto& p : pieces) {
    // Byte tokens are only reachable through the fallback path.
    auto it = ids_.find(p);
    if (it != ids_.end() && it->second >= token::kFirstWord) {
      out.push_back(it->second);
      continue;
    }
    for (unsigned char c : p) out.push_back(token::kFirstByte + c);
  }
  return out;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  bool in_bytes = false;
  for (TokenId id : ids) {
    if (id >= token::kFirstByte && id < token::kFirstWord) {
      if (!in_bytes) out.emplace_back();
      out.back().push_back(static_cast<char>(id - token::kFirstByte));
      in_bytes = true;
    } else {
      out.push_back(token(id));
      in_bytes = false;
    }
  }
  return out;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = fnv1a64("mvgr-vocab");
  for (const auto& t : tokens_) {
    h = fnv1a64(t, h);
    h = fnv1a64(std::string_view("\0", 1), h);
  }
  return h;
}

}  // namespace mvgr
