// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvgr/binary_io.hpp"
#include "mvgr/corpus.hpp"
#include "mvgr/vocabulary.hpp"

namespace mvgr {

// Suffix array of `text` by prefix doubling. A suffix that is a proper prefix
// of another sorts first.
std::vector<std::uint32_t> suffix_array(std::span<const TokenId> text);

namespace detail {

class RankBitvector {
 public:
  RankBitvector() = default;
  explicit RankBitvector(const std::vector<bool>& bits);
  RankBitvector(std::vector<std::uint64_t> words, std::uint64_t size);

  bool get(std::uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  // Number of set bits in [0, i).
  std::uint64_t rank1(std::uint64_t i) const;
  std::uint64_t size() const { return size_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void index();

  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t size_ = 0;
};

// Backward-search core over a token text: BWT, C table and occurrence
// checkpoints every `interval` rows.
class TokenBwt {
 public:
  TokenBwt() = default;
  TokenBwt(std::span<const TokenId> text, std::span<const std::uint32_t> sa, std::uint32_t sigma,
           std::uint32_t interval);

  std::uint64_t size() const { return bwt_.size(); }
  std::uint32_t sigma() const { return sigma_; }
  TokenId at(std::uint64_t row) const { return bwt_[row]; }
  std::uint64_t smaller(TokenId c) const { return c_table_[c]; }

  // Occurrences of c in bwt[0, i).
  std::uint64_t rank(TokenId c, std::uint64_t i) const;
  std::uint64_t lf(std::uint64_t row) const { return c_table_[bwt_[row]] + rank(bwt_[row], row); }

  // Rows whose suffix starts with c followed by the suffixes in [lo, hi).
  std::pair<std::uint64_t, std::uint64_t> step(TokenId c, std::uint64_t lo, std::uint64_t hi) const;

  // Distinct tokens of bwt[lo, hi) with multiplicities, ascending by token.
  std::vector<std::pair<TokenId, std::uint64_t>> distinct(std::uint64_t lo, std::uint64_t hi) const;

  void write(io::BinaryWriter& w) const;
  static TokenBwt read(io::BinaryReader& r);

 private:
  std::uint32_t count_in(TokenId c, std::uint64_t from, std::uint64_t to) const;

  std::vector<TokenId> bwt_;
  std::vector<std::uint64_t> c_table_;
  std::vector<std::uint32_t> checkpoints_;
  std::uint32_t sigma_ = 0;
  std::uint32_t interval_ = 128;
};

}  // namespace detail

// Half-open interval of rows in the text index whose suffixes start with a
// pattern of length pattern_len.
struct MatchRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint32_t pattern_len = 0;

  std::uint64_t size() const { return hi - lo; }
  bool empty() const { return lo >= hi; }
  bool operator==(const MatchRange&) const = default;
};

// Interval in the mirrored index (per-stream reversed text). It tracks a
// pattern that grows to the right.
struct MirrorRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint32_t pattern_len = 0;

  std::uint64_t size() const { return hi - lo; }
  bool empty() const { return lo >= hi; }
  bool operator==(const MirrorRange&) const = default;
};

struct Successor {
  TokenId token;
  std::uint64_t count;
  bool operator==(const Successor&) const = default;
};

struct Occurrence {
  std::uint32_t doc;  // document ordinal
  std::uint32_t offset;  // token offset inside the document's stream
  bool operator==(const Occurrence&) const = default;
  auto operator<=>(const Occurrence&) const = default;
};

enum class Region { kTitle, kBody, kQuery, kDelimiter };

struct IndexedDocument {
  std::string id;
  std::uint64_t start = 0;   // position of the stream in the concatenated text
  std::uint32_t length = 0;  // stream length including the sentinel
  StreamLayout layout;
};

class FMIndex {
 public:
  struct Options {
    std::uint32_t checkpoint_interval = 128;
    std::uint32_t sample_rate = 32;
  };

  FMIndex() = default;

  // Every stream must follow the FlatStream grammar and end in the sentinel.
  // Throws Error(kInvalidArgument) on token ids outside `vocab`.
  static FMIndex build(std::span<const FlatStream> streams, Vocabulary vocab, Options options);
  static FMIndex build(std::span<const FlatStream> streams, Vocabulary vocab) {
    return build(streams, std::move(vocab), Options{});
  }

  std::uint64_t size() const { return text_.size(); }
  std::size_t doc_count() const { return docs_.size(); }
  const Vocabulary& vocab() const { return vocab_; }
  const Options& options() const { return options_; }
  const IndexedDocument& doc(std::size_t i) const { return docs_.at(i); }
  std::optional<std::uint32_t> doc_index(std::string_view id) const;

  // Text index: leftward growth, counting, locating.
  MatchRange full_range() const { return {0, size(), 0}; }
  MatchRange range(std::span<const TokenId> pattern) const;
  // Patterns never contain the sentinel; extending with it yields an empty
  // range, as does any token outside the vocabulary.
  MatchRange extend_backward(const MatchRange& range, TokenId token) const;
  std::uint64_t count(std::span<const TokenId> pattern) const;
  std::vector<Occurrence> locate(const MatchRange& range, std::size_t limit) const;
  std::vector<Occurrence> locate(std::span<const TokenId> pattern, std::size_t limit) const;

  // Mirrored index: rightward growth and successor enumeration.
  MirrorRange mirror_full_range() const { return {0, size(), 0}; }
  MirrorRange mirror_range(std::span<const TokenId> pattern) const;
  MirrorRange extend_forward(const MirrorRange& range, TokenId token) const;
  // Tokens t with pattern·t present; the sentinel (stream end) is never
  // reported.
  std::vector<Successor> successors(const MirrorRange& range) const;
  std::vector<Successor> successors(std::span<const TokenId> pattern) const;
  // Occurrences whose last token is body content. For content-only patterns
  // this is the number of occurrences inside passage bodies.
  std::uint64_t body_count(const MirrorRange& range) const;

  Region region_at(std::uint32_t doc, std::uint32_t offset) const;

  std::vector<std::uint8_t> serialize() const;
  static FMIndex deserialize(std::span<const std::uint8_t> bytes);
  void save(const std::string& path) const;
  static FMIndex load(const std::string& path);

 private:
  std::pair<std::uint32_t, std::uint32_t> resolve(std::uint64_t text_pos) const;
  void rebuild_lookup();

  Vocabulary vocab_;
  Options options_;
  std::vector<IndexedDocument> docs_;
  std::vector<std::uint64_t> doc_starts_;
  std::vector<std::pair<std::string, std::uint32_t>> id_lookup_;  // sorted by id
  detail::TokenBwt text_;
  detail::RankBitvector sampled_rows_;
  std::vector<std::uint32_t> samples_;  // text position per sampled row
  detail::TokenBwt mirror_;
  detail::RankBitvector body_rows_;
};

}  // namespace mvgr
