// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mvgr/vocabulary.hpp"

namespace mvgr {

struct Passage {
  std::string id;
  std::string title;
  std::string body;
  std::vector<std::string> pseudo_queries;
};

// Ordered passages with unique ids.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Passage> passages);

  // Throws Error(kDuplicateId) when the id is already present.
  void add(Passage passage);

  std::size_t doc_count() const { return passages_.size(); }
  const std::vector<Passage>& passages() const { return passages_; }
  std::vector<Passage>& mutable_passages() { return passages_; }
  const Passage& at(std::size_t i) const { return passages_.at(i); }
  // Returns nullptr for unknown ids.
  const Passage* find(std::string_view id) const;

 private:
  std::vector<Passage> passages_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

enum class CorpusFormat { kJsonl, kTsv };

CorpusFormat parse_corpus_format(std::string_view name);

// JSONL records: {"id", "title", "text", "pseudo_queries"?}. TSV rows:
// id \t title \t text. Bodies are whitespace-normalized; a record whose body
// is empty after normalization is a parse error.
Corpus load_corpus(const std::string& path, CorpusFormat format);
Corpus parse_corpus(std::string_view contents, CorpusFormat format);
void save_corpus_jsonl(const Corpus& corpus, const std::string& path);

std::string normalize_whitespace(std::string_view text);

// Produces pseudo-queries for one passage. Must be deterministic for a given
// (passage, k, seed) and may throw to signal failure on that passage.
class QueryGenerator {
 public:
  virtual ~QueryGenerator() = default;
  virtual std::vector<std::string> generate(const Passage& passage, std::size_t k,
                                            std::uint64_t seed) const = 0;
};

// Template questions over the title and sampled body spans.
class TemplateQueryGenerator final : public QueryGenerator {
 public:
  struct Options {
    std::size_t min_span = 3;
    std::size_t max_span = 6;
  };

  TemplateQueryGenerator() = default;
  explicit TemplateQueryGenerator(Options options) : options_(options) {}

  std::vector<std::string> generate(const Passage& passage, std::size_t k,
                                    std::uint64_t seed) const override;

 private:
  Options options_;
};

std::vector<std::string> template_pseudo_queries(const Passage& passage, std::size_t k,
                                                 std::uint64_t seed);

// Gives every passage without pseudo-queries up to k generated ones. Passages
// that already carry queries are left as they are. A generator failure leaves
// that passage empty and appends a message to `warnings`.
Corpus attach_pseudo_queries(Corpus corpus, const QueryGenerator& generator, std::size_t k,
                             std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

// One pass over titles, bodies and pseudo-queries.
Vocabulary build_vocabulary(const Corpus& corpus,
                            const Tokenizer& tokenizer = default_tokenizer());

// <TS> title <TE> <BS> body <BE> (<QS> query <QE>)* </d>
struct FlatStream {
  std::string doc_id;
  std::vector<TokenId> tokens;
};

FlatStream flatten(const Passage& passage, const Vocabulary& vocab,
                   const Tokenizer& tokenizer = default_tokenizer());
std::vector<FlatStream> flatten_corpus(const Corpus& corpus, const Vocabulary& vocab,
                                       const Tokenizer& tokenizer = default_tokenizer());

// Token offsets of each identifier region inside a stream; ranges are
// half-open and exclude the delimiters.
struct StreamLayout {
  std::uint32_t title_begin = 0, title_end = 0;
  std::uint32_t body_begin = 0, body_end = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> queries;
};

struct StreamSegments {
  std::vector<TokenId> title;
  std::vector<TokenId> body;
  std::vector<std::vector<TokenId>> queries;
};

// Both throw Error(kFormat) if the stream does not follow the grammar.
StreamLayout parse_layout(std::span<const TokenId> tokens);
StreamSegments extract_segments(std::span<const TokenId> tokens);

}  // namespace mvgr
