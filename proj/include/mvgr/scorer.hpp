// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvgr/corpus.hpp"
#include "mvgr/vocabulary.hpp"

namespace mvgr {

enum class ViewPrefix : std::uint8_t { kTitle = 0, kSubstring = 1, kPseudoQuery = 2 };

inline constexpr std::array<ViewPrefix, 3> kAllViews = {ViewPrefix::kTitle, ViewPrefix::kSubstring,
                                                        ViewPrefix::kPseudoQuery};

// "title", "substring", "pseudo-query".
std::string_view view_name(ViewPrefix view);
std::optional<ViewPrefix> parse_view(std::string_view name);
// Comma-separated list of view names; throws Error(kInvalidArgument).
std::vector<ViewPrefix> parse_views(std::string_view list);

// One (view prefix + query) -> identifier example.
struct TrainingSample {
  ViewPrefix prefix = ViewPrefix::kTitle;
  std::vector<std::string> query_terms;
  std::vector<TokenId> target;
  std::string passage_id;
  bool unsupervised = false;
};

// What the scorer sees at one decoding step.
struct ScoringContext {
  ViewPrefix view = ViewPrefix::kTitle;
  std::span<const std::string> query_terms;
  std::span<const TokenId> output;  // identifier tokens emitted so far
};

// Autoregressive scoring contract. Implementations return a finite
// log-probability per candidate; renormalizing over the candidate set is the
// decoder's job. next_distribution must be safe to call concurrently.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual void next_distribution(const ScoringContext& context, std::span<const TokenId> candidates,
                                 std::span<double> log_probs) const = 0;
  // Whether the scorer can emit this token at all.
  virtual bool knows(TokenId token) const = 0;
  virtual std::uint64_t vocabulary_fingerprint() const = 0;
};

// Token that closes an identifier of the given view when the view has one.
// Substrings are open-ended and return nullopt.
std::optional<TokenId> closing_token(ViewPrefix view);

struct TrainingPair {
  std::string query;
  std::string passage_id;
};

// TSV rows: query \t passage_id.
std::vector<TrainingPair> load_training_pairs(const std::string& path);
std::vector<TrainingPair> parse_training_pairs(std::string_view contents);

struct ViewRatio {
  unsigned title = 3;
  unsigned substring = 10;
  unsigned pseudo_query = 5;

  unsigned of(ViewPrefix v) const;
  bool operator==(const ViewRatio&) const = default;
};

// "a:b:c" with non-negative integers.
ViewRatio parse_ratio(std::string_view text);

struct SampleOptions {
  ViewRatio ratio;
  // Minimum share of the query's character 3-grams a substring target must
  // cover.
  double overlap_threshold = 0.2;
  std::size_t min_substring = 4;
  std::size_t max_substring = 16;
  std::uint64_t seed = 0;
};

// |3-gram multiset intersection| / |query 3-gram multiset|; 0 when the query
// has fewer than three characters.
double char_trigram_overlap(std::string_view query, std::string_view candidate);

struct SubstringChoice {
  std::size_t begin = 0;
  std::size_t end = 0;
  double overlap = 0.0;
};

// Picks a `length`-token span of `body` uniformly among those whose overlap
// with `query` exceeds `threshold`; if none does, the highest-overlap span
// (earliest on ties).
SubstringChoice select_substring(std::string_view query, std::span<const std::string> body,
                                 std::size_t length, double threshold, std::mt19937_64& rng);

// Supervised samples: per pair, ratio.title title samples, ratio.substring
// substring samples and ratio.pseudo_query pseudo-query samples, shuffled.
std::vector<TrainingSample> build_training_samples(std::span<const TrainingPair> pairs,
                                                   const Corpus& corpus, const Vocabulary& vocab,
                                                   const SampleOptions& options,
                                                   std::vector<std::string>* warnings = nullptr);

// Up to per_passage samples for every passage with pseudo-queries. Each input
// is one of the passage's pseudo-queries; targets are that passage's own
// identifiers, cycling through the three views.
std::vector<TrainingSample> build_unsupervised_samples(const Corpus& corpus, const Vocabulary& vocab,
                                                       std::size_t per_passage,
                                                       const SampleOptions& options);

}  // namespace mvgr
