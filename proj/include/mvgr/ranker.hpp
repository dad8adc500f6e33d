// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvgr/decoder.hpp"
#include "mvgr/fm_index.hpp"

namespace mvgr {

// Maps an identifier's language-model score to its contribution to a
// passage score.
struct ScoreTransform {
  enum class Kind {
    // weight * exp(score / length^length_exponent): in (0, weight], so
    // covering one more identifier always raises the passage score.
    kLengthNormalizedExp,
    // weight * score, the unmodified sum of log-probabilities.
    kRaw,
  };
  Kind kind = Kind::kLengthNormalizedExp;
  double length_exponent = 1.0;
  std::array<double, 3> view_weights = {1.0, 1.0, 1.0};

  double operator()(const Prediction& p) const;
};

using Span = std::pair<std::uint32_t, std::uint32_t>;  // [begin, end) stream offsets

struct CoveredEntry {
  Prediction prediction;
  std::vector<Span> spans;  // occurrences counted for this passage
};

// Predicted identifiers found in one passage, in view order (title,
// substring, pseudo-query) and then prediction order. Substring entries have
// pairwise disjoint spans.
struct CoveredSet {
  std::string passage_id;
  std::vector<CoveredEntry> entries;
};

struct RankedEntry {
  std::string passage_id;
  double score = 0.0;
  bool operator==(const RankedEntry&) const = default;
};

// Non-increasing score; ties by ascending passage id.
using RankedList = std::vector<RankedEntry>;

// Ids of passages where at least one prediction occurs in its view's region,
// sorted ascending.
std::vector<std::string> gather_candidates(const PredictionSet& predictions, const FMIndex& index);

// Overlapping substring matches are resolved greedily: predictions are taken
// by score (then longer, then lexicographically smaller text); one is kept if
// any of its occurrences is still free, and those free occurrences become
// occupied. Title and pseudo-query matches are never deduplicated.
CoveredSet cover(std::string_view passage_id, const PredictionSet& predictions, const FMIndex& index);

// Sum of transformed entry scores; 0 for an empty set.
double score_passage(const CoveredSet& covered, const ScoreTransform& transform);

RankedList rank(const PredictionSet& predictions, const FMIndex& index, const ScoreTransform& transform);

// TSV rows query_id \t passage_id \t rank \t score, rank starting at 1.
void write_run(std::ostream& out, std::string_view query_id, const RankedList& ranked,
               std::size_t depth);

}  // namespace mvgr
