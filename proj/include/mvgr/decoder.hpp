// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvgr/fm_index.hpp"
#include "mvgr/scorer.hpp"

namespace mvgr {

// One generated identifier.
struct Prediction {
  ViewPrefix view = ViewPrefix::kTitle;
  std::vector<TokenId> tokens;  // identifier content, delimiters excluded
  std::string text;
  double score = 0.0;  // summed step log-probabilities (+ length bias for pseudo-queries)
};

using PredictionSet = std::map<ViewPrefix, std::vector<Prediction>>;

struct BeamConfig {
  std::size_t beam_size = 15;
  std::size_t max_title_len = 32;
  std::size_t max_substring_len = 10;
  std::size_t max_query_len = 32;
  // Added per token to pseudo-query scores.
  double query_length_bias = 0.0;
  // 0 means "same as beam_size".
  std::size_t predictions_per_view = 0;
  // Per hypothesis, only the top candidate_factor * beam_size continuations
  // are expanded.
  std::size_t candidate_factor = 2;

  std::size_t max_len(ViewPrefix view) const;
  std::size_t prediction_limit() const { return predictions_per_view ? predictions_per_view : beam_size; }
  void validate() const;
};

// Tokens that may follow `output` under `view`, with the mirror range each
// one leads to. The closing delimiter (when the view has one) is listed with
// an empty range.
struct Continuation {
  TokenId token;
  MirrorRange range;
};

std::vector<Continuation> valid_continuations(ViewPrefix view, const MirrorRange& range,
                                              std::span<const TokenId> output, const FMIndex& index,
                                              const Scorer& scorer);

// The mirror range a fresh hypothesis starts from: after <TS>, after <QS>,
// or the whole index for substrings.
MirrorRange start_range(ViewPrefix view, const FMIndex& index);

// Constrained beam search for one view. Every returned identifier occurs in
// the index inside the region that matches `view`. Results are sorted by
// score, descending; duplicates keep their best score.
std::vector<Prediction> generate_view(std::string_view query, ViewPrefix view, const FMIndex& index,
                                      const Scorer& scorer, const BeamConfig& config);

// score += bias_per_token * tokens.size() on pseudo-query predictions, then
// re-sorts by score.
std::vector<Prediction> apply_length_bias(std::vector<Prediction> predictions, double bias_per_token);

PredictionSet generate_all(std::string_view query, const FMIndex& index, const Scorer& scorer,
                           const BeamConfig& config, std::span<const ViewPrefix> views);

}  // namespace mvgr
