// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvgr/corpus.hpp"
#include "mvgr/eval.hpp"
#include "mvgr/scorer.hpp"

namespace mvgr {

// A templated retrieval benchmark. Passages are grouped under shared
// titles; each passage has a unique fact in its body and unique expansion
// words that only its pseudo-queries carry. Clusters of mirror passages
// repeat one body under different titles, and some have no
// pseudo-queries at all. Held-out queries use templates never seen in
// training and come in three kinds:
//   fact   - fact words only, no title words
//   expand - expansion words only
//   topic  - title words plus an aspect word found only in pseudo-queries
struct SyntheticOptions {
  std::size_t entities = 25;
  std::size_t aspects = 8;  // passages per entity, at most 8
  std::size_t heldout_queries = 100;
  double mirror_fraction = 0.2;  // passages that share a body with others
  std::size_t mirror_group = 10;  // passages per shared body
  double bare_fraction = 0.15;   // passages without pseudo-queries
  std::uint64_t seed = 7;
};

struct SyntheticBenchmark {
  Corpus corpus;  // pseudo-queries attached
  std::vector<TrainingPair> train;
  std::vector<Query> queries;
  Qrels qrels;
};

SyntheticBenchmark make_synthetic(const SyntheticOptions& options);

// corpus.jsonl, train.tsv, queries.tsv and qrels.tsv under `dir`.
void write_synthetic(const SyntheticBenchmark& bench, const std::string& dir);

}  // namespace mvgr
