// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvgr/decoder.hpp"
#include "mvgr/eval.hpp"
#include "mvgr/ngram_scorer.hpp"
#include "mvgr/ranker.hpp"

namespace mvgr {

struct RetrievalConfig {
  BeamConfig beam;
  std::vector<ViewPrefix> views = {kAllViews.begin(), kAllViews.end()};
  ScoreTransform transform;
  std::size_t depth = 100;  // ranked passages kept per query
};

// Query text -> predictions -> ranked passages. Holds references; the index
// and scorer must outlive it.
class Retriever {
 public:
  Retriever(const FMIndex& index, const Scorer& scorer, RetrievalConfig config);

  PredictionSet predict(std::string_view query) const;
  RankedList retrieve(std::string_view query) const;
  const RetrievalConfig& config() const { return config_; }

 private:
  const FMIndex& index_;
  const Scorer& scorer_;
  RetrievalConfig config_;
};

struct QueryRun {
  std::string query_id;
  RankedList ranked;
  std::string error;  // non-empty when decoding failed for this query
};

// Retrieves every query; a failure on one query leaves its ranking empty and
// records the message. Output order follows `queries`.
std::vector<QueryRun> retrieve_all(const Retriever& retriever, std::span<const Query> queries,
                                   std::size_t workers);

struct SweepRow {
  std::size_t beam_size;
  EvalReport report;
};

std::vector<SweepRow> sweep_beam_sizes(std::span<const Query> queries, const Qrels& qrels,
                                       const FMIndex& index, const Scorer& scorer,
                                       const RetrievalConfig& base, std::span<const std::size_t> beam_sizes,
                                       const MetricSpec& metrics, std::size_t workers);

struct TrainingConfig {
  SampleOptions samples;
  // Pseudo-query-to-identifier samples added per passage; 0 disables them.
  std::size_t unsupervised_per_passage = 0;
  NgramOptions ngram;
};

struct TrainingReport {
  std::map<ViewPrefix, std::size_t> supervised;  // sample count per view
  std::size_t unsupervised = 0;
  std::vector<std::string> warnings;
};

// Supervised samples from `pairs`, then the unsupervised ones, shuffled
// together under the sample seed.
NgramScorer train_scorer(std::span<const TrainingPair> pairs, const Corpus& corpus, const Vocabulary& vocab,
                         const TrainingConfig& config, TrainingReport* report = nullptr);

}  // namespace mvgr
