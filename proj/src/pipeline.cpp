// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/pipeline.hpp"

#include <algorithm>
#include <random>

#include "mvgr/error.hpp"

namespace mvgr {

Retriever::Retriever(const FMIndex& index, const Scorer& scorer, RetrievalConfig config)
    : index_(index), scorer_(scorer), config_(std::move(config)) {
  config_.beam.validate();
  if (config_.views.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one view is required");
  if (scorer_.vocabulary_fingerprint() != index_.vocab().fingerprint()) {
    throw Error(ErrorCode::kVocabularyMismatch, "scorer and index use different vocabularies");
  }
}

PredictionSet Retriever::predict(std::string_view query) const {
  return generate_all(query, index_, scorer_, config_.beam, config_.views);
}

RankedList Retriever::retrieve(std::string_view query) const {
  auto ranked = rank(predict(query), index_, config_.transform);
  if (ranked.size() > config_.depth) ranked.resize(config_.depth);
  return ranked;
}

std::vector<QueryRun> retrieve_all(const Retriever& retriever, std::span<const Query> queries,
                                   std::size_t workers) {
  std::vector<QueryRun> runs(queries.size());
  parallel_for(queries.size(), workers, [&](std::size_t i) {
    runs[i].query_id = queries[i].id;
    try {
      runs[i].ranked = retriever.retrieve(queries[i].text);
    } catch (const std::exception& e) {
      runs[i].ranked.clear();
      runs[i].error = e.what();
    }
  });
  return runs;
}

std::vector<SweepRow> sweep_beam_sizes(std::span<const Query> queries, const Qrels& qrels,
                                       const FMIndex& index, const Scorer& scorer,
                                       const RetrievalConfig& base, std::span<const std::size_t> beam_sizes,
                                       const MetricSpec& metrics, std::size_t workers) {
  std::vector<SweepRow> rows;
  for (auto beam : beam_sizes) {
    RetrievalConfig config = base;
    config.beam.beam_size = beam;
    Retriever retriever(index, scorer, config);
    auto report = run_eval(
        queries, qrels, [&](const Query& q) { return retriever.retrieve(q.text); }, metrics, workers);
    rows.push_back({beam, std::move(report)});
  }
  return rows;
}

NgramScorer train_scorer(std::span<const TrainingPair> pairs, const Corpus& corpus, const Vocabulary& vocab,
                         const TrainingConfig& config, TrainingReport* report) {
  std::vector<std::string> warnings;
  auto samples = build_training_samples(pairs, corpus, vocab, config.samples, &warnings);
  const auto extra = build_unsupervised_samples(corpus, vocab, config.unsupervised_per_passage, config.samples);
  if (report) {
    report->supervised.clear();
    for (auto v : kAllViews) report->supervised[v] = 0;
    for (const auto& s : samples) ++report->supervised[s.prefix];
    report->unsupervised = extra.size();
    report->warnings = warnings;
  }
  samples.insert(samples.end(), extra.begin(), extra.end());
  std::mt19937_64 rng(config.samples.seed ^ 0x5bd1e995ULL);
  std::shuffle(samples.begin(), samples.end(), rng);
  return NgramScorer::train(samples, vocab, config.ngram);
}

}  // namespace mvgr
