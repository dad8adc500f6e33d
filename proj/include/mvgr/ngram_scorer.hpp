// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mvgr/scorer.hpp"

namespace mvgr {

struct NgramOptions {
  unsigned order = 2;         // n: the history is the previous n-1 output tokens
  double smoothing = 0.1;     // additive pseudo-count
  double query_weight = 1.0;  // weight of each query-feature term
  std::uint32_t feature_buckets = 1u << 20;
};

// Reference scorer. The log-probability of a candidate t is
//
//   log P(t | view, h) + query_weight * sum_f log P(t | view, f, h)
//
// where h is the previous order-1 output tokens, f ranges over the hashed
// distinct query terms and both conditionals use additive smoothing over the
// vocabulary. Feature keys never seen in training contribute a constant, so
// they drop out once the decoder renormalizes.
class NgramScorer final : public Scorer {
 public:
  NgramScorer() = default;

  // With no samples the scorer is uniform.
  static NgramScorer train(std::span<const TrainingSample> samples, const Vocabulary& vocab,
                           NgramOptions options = {});

  void next_distribution(const ScoringContext& context, std::span<const TokenId> candidates,
                         std::span<double> log_probs) const override;
  bool knows(TokenId token) const override { return token < vocab_size_; }
  std::uint64_t vocabulary_fingerprint() const override { return fingerprint_; }

  const NgramOptions& options() const { return options_; }
  std::size_t table_count() const { return tables_.size(); }

  std::vector<std::uint8_t> serialize() const;
  // Throws Error(kVocabularyMismatch) if `vocab` differs from the training
  // vocabulary.
  static NgramScorer deserialize(std::span<const std::uint8_t> bytes, const Vocabulary& vocab);
  void save(const std::string& path) const;
  static NgramScorer load(const std::string& path, const Vocabulary& vocab);

 private:
  struct Table {
    std::vector<std::pair<TokenId, std::uint32_t>> counts;  // sorted by token
    std::uint64_t total = 0;
    std::uint32_t count_of(TokenId t) const;
  };

  std::uint64_t history_key(ViewPrefix view, std::span<const TokenId> output) const;
  std::vector<std::uint64_t> feature_keys(ViewPrefix view, std::span<const std::string> terms,
                                          std::span<const TokenId> output) const;

  NgramOptions options_;
  std::uint64_t fingerprint_ = 0;
  std::uint32_t vocab_size_ = 0;
  std::unordered_map<std::uint64_t, Table> tables_;
};

}  // namespace mvgr
