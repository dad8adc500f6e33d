// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/ngram_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mvgr/binary_io.hpp"
#include "mvgr/error.hpp"

namespace mvgr {

namespace {

constexpr std::uint64_t kBos = 0xffffffffULL;
constexpr std::string_view kMagic = "MNDS";
constexpr std::uint32_t kVersion = 1;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the running hash.
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint32_t NgramScorer::Table::count_of(TokenId t) const {
  auto it = std::lower_bound(counts.begin(), counts.end(), t,
                             [](const auto& e, TokenId key) { return e.first < key; });
  return it != counts.end() && it->first == t ? it->second : 0;
}

std::uint64_t NgramScorer::history_key(ViewPrefix view, std::span<const TokenId> output) const {
  std::uint64_t h = mix(0x6869737400000000ULL, static_cast<std::uint64_t>(view));
  const std::size_t n = options_.order > 0 ? options_.order - 1 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    // Left-pad short outputs with BOS.
    const std::size_t back = n - i;
    h = mix(h, output.size() >= back ? output[output.size() - back] : kBos);
  }
  return h;
}

std::vector<std::uint64_t> NgramScorer::feature_keys(ViewPrefix view, std::span<const std::string> terms,
                                                     std::span<const TokenId> output) const {
  std::vector<std::uint64_t> buckets;
  buckets.reserve(terms.size());
  for (const auto& t : terms) buckets.push_back(fnv1a64(t) % options_.feature_buckets);
  std::sort(buckets.begin(), buckets.end());
  buckets.erase(std::unique(buckets.begin(), buckets.end()), buckets.end());
  const auto base = history_key(view, output);
  std::vector<std::uint64_t> keys;
  keys.reserve(buckets.size());
  for (auto b : buckets) keys.push_back(mix(mix(base, 0x66656174ULL), b));
  return keys;
}

NgramScorer NgramScorer::train(std::span<const TrainingSample> samples, const Vocabulary& vocab,
                               NgramOptions options) {
  if (options.order < 1) throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  if (!(options.smoothing > 0.0)) throw Error(ErrorCode::kInvalidArgument, "smoothing must be > 0");
  if (options.feature_buckets == 0) throw Error(ErrorCode::kInvalidArgument, "feature buckets must be > 0");
  NgramScorer s;
  s.options_ = options;
  s.fingerprint_ = vocab.fingerprint();
  s.vocab_size_ = static_cast<std::uint32_t>(vocab.size());

  std::unordered_map<std::uint64_t, std::map<TokenId, std::uint32_t>> raw;
  std::vector<TokenId> seq;
  for (const auto& sample : samples) {
    seq = sample.target;
    if (auto close = closing_token(sample.prefix)) seq.push_back(*close);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      std::span<const TokenId> history(seq.data(), i);
      ++raw[s.history_key(sample.prefix, history)][seq[i]];
      for (auto key : s.feature_keys(sample.prefix, sample.query_terms, history)) ++raw[key][seq[i]];
    }
  }
  for (auto& [key, counts] : raw) {
    Table t;
    for (auto [tok, n] : counts) {
      t.counts.emplace_back(tok, n);
      t.total += n;
    }
    s.tables_.emplace(key, std::move(t));
  }
  return s;
}

void NgramScorer::next_distribution(const ScoringContext& context, std::span<const TokenId> candidates,
                                    std::span<double> log_probs) const {
  const double alpha = options_.smoothing;
  const double v = static_cast<double>(std::max<std::uint32_t>(vocab_size_, 1));
  auto add_term = [&](std::uint64_t key, double weight) {
    auto it = tables_.find(key);
    const Table* table = it == tables_.end() ? nullptr : &it->second;
    const double denom = std::log((table ? static_cast<double>(table->total) : 0.0) + alpha * v);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double c = table ? table->count_of(candidates[i]) : 0.0;
      log_probs[i] += weight * (std::log(c + alpha) - denom);
    }
  };
  std::fill(log_probs.begin(), log_probs.end(), 0.0);
  add_term(history_key(context.view, context.output), 1.0);
  if (options_.query_weight != 0.0) {
    for (auto key : feature_keys(context.view, context.query_terms, context.output)) {
      add_term(key, options_.query_weight);
    }
  }
}

std::vector<std::uint8_t> NgramScorer::serialize() const {
  io::BinaryWriter w;
  w.raw(kMagic);
  w.u32(kVersion);
  w.u64(fingerprint_);
  w.u32(vocab_size_);
  w.u32(options_.order);
  w.f64(options_.smoothing);
  w.f64(options_.query_weight);
  w.u32(options_.feature_buckets);
  std::vector<std::uint64_t> keys;
  keys.reserve(tables_.size());
  for (const auto& [k, _] : tables_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  w.u64(keys.size());
  for (auto k : keys) {
    const auto& t = tables_.at(k);
    w.u64(k);
    w.u32(static_cast<std::uint32_t>(t.counts.size()));
    for (auto [tok, n] : t.counts) {
      w.u32(tok);
      w.u32(n);
    }
  }
  w.seal();
  return w.bytes();
}

NgramScorer NgramScorer::deserialize(std::span<const std::uint8_t> bytes, const Vocabulary& vocab) {
  io::BinaryReader r(io::verify_sealed(bytes, "scorer"));
  if (r.raw(4) != kMagic) throw Error(ErrorCode::kFormat, "not a scorer file (bad magic)");
  if (const auto v = r.u32(); v != kVersion) {
    throw Error(ErrorCode::kFormat, "unsupported scorer version " + std::to_string(v));
  }
  NgramScorer s;
  s.fingerprint_ = r.u64();
  s.vocab_size_ = r.u32();
  if (s.fingerprint_ != vocab.fingerprint() || s.vocab_size_ != vocab.size()) {
    throw Error(ErrorCode::kVocabularyMismatch, "scorer was trained against a different vocabulary");
  }
  s.options_.order = r.u32();
  s.options_.smoothing = r.f64();
  s.options_.query_weight = r.f64();
  s.options_.feature_buckets = r.u32();
  if (s.options_.order < 1 || !(s.options_.smoothing > 0.0) || s.options_.feature_buckets == 0) {
    throw Error(ErrorCode::kFormat, "invalid scorer options");
  }
  const auto n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto key = r.u64();
    Table t;
    const auto m = r.u32();
    for (std::uint32_t j = 0; j < m; ++j) {
      const auto tok = r.u32();
      const auto c = r.u32();
      t.counts.emplace_back(tok, c);
      t.total += c;
    }
    s.tables_.emplace(key, std::move(t));
  }
  if (!r.at_end()) throw Error(ErrorCode::kFormat, "trailing bytes in scorer file");
  return s;
}

void NgramScorer::save(const std::string& path) const { io::write_file(path, serialize()); }

NgramScorer NgramScorer::load(const std::string& path, const Vocabulary& vocab) {
  return deserialize(io::read_file(path), vocab);
}

}  // namespace mvgr
