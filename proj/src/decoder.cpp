// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mvgr/error.hpp"

namespace mvgr {

std::size_t BeamConfig::max_len(ViewPrefix view) const {
  switch (view) {
    case ViewPrefix::kTitle: return max_title_len;
    case ViewPrefix::kSubstring: return max_substring_len;
    case ViewPrefix::kPseudoQuery: return max_query_len;
  }
  return 0;
}

void BeamConfig::validate() const {
  if (beam_size < 1) throw Error(ErrorCode::kInvalidArgument, "beam size must be >= 1");
  if (max_title_len < 1 || max_substring_len < 1 || max_query_len < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max identifier length must be >= 1");
  }
  if (candidate_factor < 1) throw Error(ErrorCode::kInvalidArgument, "candidate factor must be >= 1");
}

MirrorRange start_range(ViewPrefix view, const FMIndex& index) {
  switch (view) {
    case ViewPrefix::kTitle: return index.extend_forward(index.mirror_full_range(), token::kTitleStart);
    case ViewPrefix::kPseudoQuery: return index.extend_forward(index.mirror_full_range(), token::kQueryStart);
    case ViewPrefix::kSubstring: return index.mirror_full_range();
  }
  return {};
}

std::vector<Continuation> valid_continuations(ViewPrefix view, const MirrorRange& range,
                                              std::span<const TokenId> output, const FMIndex& index,
                                              const Scorer& scorer) {
  std::vector<Continuation> out;
  if (range.empty()) return out;
  const auto close = view == ViewPrefix::kSubstring ? std::optional<TokenId>(token::kBodyEnd)
                                                    : closing_token(view);
  for (const auto& s : index.successors(range)) {
    if (close && s.token == *close) {
      if (!output.empty()) out.push_back({s.token, {}});
      continue;
    }
    if (!token::is_content(s.token) || !scorer.knows(s.token)) continue;
    const auto next = index.extend_forward(range, s.token);
    if (view == ViewPrefix::kSubstring && index.body_count(next) == 0) continue;
    out.push_back({s.token, next});
  }
  return out;
}

namespace {

struct Hypothesis {
  std::vector<TokenId> tokens;
  double score = 0.0;
  MirrorRange range;
};

struct Expansion {
  std::size_t parent;
  TokenId token;
  double score;
  MirrorRange range;
  bool closes;
};

bool better(double a_score, std::span<const TokenId> a, double b_score, std::span<const TokenId> b) {
  if (a_score != b_score) return a_score > b_score;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::vector<Prediction> generate_view(std::string_view query, ViewPrefix view, const FMIndex& index,
                                      const Scorer& scorer, const BeamConfig& config) {
  config.validate();
  if (scorer.vocabulary_fingerprint() != index.vocab().fingerprint()) {
    throw Error(ErrorCode::kVocabularyMismatch, "scorer and index use different vocabularies");
  }
  const auto& tok = default_tokenizer();
  const auto terms = tok.split(query);
  const std::size_t max_len = config.max_len(view);
  const std::size_t limit = config.prediction_limit();
  const std::size_t per_hyp = config.candidate_factor * config.beam_size;
  const double bias = view == ViewPrefix::kPseudoQuery ? config.query_length_bias : 0.0;

  std::map<std::vector<TokenId>, double> finished;
  auto finish = [&](std::vector<TokenId> tokens, double score) {
    if (tokens.empty()) return;
    auto [it, inserted] = finished.emplace(std::move(tokens), score);
    if (!inserted) it->second = std::max(it->second, score);
  };

  std::vector<Hypothesis> active;
  if (auto r = start_range(view, index); !r.empty()) active.push_back({{}, 0.0, r});

  std::vector<double> lp;
  std::vector<TokenId> cand_tokens;
  std::vector<std::size_t> order;
  while (!active.empty()) {
    std::vector<Expansion> expansions;
    for (std::size_t h = 0; h < active.size(); ++h) {
      const auto& hyp = active[h];
      const auto conts = valid_continuations(view, hyp.range, hyp.tokens, index, scorer);
      if (conts.empty()) continue;
      cand_tokens.resize(conts.size());
      for (std::size_t i = 0; i < conts.size(); ++i) cand_tokens[i] = conts[i].token;
      lp.assign(conts.size(), 0.0);
      scorer.next_distribution({view, terms, hyp.tokens}, cand_tokens, lp);
      // Renormalize over the valid continuations only.
      const double peak = *std::max_element(lp.begin(), lp.end());
      double z = 0.0;
      for (double v : lp) z += std::exp(v - peak);
      const double log_z = peak + std::log(z);
      order.resize(conts.size());
      std::iota(order.begin(), order.end(), 0);
      const std::size_t keep = std::min(per_hyp, conts.size());
      std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](std::size_t a, std::size_t b) {
        return lp[a] != lp[b] ? lp[a] > lp[b] : cand_tokens[a] < cand_tokens[b];
      });
      for (std::size_t k = 0; k < keep; ++k) {
        const auto& c = conts[order[k]];
        const bool closes = !token::is_content(c.token);
        expansions.push_back({h, c.token, hyp.score + lp[order[k]] - log_z, c.range, closes});
      }
    }
    if (expansions.empty()) break;

    auto tokens_of = [&](const Expansion& e) {
      std::vector<TokenId> t = active[e.parent].tokens;
      if (!e.closes) t.push_back(e.token);
      return t;
    };
    std::vector<std::vector<TokenId>> expanded(expansions.size());
    for (std::size_t i = 0; i < expansions.size(); ++i) expanded[i] = tokens_of(expansions[i]);
    order.resize(expansions.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (expansions[a].score != expansions[b].score) return expansions[a].score > expansions[b].score;
      if (expanded[a] != expanded[b]) return expanded[a] < expanded[b];
      return expansions[a].closes < expansions[b].closes;
    });

    std::vector<Hypothesis> next;
    for (std::size_t rank = 0; rank < order.size() && next.size() < config.beam_size; ++rank) {
      const auto& e = expansions[order[rank]];
      if (e.closes) {
        if (rank < config.beam_size) finish(expanded[order[rank]], e.score);
        continue;
      }
      if (expanded[order[rank]].size() >= max_len) {
        // Open-ended substrings stop at max_len; delimited views cannot.
        if (view == ViewPrefix::kSubstring && rank < config.beam_size) finish(expanded[order[rank]], e.score);
        continue;
      }
      next.push_back({std::move(expanded[order[rank]]), e.score, e.range});
    }
    active = std::move(next);

    // Step log-probabilities are <= 0, so an active hypothesis can only lose
    // score from here on, apart from what the length bias can still add.
    if (finished.size() >= limit && !active.empty()) {
      std::vector<double> scores;
      for (const auto& [tokens, s] : finished) scores.push_back(s + bias * static_cast<double>(tokens.size()));
      std::nth_element(scores.begin(), scores.begin() + (limit - 1), scores.end(), std::greater<>());
      const double kth = scores[limit - 1];
      double best_active = -std::numeric_limits<double>::infinity();
      for (const auto& h : active) {
        const double reach = bias > 0 ? static_cast<double>(max_len) : static_cast<double>(h.tokens.size() + 1);
        best_active = std::max(best_active, h.score + bias * reach);
      }
      if (best_active <= kth) break;
    }
  }

  std::vector<Prediction> out;
  for (auto& [tokens, score] : finished) {
    Prediction p;
    p.view = view;
    p.text = tok.join(index.vocab().decode(tokens));
    p.tokens = tokens;
    p.score = score;
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const Prediction& a, const Prediction& b) {
    return better(a.score, a.tokens, b.score, b.tokens);
  });
  if (view == ViewPrefix::kPseudoQuery && config.query_length_bias != 0.0) {
    out = apply_length_bias(std::move(out), config.query_length_bias);
  }
  if (out.size() > limit) out.resize(limit);
  return out;
}

std::vector<Prediction> apply_length_bias(std::vector<Prediction> predictions, double bias_per_token) {
  for (auto& p : predictions) {
    if (p.view == ViewPrefix::kPseudoQuery) p.score += bias_per_token * static_cast<double>(p.tokens.size());
  }
  std::stable_sort(predictions.begin(), predictions.end(), [](const Prediction& a, const Prediction& b) {
    return better(a.score, a.tokens, b.score, b.tokens);
  });
  return predictions;
}

PredictionSet generate_all(std::string_view query, const FMIndex& index, const Scorer& scorer,
                           const BeamConfig& config, std::span<const ViewPrefix> views) {
  if (views.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one view is required");
  PredictionSet out;
  for (auto v : views) out[v] = generate_view(query, v, index, scorer, config);
  return out;
}

}  // namespace mvgr
