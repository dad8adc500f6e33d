// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "mvgr/ranker.hpp"
#include "test_util.hpp"

namespace mvgr::testing {

// Brute-force scoring straight from the flattened passages: exact equality
// for title and pseudo-query views, a position mask for substrings.
inline double oracle_score(const FlatStream& stream, const PredictionSet& preds, const ScoreTransform& transform,
                    bool* any = nullptr) {
  const auto seg = extract_segments(stream.tokens);
  double total = 0.0;
  bool matched = false;
  std::vector<const Prediction*> subs;
  for (const auto& [view, list] : preds) {
    for (const auto& p : list) {
      if (p.tokens.empty()) continue;
      if (view == ViewPrefix::kSubstring) {
        subs.push_back(&p);
        continue;
      }
      bool hit = false;
      if (view == ViewPrefix::kTitle) hit = seg.title == p.tokens;
      for (const auto& q : seg.queries) hit |= view == ViewPrefix::kPseudoQuery && q == p.tokens;
      if (hit) matched = true;
    }
  }
  // Greedy substring selection on a boolean mask.
  std::stable_sort(subs.begin(), subs.end(), [](const Prediction* a, const Prediction* b) {
    if (a->score != b->score) return a->score > b->score;
    if (a->tokens.size() != b->tokens.size()) return a->tokens.size() > b->tokens.size();
    if (a->text != b->text) return a->text < b->text;
    return a->tokens < b->tokens;
  });
  std::vector<bool> used(seg.body.size(), false);
  std::set<const Prediction*> kept;
  for (const Prediction* p : subs) {
    std::vector<std::size_t> starts;
    for (std::size_t b = 0; b + p->tokens.size() <= seg.body.size(); ++b) {
      if (!matches_at(seg.body, b, p->tokens)) continue;
      bool free = true;
      for (std::size_t i = b; i < b + p->tokens.size(); ++i) free &= !used[i];
      if (free && (starts.empty() || starts.back() + p->tokens.size() <= b)) starts.push_back(b);
    }
    if (starts.empty()) continue;
    for (auto b : starts) std::fill(used.begin() + b, used.begin() + b + p->tokens.size(), true);
    kept.insert(p);
  }
  // Canonical summation order: views, then prediction order.
  for (const auto& [view, list] : preds) {
    for (const auto& p : list) {
      if (p.tokens.empty()) continue;
      bool hit = false;
      if (view == ViewPrefix::kTitle) hit = seg.title == p.tokens;
      if (view == ViewPrefix::kPseudoQuery) {
        hit = std::find(seg.queries.begin(), seg.queries.end(), p.tokens) != seg.queries.end();
      }
      if (view == ViewPrefix::kSubstring) hit = kept.count(&p) > 0;
      if (hit) total += transform(p);
      matched |= hit;
    }
  }
  if (any) *any = matched;
  return total;
}

// Random predictions drawn mostly from real passage content.
inline PredictionSet random_predictions(std::mt19937_64& rng, const std::vector<FlatStream>& streams,
                                        const Vocabulary& vocab, std::size_t per_view) {
  PredictionSet out;
  std::uniform_real_distribution<double> score(-12.0, -0.01);
  for (auto view : kAllViews) {
    auto& list = out[view];
    for (std::size_t i = 0; i < per_view; ++i) {
      const auto seg = extract_segments(streams[rng() % streams.size()].tokens);
      Prediction p;
      p.view = view;
      if (rng() % 5 == 0) {
        p.tokens = vocab.encode(default_tokenizer().split(random_text(rng, 1, 3, 6)));
      } else if (view == ViewPrefix::kTitle) {
        p.tokens = seg.title;
      } else if (view == ViewPrefix::kPseudoQuery) {
        if (!seg.queries.empty()) p.tokens = seg.queries[rng() % seg.queries.size()];
      } else {
        const std::size_t len = 1 + rng() % 3;
        if (seg.body.size() >= len) {
          const std::size_t b = rng() % (seg.body.size() - len + 1);
          p.tokens.assign(seg.body.begin() + b, seg.body.begin() + b + len);
        }
      }
      if (p.tokens.empty()) continue;
      p.text = default_tokenizer().join(vocab.decode(p.tokens));
      p.score = rng() % 6 == 0 && !list.empty() ? list.back().score : score(rng);
      list.push_back(std::move(p));
    }
  }
  return out;
}

// Every passage scored by the oracle, ordered like rank().
inline RankedList oracle_rank(const std::vector<FlatStream>& streams, const PredictionSet& preds,
                              const ScoreTransform& transform) {
  RankedList out;
  for (const auto& s : streams) {
    bool any = false;
    const double v = oracle_score(s, preds, transform, &any);
    if (any) out.push_back({s.doc_id, v});
  }
  std::sort(out.begin(), out.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return a.score != b.score ? a.score > b.score : a.passage_id < b.passage_id;
  });
  return out;
}

}  // namespace mvgr::testing
