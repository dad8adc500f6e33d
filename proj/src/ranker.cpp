// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

namespace mvgr {

double ScoreTransform::operator()(const Prediction& p) const {
  const double weight = view_weights[static_cast<std::size_t>(p.view)];
  if (kind == Kind::kRaw) return weight * p.score;
  const double len = std::max<double>(1.0, static_cast<double>(p.tokens.size()));
  return weight * std::exp(p.score / std::pow(len, length_exponent));
}

namespace {

// Matches of one prediction inside its view region, grouped by document.
using MatchMap = std::map<std::uint32_t, std::vector<Span>>;

MatchMap find_matches(const Prediction& p, const FMIndex& index) {
  MatchMap out;
  if (p.tokens.empty()) return out;
  const auto len = static_cast<std::uint32_t>(p.tokens.size());
  if (p.view == ViewPrefix::kSubstring) {
    for (const auto& occ : index.locate(p.tokens, std::numeric_limits<std::size_t>::max())) {
      if (index.region_at(occ.doc, occ.offset) == Region::kBody) {
        out[occ.doc].emplace_back(occ.offset, occ.offset + len);
      }
    }
    return out;
  }
  const bool title = p.view == ViewPrefix::kTitle;
  std::vector<TokenId> pattern;
  pattern.reserve(p.tokens.size() + 2);
  pattern.push_back(title ? token::kTitleStart : token::kQueryStart);
  pattern.insert(pattern.end(), p.tokens.begin(), p.tokens.end());
  pattern.push_back(title ? token::kTitleEnd : token::kQueryEnd);
  for (const auto& occ : index.locate(pattern, std::numeric_limits<std::size_t>::max())) {
    out[occ.doc].emplace_back(occ.offset + 1, occ.offset + 1 + len);
  }
  return out;
}

// Free-interval bookkeeping for substring deduplication.
class Occupancy {
 public:
  bool free(Span s) const {
    auto it = taken_.lower_bound(s.first);
    if (it != taken_.end() && it->first < s.second) return false;
    if (it != taken_.begin() && std::prev(it)->second > s.first) return false;
    return true;
  }
  void take(Span s) { taken_.emplace(s.first, s.second); }

 private:
  std::map<std::uint32_t, std::uint32_t> taken_;
};

struct Candidate {
  const Prediction* prediction;
  std::size_t order;  // position in view order, then list order
  std::vector<Span> spans;
};

CoveredSet resolve(std::string passage_id, std::vector<Candidate> found) {
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.order < b.order; });
  std::vector<const Candidate*> subs;
  for (const auto& c : found) {
    if (c.prediction->view == ViewPrefix::kSubstring) subs.push_back(&c);
  }
  std::sort(subs.begin(), subs.end(), [](const Candidate* a, const Candidate* b) {
    const auto& pa = *a->prediction;
    const auto& pb = *b->prediction;
    if (pa.score != pb.score) return pa.score > pb.score;
    if (pa.tokens.size() != pb.tokens.size()) return pa.tokens.size() > pb.tokens.size();
    if (pa.text != pb.text) return pa.text < pb.text;
    if (pa.tokens != pb.tokens) return pa.tokens < pb.tokens;
    return a->order < b->order;
  });
  Occupancy occupied;
  std::map<const Candidate*, std::vector<Span>> kept;
  for (const Candidate* c : subs) {
    std::vector<Span> free_spans;
    for (const auto& s : c->spans) {
      if (occupied.free(s)) free_spans.push_back(s);
    }
    // Spans of a single prediction may overlap each other (periodic text);
    // keep the first of any such run.
    std::vector<Span> accepted;
    for (const auto& s : free_spans) {
      if (accepted.empty() || accepted.back().second <= s.first) accepted.push_back(s);
    }
    if (accepted.empty()) continue;
    for (const auto& s : accepted) occupied.take(s);
    kept.emplace(c, std::move(accepted));
  }

  CoveredSet out{std::move(passage_id), {}};
  for (const auto& c : found) {
    if (c.prediction->view == ViewPrefix::kSubstring) {
      auto it = kept.find(&c);
      if (it == kept.end()) continue;
      out.entries.push_back({*c.prediction, it->second});
    } else {
      out.entries.push_back({*c.prediction, c.spans});
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> gather_candidates(const PredictionSet& predictions, const FMIndex& index) {
  std::set<std::string> ids;
  for (const auto& [view, list] : predictions) {
    for (const auto& p : list) {
      for (const auto& [doc, _] : find_matches(p, index)) ids.insert(index.doc(doc).id);
    }
  }
  return {ids.begin(), ids.end()};
}

CoveredSet cover(std::string_view passage_id, const PredictionSet& predictions, const FMIndex& index) {
  const auto doc = index.doc_index(passage_id);
  std::vector<Candidate> found;
  if (doc) {
    std::size_t order = 0;
    for (const auto& [view, list] : predictions) {
      for (const auto& p : list) {
        auto matches = find_matches(p, index);
        if (auto it = matches.find(*doc); it != matches.end()) found.push_back({&p, order, std::move(it->second)});
        ++order;
      }
    }
  }
  return resolve(std::string(passage_id), std::move(found));
}

double score_passage(const CoveredSet& covered, const ScoreTransform& transform) {
  double total = 0.0;
  for (const auto& e : covered.entries) total += transform(e.prediction);
  return total;
}

RankedList rank(const PredictionSet& predictions, const FMIndex& index, const ScoreTransform& transform) {
  std::map<std::uint32_t, std::vector<Candidate>> by_doc;
  std::size_t order = 0;
  for (const auto& [view, list] : predictions) {
    for (const auto& p : list) {
      for (auto& [doc, spans] : find_matches(p, index)) by_doc[doc].push_back({&p, order, std::move(spans)});
      ++order;
    }
  }
  RankedList out;
  out.reserve(by_doc.size());
  for (auto& [doc, found] : by_doc) {
    const auto covered = resolve(index.doc(doc).id, std::move(found));
    out.push_back({covered.passage_id, score_passage(covered, transform)});
  }
  std::sort(out.begin(), out.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.passage_id < b.passage_id;
  });
  return out;
}

void write_run(std::ostream& out, std::string_view query_id, const RankedList& ranked, std::size_t depth) {
  char score[64];
  for (std::size_t i = 0; i < ranked.size() && i < depth; ++i) {
    std::snprintf(score, sizeof(score), "%.17g", ranked[i].score);
    out << query_id << '\t' << ranked[i].passage_id << '\t' << (i + 1) << '\t' << score << '\n';
  }
}

}  // namespace mvgr
