// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/scorer.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "mvgr/error.hpp"

namespace mvgr {

std::string_view view_name(ViewPrefix view) {
  switch (view) {
    case ViewPrefix::kTitle: return "title";
    case ViewPrefix::kSubstring: return "substring";
    case ViewPrefix::kPseudoQuery: return "pseudo-query";
  }
  return "?";
}

std::optional<ViewPrefix> parse_view(std::string_view name) {
  for (auto v : kAllViews) {
    if (view_name(v) == name) return v;
  }
  return std::nullopt;
}

std::vector<ViewPrefix> parse_views(std::string_view list) {
  std::vector<ViewPrefix> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    auto item = list.substr(start, comma == std::string_view::npos ? comma : comma - start);
    auto v = parse_view(item);
    if (!v) throw Error(ErrorCode::kInvalidArgument, "unknown view \"" + std::string(item) + "\"");
    if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<TokenId> closing_token(ViewPrefix view) {
  switch (view) {
    case ViewPrefix::kTitle: return token::kTitleEnd;
    case ViewPrefix::kPseudoQuery: return token::kQueryEnd;
    case ViewPrefix::kSubstring: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<TrainingPair> parse_training_pairs(std::string_view contents) {
  std::vector<TrainingPair> pairs;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    std::string line(contents.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    pos = nl == std::string_view::npos ? contents.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (normalize_whitespace(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected query \\t passage_id");
    }
    pairs.push_back({normalize_whitespace(line.substr(0, tab)), normalize_whitespace(line.substr(tab + 1))});
  }
  return pairs;
}

std::vector<TrainingPair> load_training_pairs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open training pairs " + path);
  std::string contents{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_training_pairs(contents);
}

unsigned ViewRatio::of(ViewPrefix v) const {
  switch (v) {
    case ViewPrefix::kTitle: return title;
    case ViewPrefix::kSubstring: return substring;
    case ViewPrefix::kPseudoQuery: return pseudo_query;
  }
  return 0;
}

ViewRatio parse_ratio(std::string_view text) {
  unsigned parts[3];
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    auto colon = text.find(':', start);
    if ((i < 2) == (colon == std::string_view::npos)) {
      throw Error(ErrorCode::kInvalidArgument, "ratio must look like a:b:c, got \"" + std::string(text) + "\"");
    }
    auto item = text.substr(start, i < 2 ? colon - start : std::string_view::npos);
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), parts[i]);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "bad ratio component \"" + std::string(item) + "\"");
    }
    start = colon + 1;
  }
  return {parts[0], parts[1], parts[2]};
}

// ---------------------------------------------------------------------------

namespace {

std::map<std::string_view, int> trigrams(std::string_view s) {
  std::map<std::string_view, int> grams;
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) ++grams[s.substr(i, 3)];
  return grams;
}

}  // namespace

double char_trigram_overlap(std::string_view query, std::string_view candidate) {
  if (query.size() < 3) return 0.0;
  const auto q = trigrams(query);
  const auto c = trigrams(candidate);
  long shared = 0;
  for (const auto& [g, n] : q) {
    if (auto it = c.find(g); it != c.end()) shared += std::min(n, it->second);
  }
  return static_cast<double>(shared) / static_cast<double>(query.size() - 2);
}

SubstringChoice select_substring(std::string_view query, std::span<const std::string> body,
                                 std::size_t length, double threshold, std::mt19937_64& rng) {
  const auto& tok = default_tokenizer();
  length = std::clamp<std::size_t>(length, 1, std::max<std::size_t>(body.size(), 1));
  std::vector<SubstringChoice> kept;
  SubstringChoice best;
  best.overlap = -1.0;
  for (std::size_t b = 0; b + length <= body.size(); ++b) {
    const double overlap = char_trigram_overlap(query, tok.join(body.subspan(b, length)));
    SubstringChoice choice{b, b + length, overlap};
    if (overlap > threshold) kept.push_back(choice);
    if (overlap > best.overlap) best = choice;
  }
  if (kept.empty()) return best;
  std::uniform_int_distribution<std::size_t> pick(0, kept.size() - 1);
  return kept[pick(rng)];
}

namespace {

struct PassageView {
  std::vector<std::string> body_pieces;
  std::vector<TokenId> body;
  std::vector<TokenId> title;
  std::vector<std::vector<TokenId>> queries;
};

PassageView view_of(const Passage& p, const Vocabulary& vocab) {
  const auto& tok = default_tokenizer();
  PassageView v;
  v.body_pieces = tok.split(p.body);
  v.body = vocab.encode(v.body_pieces);
  v.title = vocab.encode(tok.split(p.title));
  for (const auto& q : p.pseudo_queries) v.queries.push_back(vocab.encode(tok.split(q)));
  return v;
}

std::vector<TokenId> substring_target(const std::string& query, const PassageView& pv,
                                      const SampleOptions& options, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(options.min_substring,
                                                 std::max(options.min_substring, options.max_substring));
  const auto choice = select_substring(query, pv.body_pieces, len(rng), options.overlap_threshold, rng);
  return {pv.body.begin() + choice.begin, pv.body.begin() + choice.end};
}

}  // namespace

std::vector<TrainingSample> build_training_samples(std::span<const TrainingPair> pairs,
                                                   const Corpus& corpus, const Vocabulary& vocab,
                                                   const SampleOptions& options,
                                                   std::vector<std::string>* warnings) {
  const auto& tok = default_tokenizer();
  std::mt19937_64 rng(options.seed);
  std::vector<TrainingSample> samples;
  std::set<std::string> warned;
  auto warn = [&](std::string msg) {
    if (warnings && warned.insert(msg).second) warnings->push_back(std::move(msg));
  };
  for (const auto& pair : pairs) {
    const Passage* p = corpus.find(pair.passage_id);
    if (!p) {
      throw Error(ErrorCode::kInvalidArgument, "training pair refers to unknown passage " + pair.passage_id);
    }
    const auto pv = view_of(*p, vocab);
    const auto terms = tok.split(pair.query);
    const auto query_text = tok.join(terms);
    auto push = [&](ViewPrefix v, std::vector<TokenId> target) {
      samples.push_back({v, terms, std::move(target), p->id, false});
    };

    if (options.ratio.title > 0 && pv.title.empty()) {
      warn("passage " + p->id + " has no title; title samples skipped");
    } else {
      for (unsigned i = 0; i < options.ratio.title; ++i) push(ViewPrefix::kTitle, pv.title);
    }
    for (unsigned i = 0; i < options.ratio.substring; ++i) {
      push(ViewPrefix::kSubstring, substring_target(query_text, pv, options, rng));
    }
    if (options.ratio.pseudo_query > 0 && pv.queries.empty()) {
      warn("passage " + p->id + " has no pseudo-queries; pseudo-query samples skipped");
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, pv.queries.empty() ? 0 : pv.queries.size() - 1);
      for (unsigned i = 0; i < options.ratio.pseudo_query; ++i) {
        push(ViewPrefix::kPseudoQuery, pv.queries[pick(rng)]);
      }
    }
  }
  std::shuffle(samples.begin(), samples.end(), rng);
  return samples;
}

std::vector<TrainingSample> build_unsupervised_samples(const Corpus& corpus, const Vocabulary& vocab,
                                                       std::size_t per_passage,
                                                       const SampleOptions& options) {
  const auto& tok = default_tokenizer();
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<TrainingSample> samples;
  if (per_passage == 0) return samples;
  for (std::size_t pi = 0; pi < corpus.doc_count(); ++pi) {
    const Passage& p = corpus.at(pi);
    if (p.pseudo_queries.empty()) continue;
    const auto pv = view_of(p, vocab);
    std::uniform_int_distribution<std::size_t> pick(0, p.pseudo_queries.size() - 1);
    for (std::size_t j = 0; j < per_passage; ++j) {
      const std::size_t input = pick(rng);
      const auto terms = tok.split(p.pseudo_queries[input]);
      auto view = kAllViews[(pi + j) % kAllViews.size()];
      if (view == ViewPrefix::kTitle && pv.title.empty()) view = ViewPrefix::kSubstring;
      std::vector<TokenId> target;
      switch (view) {
        case ViewPrefix::kTitle:
          target = pv.title;
          break;
        case ViewPrefix::kSubstring:
          target = substring_target(tok.join(terms), pv, options, rng);
          break;
        case ViewPrefix::kPseudoQuery: {
          std::size_t other = pick(rng);
          if (other == input && pv.queries.size() > 1) other = (input + 1) % pv.queries.size();
          target = pv.queries[other];
          break;
        }
      }
      samples.push_back({view, terms, std::move(target), p.id, true});
    }
  }
  std::shuffle(samples.begin(), samples.end(), rng);
  return samples;
}

}  // namespace mvgr
