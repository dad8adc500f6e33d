// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/synthetic.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mvgr/error.hpp"

namespace mvgr {

namespace {

struct Aspect {
  const char* body_word;   // appears in the body
  const char* query_word;  // appears only in pseudo-queries and topic queries
};

constexpr std::array<Aspect, 8> kAspects{{
    {"founding", "origin"},
    {"harvest", "farming"},
    {"river", "water"},
    {"festival", "celebration"},
    {"market", "commerce"},
    {"school", "education"},
    {"temple", "religion"},
    {"siege", "war"},
}};

constexpr std::array<const char*, 6> kFillers{
    "many visitors describe the region as quiet and green",
    "records from the period are incomplete",
    "the local council keeps a small archive",
    "travelers often arrive by the northern road",
    "the climate is mild for most of the year",
    "several families have lived there for generations",
};

// Pronounceable nonsense words, distinct from each other and from every
// template word.
class WordMaker {
 public:
  explicit WordMaker(std::uint64_t seed) : rng_(seed) {}

  std::string next() {
    static constexpr std::array<const char*, 14> kOnsets{"b", "d", "f", "g", "k", "l", "m",
                                                         "n", "p", "r", "s", "t", "v", "z"};
    static constexpr std::array<const char*, 5> kVowels{"a", "e", "i", "o", "u"};
    for (;;) {
      std::string w;
      const std::size_t syllables = 2 + rng_() % 2;
      for (std::size_t i = 0; i < syllables; ++i) {
        w += kOnsets[rng_() % kOnsets.size()];
        w += kVowels[rng_() % kVowels.size()];
      }
      if (rng_() % 2) w += "n";
      if (used_.insert(w).second) return w;
    }
  }

 private:
  std::mt19937_64 rng_;
  std::set<std::string> used_;
};

struct Seed {
  std::string entity;
  const Aspect* aspect;
  std::array<std::string, 3> fact;
  std::array<std::string, 2> expansion;
};

std::string fill(std::string_view pattern, const Seed& s) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '{') {
      out.push_back(pattern[i]);
      continue;
    }
    const auto close = pattern.find('}', i);
    const auto key = pattern.substr(i + 1, close - i - 1);
    if (key == "e") out += s.entity;
    else if (key == "b") out += s.aspect->body_word;
    else if (key == "q") out += s.aspect->query_word;
    else if (key == "f") out += s.fact[0] + " " + s.fact[1] + " " + s.fact[2];
    else if (key == "f01") out += s.fact[0] + " " + s.fact[1];
    else if (key == "f12") out += s.fact[1] + " " + s.fact[2];
    else if (key == "x") out += s.expansion[0] + " " + s.expansion[1];
    else if (key == "x0") out += s.expansion[0];
    i = close;
  }
  return out;
}

enum Kind { kFact, kExpand, kTopic };

constexpr std::array<const char*, 3> kTrainTemplates[3] = {
    {"which place involves {f}", "what has {f01}", "where is {f12} found"},
    {"tell me about {x}", "what is {x0}", "{x} meaning"},
    {"{e} {q}", "the {q} of {e}", "what {q} does {e} have"},
};

constexpr std::array<const char*, 2> kHeldoutTemplates[3] = {
    {"who knows about {f}", "looking for {f01} details"},
    {"explain {x} please", "details on {x}"},
    {"{q} in {e}", "how is {q} handled by {e}"},
};

}  // namespace

SyntheticBenchmark make_synthetic(const SyntheticOptions& options) {
  if (options.entities == 0 || options.aspects == 0 || options.aspects > kAspects.size()) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic benchmark needs 1..8 aspects and at least one entity");
  }
  WordMaker words(options.seed);
  std::mt19937_64 rng(options.seed * 0x9e3779b97f4a7c15ULL + 1);

  std::vector<Seed> seeds;
  for (std::size_t e = 0; e < options.entities; ++e) {
    const std::string entity = words.next() + " " + words.next();
    for (std::size_t a = 0; a < options.aspects; ++a) {
      Seed s{entity, &kAspects[a], {words.next(), words.next(), words.next()}, {words.next(), words.next()}};
      seeds.push_back(std::move(s));
    }
  }
  const std::size_t n = seeds.size();

  // Roles: each mirror cluster repeats one body under different titles;
  // bare passages have no pseudo-queries.
  std::vector<std::size_t> shuffled(n);
  for (std::size_t i = 0; i < n; ++i) shuffled[i] = i;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const std::size_t group = std::max<std::size_t>(2, options.mirror_group);
  const std::size_t clusters = static_cast<std::size_t>(static_cast<double>(n) * options.mirror_fraction) / group;
  const std::size_t mirrored = std::min(n, clusters * group);
  const std::size_t bare = static_cast<std::size_t>(static_cast<double>(n) * options.bare_fraction);
  std::vector<std::size_t> body_of(n);
  std::vector<bool> paired(n, false), has_queries(n, true);
  for (std::size_t i = 0; i < n; ++i) body_of[i] = i;
  for (std::size_t k = 0; k < mirrored; ++k) {
    body_of[shuffled[k]] = shuffled[k - k % group];
    paired[shuffled[k]] = true;
  }
  for (std::size_t k = mirrored; k < mirrored + bare && k < n; ++k) has_queries[shuffled[k]] = false;

  SyntheticBenchmark bench;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = seeds[i];
    const auto& source = seeds[body_of[i]];
    Passage p;
    p.id = "syn" + std::to_string(i);
    p.title = s.entity;
    std::ostringstream body;
    body << fill("{e} is known for its {b}. ", source) << fill("the {b} of {e} involves {f}. ", source)
         << kFillers[body_of[i] % kFillers.size()] << '.';
    p.body = body.str();
    if (has_queries[i]) {
      p.pseudo_queries = {fill("what {q} does {e} have", s), fill("where can i find {x}", s),
                          fill("what is the {q} of {e}", s)};
    }
    bench.corpus.add(std::move(p));
  }

  // Query kinds that can single out passage i at all.
  auto kinds_for = [&](std::size_t i) {
    std::vector<int> kinds;
    if (!paired[i]) kinds.push_back(kFact);
    if (has_queries[i]) kinds.push_back(kExpand);
    kinds.push_back(kTopic);
    return kinds;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (int kind : kinds_for(i)) {
      const auto& templates = kTrainTemplates[kind];
      bench.train.push_back({fill(templates[rng() % templates.size()], seeds[i]), bench.corpus.at(i).id});
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t q = 0; q < options.heldout_queries; ++q) {
    const std::size_t i = order[q % n];
    const auto kinds = kinds_for(i);
    const int kind = kinds[rng() % kinds.size()];
    const auto& templates = kHeldoutTemplates[kind];
    const std::string qid = "hq" + std::to_string(q);
    bench.queries.push_back({qid, fill(templates[rng() % templates.size()], seeds[i])});
    bench.qrels[qid] = {bench.corpus.at(i).id};
  }
  return bench;
}

void write_synthetic(const SyntheticBenchmark& bench, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  save_corpus_jsonl(bench.corpus, (fs::path(dir) / "corpus.jsonl").string());
  auto train = open("train.tsv");
  for (const auto& p : bench.train) train << p.query << '\t' << p.passage_id << '\n';
  auto queries = open("queries.tsv");
  for (const auto& q : bench.queries) queries << q.id << '\t' << q.text << '\n';
  auto qrels = open("qrels.tsv");
  for (const auto& [qid, ids] : bench.qrels) {
    for (const auto& id : ids) qrels << qid << '\t' << id << '\n';
  }
}

}  // namespace mvgr
