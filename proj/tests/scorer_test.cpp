// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/scorer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "mvgr/error.hpp"
#include "mvgr/ngram_scorer.hpp"
#include "test_util.hpp"

namespace mvgr {
namespace {

const char* kFigureBody =
    "Does He Love You is a song written by Sandy Knox and Billy Stritch, and recorded as a duet by "
    "American country music artists Reba McEntire and Linda Davis. It was released in August 1993 as "
    "the first single from Greatest Hits Volume Two.";

Corpus figure_corpus() {
  Corpus c;
  c.add({"p1", "Does He Love You", kFigureBody,
         {"who wrote the song does he love you?", "who sings does he love you?"}});
  c.add({"p2", "Linda Davis", "Linda Davis is an American country music singer.", {}});
  return c;
}

// Independent overlap oracle: count shared 3-grams by brute force.
double oracle_overlap(const std::string& q, const std::string& c) {
  if (q.size() < 3) return 0.0;
  std::vector<std::string> qg, cg;
  for (std::size_t i = 0; i + 3 <= q.size(); ++i) qg.push_back(q.substr(i, 3));
  for (std::size_t i = 0; i + 3 <= c.size(); ++i) cg.push_back(c.substr(i, 3));
  std::vector<bool> used(cg.size(), false);
  int shared = 0;
  for (const auto& g : qg) {
    for (std::size_t j = 0; j < cg.size(); ++j) {
      if (!used[j] && cg[j] == g) {
        used[j] = true;
        ++shared;
        break;
      }
    }
  }
  return static_cast<double>(shared) / static_cast<double>(qg.size());
}

TEST(ViewTest, NamesAndParsing) {
  EXPECT_EQ(view_name(ViewPrefix::kTitle), "title");
  EXPECT_EQ(view_name(ViewPrefix::kSubstring), "substring");
  EXPECT_EQ(view_name(ViewPrefix::kPseudoQuery), "pseudo-query");
  EXPECT_EQ(parse_views("pseudo-query,title"),
            (std::vector<ViewPrefix>{ViewPrefix::kTitle, ViewPrefix::kPseudoQuery}));
  EXPECT_THROW(parse_views("title,bogus"), Error);
}

TEST(RatioTest, Parsing) {
  EXPECT_EQ(parse_ratio("3:10:5"), (ViewRatio{3, 10, 5}));
  EXPECT_EQ(parse_ratio("1:0:0"), (ViewRatio{1, 0, 0}));
  EXPECT_THROW(parse_ratio("3:10"), Error);
  EXPECT_THROW(parse_ratio("3:x:5"), Error);
  EXPECT_THROW(parse_ratio("1:2:3:4"), Error);
}

TEST(OverlapTest, MatchesBruteForce) {
  EXPECT_DOUBLE_EQ(char_trigram_overlap("abcd", "xabc"), 0.5);
  EXPECT_DOUBLE_EQ(char_trigram_overlap("ab", "ab"), 0.0);
  EXPECT_DOUBLE_EQ(char_trigram_overlap("aaaa", "aaa"), 0.5);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    std::string q, c;
    for (int k = 0, n = static_cast<int>(rng() % 12); k < n; ++k) q.push_back("ab c"[rng() % 4]);
    for (int k = 0, n = static_cast<int>(rng() % 12); k < n; ++k) c.push_back("ab c"[rng() % 4]);
    EXPECT_DOUBLE_EQ(char_trigram_overlap(q, c), oracle_overlap(q, c)) << q << "|" << c;
  }
}

TEST(SubstringSelectionTest, FallsBackToMaximalOverlap) {
  const auto& tok = default_tokenizer();
  const auto body = tok.split(kFigureBody);
  const std::string query = "who sings does he love you";
  for (std::size_t len = 4; len <= 8; ++len) {
    double best = -1;
    std::size_t best_begin = 0;
    for (std::size_t b = 0; b + len <= body.size(); ++b) {
      const double o = oracle_overlap(query, tok.join(std::span(body).subspan(b, len)));
      if (o > best) {
        best = o;
        best_begin = b;
      }
    }
    std::mt19937_64 rng(1);
    const auto choice = select_substring(query, body, len, 2.0, rng);
    EXPECT_EQ(choice.begin, best_begin);
    EXPECT_EQ(choice.end, best_begin + len);
    EXPECT_DOUBLE_EQ(choice.overlap, best);
  }
}

TEST(SubstringSelectionTest, SampledSpansClearTheThreshold) {
  const auto& tok = default_tokenizer();
  const auto body = tok.split(kFigureBody);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto choice = select_substring("recorded as a duet by whom", body, 5, 0.2, rng);
    EXPECT_GT(choice.overlap, 0.2);
    EXPECT_EQ(choice.end - choice.begin, 5u);
  }
}

// Title equality, body containment, pseudo-query membership.
void expect_member(const TrainingSample& s, const Corpus& corpus, const Vocabulary& vocab) {
  const Passage* p = corpus.find(s.passage_id);
  ASSERT_NE(p, nullptr);
  const auto seg = extract_segments(flatten(*p, vocab).tokens);
  switch (s.prefix) {
    case ViewPrefix::kTitle:
      EXPECT_EQ(s.target, seg.title);
      break;
    case ViewPrefix::kSubstring: {
      ASSERT_FALSE(s.target.empty());
      auto it = std::search(seg.body.begin(), seg.body.end(), s.target.begin(), s.target.end());
      EXPECT_NE(it, seg.body.end());
      break;
    }
    case ViewPrefix::kPseudoQuery:
      EXPECT_NE(std::find(seg.queries.begin(), seg.queries.end(), s.target), seg.queries.end());
      break;
  }
}

TEST(TrainingSamplesTest, OnePerViewAtUnitRatio) {
  const auto corpus = figure_corpus();
  const auto vocab = build_vocabulary(corpus);
  std::vector<TrainingPair> pairs{{"who sings does he love you", "p1"}};
  SampleOptions options;
  options.ratio = {1, 1, 1};
  const auto samples = build_training_samples(pairs, corpus, vocab, options);
  ASSERT_EQ(samples.size(), 3u);
  std::set<ViewPrefix> views;
  for (const auto& s : samples) {
    views.insert(s.prefix);
    expect_member(s, corpus, vocab);
    EXPECT_EQ(s.query_terms, default_tokenizer().split("who sings does he love you"));
  }
  EXPECT_EQ(views.size(), 3u);
}

TEST(TrainingSamplesTest, DefaultRatioProportions) {
  std::mt19937_64 rng(5);
  Corpus corpus = testing::random_corpus(rng, 40, 30, 20, 3);
  for (auto& p : corpus.mutable_passages()) {
    if (p.pseudo_queries.empty()) p.pseudo_queries.push_back("w1 w2");
    if (p.title.empty()) p.title = "w0";
  }
  const auto vocab = build_vocabulary(corpus);
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back({testing::random_text(rng, 2, 6, 20), corpus.at(i % 40).id});
  SampleOptions options;  // 3:10:5
  const auto samples = build_training_samples(pairs, corpus, vocab, options);
  std::map<ViewPrefix, std::size_t> counts;
  for (const auto& s : samples) {
    ++counts[s.prefix];
    expect_member(s, corpus, vocab);
    EXPECT_GE(s.target.size(), 1u);
    if (s.prefix == ViewPrefix::kSubstring) EXPECT_LE(s.target.size(), 16u);
  }
  const double total = static_cast<double>(samples.size());
  EXPECT_NEAR(counts[ViewPrefix::kTitle], total * 3 / 18, 1.0);
  EXPECT_NEAR(counts[ViewPrefix::kSubstring], total * 10 / 18, 1.0);
  EXPECT_NEAR(counts[ViewPrefix::kPseudoQuery], total * 5 / 18, 1.0);
}

TEST(TrainingSamplesTest, RatioHoldsForArbitraryInputs) {
  std::mt19937_64 rng(17);
  Corpus corpus = testing::random_corpus(rng, 10, 20, 9, 2);
  for (auto& p : corpus.mutable_passages()) {
    if (p.pseudo_queries.empty()) p.pseudo_queries.push_back("w3");
    if (p.title.empty()) p.title = "w4";
  }
  const auto vocab = build_vocabulary(corpus);
  for (int trial = 0; trial < 20; ++trial) {
    SampleOptions options;
    options.ratio = {static_cast<unsigned>(rng() % 5), static_cast<unsigned>(rng() % 5),
                     static_cast<unsigned>(rng() % 5)};
    options.seed = rng();
    std::vector<TrainingPair> pairs;
    for (int i = 0, n = static_cast<int>(rng() % 30); i < n; ++i) {
      pairs.push_back({testing::random_text(rng, 1, 4, 9), corpus.at(rng() % 10).id});
    }
    const auto samples = build_training_samples(pairs, corpus, vocab, options);
    std::map<ViewPrefix, std::size_t> counts;
    for (const auto& s : samples) ++counts[s.prefix];
    for (auto v : kAllViews) EXPECT_EQ(counts[v], options.ratio.of(v) * pairs.size());
  }
}

TEST(TrainingSamplesTest, MissingQueriesAndUnknownPassages) {
  const auto corpus = figure_corpus();
  const auto vocab = build_vocabulary(corpus);
  std::vector<std::string> warnings;
  std::vector<TrainingPair> pairs{{"who is linda davis", "p2"}};
  const auto samples = build_training_samples(pairs, corpus, vocab, {}, &warnings);
  EXPECT_EQ(samples.size(), 13u);  // 3 title + 10 substring
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("p2"), std::string::npos);

  std::vector<TrainingPair> bad{{"q", "nope"}};
  EXPECT_THROW(build_training_samples(bad, corpus, vocab, {}), Error);
}

TEST(TrainingSamplesTest, ShuffleIsSeeded) {
  const auto corpus = figure_corpus();
  const auto vocab = build_vocabulary(corpus);
  std::vector<TrainingPair> pairs{{"who sings does he love you", "p1"}, {"linda davis", "p2"}};
  SampleOptions a;
  a.seed = 4;
  auto order = [](const std::vector<TrainingSample>& s) {
    std::vector<std::pair<int, std::vector<TokenId>>> out;
    for (const auto& x : s) out.emplace_back(static_cast<int>(x.prefix), x.target);
    return out;
  };
  EXPECT_EQ(order(build_training_samples(pairs, corpus, vocab, a)),
            order(build_training_samples(pairs, corpus, vocab, a)));
}

TEST(UnsupervisedSamplesTest, CountsAndMembership) {
  const auto corpus = figure_corpus();
  const auto vocab = build_vocabulary(corpus);
  EXPECT_TRUE(build_unsupervised_samples(corpus, vocab, 0, {}).empty());
  const auto one = build_unsupervised_samples(corpus, vocab, 1, {});
  ASSERT_EQ(one.size(), 1u);  // p2 has no pseudo-queries
  const auto& tok = default_tokenizer();
  bool from_queries = false;
  for (const auto& q : corpus.at(0).pseudo_queries) from_queries |= tok.split(q) == one[0].query_terms;
  EXPECT_TRUE(from_queries);
  EXPECT_TRUE(one[0].unsupervised);

  std::mt19937_64 rng(12);
  Corpus random = testing::random_corpus(rng, 30, 25, 12, 3);
  const auto rv = build_vocabulary(random);
  std::size_t with_queries = 0;
  for (const auto& p : random.passages()) with_queries += !p.pseudo_queries.empty();
  const auto samples = build_unsupervised_samples(random, rv, 4, {});
  EXPECT_EQ(samples.size(), 4 * with_queries);
  for (const auto& s : samples) expect_member(s, random, rv);
}

// --- n-gram scorer ---------------------------------------------------------

std::vector<double> distribution(const Scorer& s, ViewPrefix view, std::vector<std::string> terms,
                                 std::vector<TokenId> output, std::vector<TokenId> candidates) {
  std::vector<double> lp(candidates.size());
  s.next_distribution({view, terms, output}, candidates, lp);
  return lp;
}

TEST(NgramScorerTest, EmptyTrainingIsUniform) {
  const auto vocab = Vocabulary::from_words({"a", "b", "c"});
  const auto s = NgramScorer::train({}, vocab);
  const auto lp = distribution(s, ViewPrefix::kTitle, {"q"}, {}, {*vocab.find("a"), *vocab.find("b"), 5000});
  EXPECT_TRUE(std::isfinite(lp[0]));
  EXPECT_DOUBLE_EQ(lp[0], lp[1]);
  EXPECT_DOUBLE_EQ(lp[1], lp[2]);
}

TEST(NgramScorerTest, LearnsSingleContinuation) {
  const auto vocab = Vocabulary::from_words({"a", "b", "c"});
  const TokenId a = *vocab.find("a"), b = *vocab.find("b"), c = *vocab.find("c");
  std::vector<TrainingSample> samples{{ViewPrefix::kSubstring, {"query"}, {a, b}, "p", false}};
  const auto s = NgramScorer::train(samples, vocab);
  const auto lp = distribution(s, ViewPrefix::kSubstring, {"query"}, {a}, {a, b, c});
  EXPECT_GT(lp[1], lp[0]);
  EXPECT_GT(lp[1], lp[2]);
  // Smoothed counts by hand: history (a) saw b once, and so did feature
  // "query" under (a). Unseen continuations share the same value.
  const double alpha = 0.1, v = static_cast<double>(vocab.size());
  const double expected_gap = 2 * (std::log(1 + alpha) - std::log(alpha));
  EXPECT_NEAR(lp[1] - lp[0], expected_gap, 1e-12);
  EXPECT_DOUBLE_EQ(lp[0], lp[2]);
  EXPECT_NEAR(lp[0], 2 * (std::log(alpha) - std::log(1 + alpha * v)), 1e-12);
}

TEST(NgramScorerTest, TrainingIsDeterministic) {
  std::mt19937_64 rng(21);
  Corpus corpus = testing::random_corpus(rng, 20, 20, 10, 3);
  const auto vocab = build_vocabulary(corpus);
  const auto samples = build_unsupervised_samples(corpus, vocab, 3, {});
  EXPECT_EQ(NgramScorer::train(samples, vocab).serialize(), NgramScorer::train(samples, vocab).serialize());
}

// More training occurrences of a continuation strictly raise its score
// relative to an unseen continuation.
TEST(NgramScorerTest, MonotoneInContinuationCount) {
  const auto vocab = Vocabulary::from_words({"x", "y", "z", "u"});
  const TokenId x = *vocab.find("x"), y = *vocab.find("y"), u = *vocab.find("u");
  for (unsigned order : {1u, 2u, 3u}) {
    double previous_gap = -1e300;
    for (int copies = 0; copies < 6; ++copies) {
      std::vector<TrainingSample> samples;
      samples.push_back({ViewPrefix::kPseudoQuery, {"k"}, {x, u}, "p", false});
      for (int i = 0; i < copies; ++i) samples.push_back({ViewPrefix::kPseudoQuery, {"k", "m"}, {x, y}, "p", false});
      NgramOptions options;
      options.order = order;
      const auto s = NgramScorer::train(samples, vocab, options);
      const auto lp = distribution(s, ViewPrefix::kPseudoQuery, {"k", "m"}, {x}, {y, *vocab.find("z")});
      const double gap = lp[0] - lp[1];
      EXPECT_GT(gap, previous_gap) << "order " << order << " copies " << copies;
      previous_gap = gap;
    }
  }
}

TEST(NgramScorerTest, QueryFeaturesSteerChoice) {
  const auto vocab = Vocabulary::from_words({"apple", "banana", "fruit"});
  const TokenId apple = *vocab.find("apple"), banana = *vocab.find("banana");
  std::vector<TrainingSample> samples{
      {ViewPrefix::kTitle, {"red", "fruit"}, {apple}, "a", false},
      {ViewPrefix::kTitle, {"yellow", "fruit"}, {banana}, "b", false},
  };
  const auto s = NgramScorer::train(samples, vocab);
  auto red = distribution(s, ViewPrefix::kTitle, {"red"}, {}, {apple, banana});
  auto yellow = distribution(s, ViewPrefix::kTitle, {"yellow"}, {}, {apple, banana});
  EXPECT_GT(red[0], red[1]);
  EXPECT_GT(yellow[1], yellow[0]);
  // Views are separate models.
  auto other_view = distribution(s, ViewPrefix::kSubstring, {"red"}, {}, {apple, banana});
  EXPECT_DOUBLE_EQ(other_view[0], other_view[1]);
}

TEST(NgramScorerTest, SerializationGuardsVocabulary) {
  std::mt19937_64 rng(31);
  Corpus corpus = testing::random_corpus(rng, 15, 20, 10, 3);
  const auto vocab = build_vocabulary(corpus);
  const auto samples = build_unsupervised_samples(corpus, vocab, 2, {});
  NgramOptions options;
  options.order = 3;
  options.smoothing = 0.5;
  const auto s = NgramScorer::train(samples, vocab, options);
  const auto bytes = s.serialize();
  const auto loaded = NgramScorer::deserialize(bytes, vocab);
  EXPECT_EQ(loaded.serialize(), bytes);
  EXPECT_EQ(loaded.options().order, 3u);
  std::vector<TokenId> cands;
  for (TokenId t = token::kFirstWord; t < vocab.size(); ++t) cands.push_back(t);
  for (const auto& sample : samples) {
    EXPECT_EQ(distribution(s, sample.prefix, sample.query_terms, sample.target, cands),
              distribution(loaded, sample.prefix, sample.query_terms, sample.target, cands));
  }
  const auto other = Vocabulary::from_words({"something", "else"});
  try {
    NgramScorer::deserialize(bytes, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVocabularyMismatch);
  }
}

TEST(NgramScorerTest, RejectsBadOptions) {
  const auto vocab = Vocabulary::from_words({"a"});
  NgramOptions o;
  o.order = 0;
  EXPECT_THROW(NgramScorer::train({}, vocab, o), Error);
  o.order = 2;
  o.smoothing = 0.0;
  EXPECT_THROW(NgramScorer::train({}, vocab, o), Error);
}

}  // namespace
}  // namespace mvgr
