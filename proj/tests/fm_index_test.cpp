// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/fm_index.hpp"

#include <gtest/gtest.h>

#include <random>

#include "mvgr/error.hpp"
#include "test_util.hpp"

namespace mvgr {
namespace {

struct Fixture {
  Corpus corpus;
  Vocabulary vocab;
  std::vector<FlatStream> streams;
  FMIndex index;

  explicit Fixture(Corpus c, FMIndex::Options options = {}) : corpus(std::move(c)) {
    vocab = build_vocabulary(corpus);
    streams = flatten_corpus(corpus, vocab);
    index = FMIndex::build(streams, vocab, options);
  }

  std::vector<TokenId> ids(std::string_view text) const {
    return vocab.encode(default_tokenizer().split(text));
  }
};

Corpus single(std::string body, std::string title = "") {
  Corpus c;
  c.add({"p", std::move(title), std::move(body), {}});
  return c;
}

TEST(SuffixArrayTest, MatchesNaiveSort) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenId> text(1 + rng() % 60);
    for (auto& t : text) t = static_cast<TokenId>(rng() % 4);
    std::vector<std::uint32_t> expected(text.size());
    std::iota(expected.begin(), expected.end(), 0u);
    std::sort(expected.begin(), expected.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(text.begin() + a, text.end(), text.begin() + b, text.end());
    });
    EXPECT_EQ(suffix_array(text), expected);
  }
}

TEST(FMIndexTest, LengthConservation) {
  Fixture f(single("a b c d e"));
  EXPECT_EQ(f.streams[0].tokens.size(), 10u);
  EXPECT_EQ(f.index.size(), 10u);
}

TEST(FMIndexTest, AbracadabraCount) {
  Fixture f(single("a b r a c a d a b r a"));
  EXPECT_EQ(f.index.count(f.ids("a b")), 2u);
  EXPECT_EQ(f.index.count(f.ids("a")), 5u);
  EXPECT_EQ(f.index.count(f.ids("a b r a")), 2u);
  EXPECT_EQ(f.index.count(f.ids("c a d")), 1u);
  EXPECT_EQ(f.index.count(f.ids("d d")), 0u);
}

TEST(FMIndexTest, UnknownAndSentinelTokensCountZero) {
  Fixture f(single("a b"));
  EXPECT_EQ(f.index.count(std::vector<TokenId>{static_cast<TokenId>(f.vocab.size() + 5)}), 0u);
  EXPECT_EQ(f.index.count(std::vector<TokenId>{token::kBodyEnd, token::kSentinel}), 0u);
  EXPECT_EQ(f.index.count(std::vector<TokenId>{}), 0u);
}

TEST(FMIndexTest, ExtendBackward) {
  Fixture f(single("a b r a c a d a b r a"));
  const auto a = *f.vocab.find("a");
  EXPECT_TRUE(f.index.extend_backward(MatchRange{}, a).empty());
  EXPECT_EQ(f.index.extend_backward(f.index.full_range(), a).size(), f.index.count(f.ids("a")));
  const auto bra = f.index.range(f.ids("b r a"));
  EXPECT_EQ(f.index.extend_backward(bra, a).size(), f.index.count(f.ids("a b r a")));
  EXPECT_EQ(f.index.extend_backward(bra, a).pattern_len, 4u);
}

TEST(FMIndexTest, SuccessorsOfFigurePassage) {
  Corpus c;
  c.add({"p1", "Does He Love You",
         "Does He Love You is a song written by Sandy Knox and Billy Stritch, and recorded as a duet "
         "by American country music artists Reba McEntire and Linda Davis.",
         {"who wrote the song does he love you?", "who sings does he love you?"}});
  Fixture f(std::move(c));
  const auto pattern = f.ids("does he");
  const auto succ = f.index.successors(pattern);
  const auto love = *f.vocab.find("love");
  auto it = std::find_if(succ.begin(), succ.end(), [&](const Successor& s) { return s.token == love; });
  ASSERT_NE(it, succ.end());
  EXPECT_EQ(it->count, testing::naive_count(f.streams, f.ids("does he love")));
  EXPECT_EQ(it->count, 4u);
  EXPECT_TRUE(f.index.successors(f.ids("love me")).empty());
}

TEST(FMIndexTest, SelfLocation) {
  Corpus c;
  c.add({"x", "first", "alpha beta", {}});
  c.add({"y", "second", "gamma delta", {"q"}});
  c.add({"z", "", "epsilon", {}});
  Fixture f(std::move(c));
  for (std::uint32_t d = 0; d < 3; ++d) {
    std::vector<TokenId> body(f.streams[d].tokens.begin(), f.streams[d].tokens.end() - 1);
    const auto occ = f.index.locate(body, 10);
    ASSERT_EQ(occ.size(), 1u);
    EXPECT_EQ(occ[0], (Occurrence{d, 0}));
    EXPECT_EQ(f.index.doc(occ[0].doc).id, f.corpus.at(d).id);
  }
}

TEST(FMIndexTest, LocateSingleOccurrenceAndLimit) {
  Corpus c;
  c.add({"p1", "t", "x x x x x", {}});
  c.add({"p2", "u", "one two needle three", {}});
  Fixture f(std::move(c));
  // p2 stream: <TS> u <TE> <BS> one two needle ... -> needle at offset 6.
  const auto occ = f.index.locate(f.ids("needle"), 5);
  ASSERT_EQ(occ.size(), 1u);
  EXPECT_EQ(f.index.doc(occ[0].doc).id, "p2");
  EXPECT_EQ(occ[0].offset, 6u);
  EXPECT_EQ(testing::naive_locate(f.streams, f.ids("needle")), occ);
  EXPECT_TRUE(f.index.locate(f.ids("absent"), 5).empty());
  EXPECT_EQ(f.index.locate(f.ids("x"), 1).size(), 1u);
  EXPECT_EQ(f.index.locate(f.ids("x"), 100).size(), 5u);
}

TEST(FMIndexTest, RegionsAndBodyCount) {
  Corpus c;
  c.add({"p", "shared word", "body has shared word too", {"shared query"}});
  Fixture f(std::move(c));
  const auto shared = f.index.mirror_range(f.ids("shared"));
  EXPECT_EQ(shared.size(), 3u);
  EXPECT_EQ(f.index.body_count(shared), 1u);
  EXPECT_EQ(f.index.body_count(f.index.mirror_range(f.ids("shared query"))), 0u);
  EXPECT_EQ(f.index.region_at(0, 1), Region::kTitle);
  EXPECT_EQ(f.index.region_at(0, 0), Region::kDelimiter);
  EXPECT_EQ(f.index.region_at(0, 6), Region::kBody);
}

TEST(FMIndexTest, BuildRejectsOutOfVocabularyTokens) {
  Corpus c = single("a b");
  auto vocab = build_vocabulary(c);
  auto streams = flatten_corpus(c, vocab);
  streams[0].tokens[5] = static_cast<TokenId>(vocab.size());
  try {
    FMIndex::build(streams, vocab);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_THROW(FMIndex::build(std::vector<FlatStream>{}, vocab), Error);
}

// count/successors/locate against naive scans, the extension invariants and
// the successor-sum property.
TEST(FMIndexTest, RandomizedOracleEquivalence) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    FMIndex::Options options;
    options.checkpoint_interval = 1 + static_cast<std::uint32_t>(rng() % 40);
    options.sample_rate = 1 + static_cast<std::uint32_t>(rng() % 12);
    Fixture f(testing::random_corpus(rng, 1 + rng() % 30, 25, 3 + rng() % 10), options);
    for (int k = 0; k < 150; ++k) {
      const auto p = testing::random_pattern(rng, f.streams, f.vocab.size(), 6);
      const auto n = testing::naive_count(f.streams, p);
      ASSERT_EQ(f.index.count(p), n);
      ASSERT_EQ(f.index.mirror_range(p).size(), n);
      ASSERT_EQ(f.index.successors(p), testing::naive_successors(f.streams, p));
      ASSERT_EQ(f.index.locate(p, n + 1), testing::naive_locate(f.streams, p));

      std::uint64_t sum = 0;
      for (const auto& s : f.index.successors(p)) sum += s.count;
      EXPECT_LE(sum, n);

      const TokenId t = static_cast<TokenId>(token::kFirstWord + rng() % (f.vocab.size() - token::kFirstWord));
      std::vector<TokenId> prepended{t};
      prepended.insert(prepended.end(), p.begin(), p.end());
      std::vector<TokenId> appended = p;
      appended.push_back(t);
      EXPECT_EQ(f.index.extend_backward(f.index.range(p), t).size(), testing::naive_count(f.streams, prepended));
      EXPECT_EQ(f.index.extend_forward(f.index.mirror_range(p), t).size(),
                testing::naive_count(f.streams, appended));
    }
  }
}

TEST(FMIndexTest, SerializationRoundTrip) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    Fixture f(testing::random_corpus(rng, 20, 30, 6));
    const auto bytes = f.index.serialize();
    ASSERT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MNDR");
    const FMIndex loaded = FMIndex::deserialize(bytes);
    EXPECT_EQ(loaded.serialize(), bytes);
    EXPECT_EQ(loaded.vocab().fingerprint(), f.vocab.fingerprint());
    for (int k = 0; k < 100; ++k) {
      const auto p = testing::random_pattern(rng, f.streams, f.vocab.size(), 5);
      ASSERT_EQ(loaded.count(p), f.index.count(p));
      ASSERT_EQ(loaded.successors(p), f.index.successors(p));
      ASSERT_EQ(loaded.locate(p, 1000), f.index.locate(p, 1000));
      ASSERT_EQ(loaded.body_count(loaded.mirror_range(p)), f.index.body_count(f.index.mirror_range(p)));
    }
  }
}

TEST(FMIndexTest, CorruptFilesRejected) {
  Fixture f(single("a b c"));
  auto bytes = f.index.serialize();
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  try {
    FMIndex::deserialize(flipped);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kChecksum);
  }
  auto truncated = std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 3);
  EXPECT_THROW(FMIndex::deserialize(truncated), Error);
  // Valid checksum, wrong magic.
  io::BinaryWriter w;
  w.raw("NOPE");
  w.seal();
  try {
    FMIndex::deserialize(w.bytes());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

}  // namespace
}  // namespace mvgr
