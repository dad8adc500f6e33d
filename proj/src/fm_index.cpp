// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/fm_index.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "mvgr/error.hpp"

namespace mvgr {

std::vector<std::uint32_t> suffix_array(std::span<const TokenId> text) {
  const std::size_t n = text.size();
  std::vector<std::uint32_t> sa(n);
  std::iota(sa.begin(), sa.end(), 0u);
  if (n == 0) return sa;

  std::vector<std::int64_t> rank(text.begin(), text.end());
  std::vector<std::int64_t> next(n);
  for (std::size_t k = 1;; k <<= 1) {
    auto key = [&](std::uint32_t i) {
      return std::pair{rank[i], i + k < n ? rank[i + k] : std::int64_t{-1}};
    };
    std::sort(sa.begin(), sa.end(), [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
    next[sa[0]] = 0;
    for (std::size_t i = 1; i < n; ++i) {
      next[sa[i]] = next[sa[i - 1]] + (key(sa[i - 1]) < key(sa[i]) ? 1 : 0);
    }
    rank.swap(next);
    if (rank[sa[n - 1]] == static_cast<std::int64_t>(n - 1)) break;
  }
  return sa;
}

namespace detail {

RankBitvector::RankBitvector(const std::vector<bool>& bits) : size_(bits.size()) {
  words_.assign((size_ + 63) / 64, 0);
  for (std::uint64_t i = 0; i < size_; ++i) {
    if (bits[i]) words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  index();
}

RankBitvector::RankBitvector(std::vector<std::uint64_t> words, std::uint64_t size)
    : words_(std::move(words)), size_(size) {
  if (words_.size() != (size_ + 63) / 64) {
    throw Error(ErrorCode::kFormat, "bitvector size mismatch");
  }
  index();
}

void RankBitvector::index() {
  cumulative_.assign(words_.size() + 1, 0);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    cumulative_[w + 1] = cumulative_[w] + std::popcount(words_[w]);
  }
}

std::uint64_t RankBitvector::rank1(std::uint64_t i) const {
  const auto w = i >> 6;
  const auto bit = i & 63;
  std::uint64_t r = cumulative_[w];
  if (bit) r += std::popcount(words_[w] & ((std::uint64_t{1} << bit) - 1));
  return r;
}

TokenBwt::TokenBwt(std::span<const TokenId> text, std::span<const std::uint32_t> sa,
                   std::uint32_t sigma, std::uint32_t interval)
    : sigma_(sigma), interval_(std::max<std::uint32_t>(interval, 1)) {
  const std::size_t n = text.size();
  bwt_.resize(n);
  for (std::size_t i = 0; i < n; ++i) bwt_[i] = text[sa[i] == 0 ? n - 1 : sa[i] - 1];

  c_table_.assign(sigma_ + 1, 0);
  for (TokenId t : text) ++c_table_[t + 1];
  std::partial_sum(c_table_.begin(), c_table_.end(), c_table_.begin());

  const std::size_t blocks = n / interval_ + 1;
  checkpoints_.assign(blocks * sigma_, 0);
  std::vector<std::uint32_t> running(sigma_, 0);
  for (std::size_t i = 0; i <= n; ++i) {
    if (i % interval_ == 0) {
      std::copy(running.begin(), running.end(), checkpoints_.begin() + (i / interval_) * sigma_);
    }
    if (i < n) ++running[bwt_[i]];
  }
}

std::uint32_t TokenBwt::count_in(TokenId c, std::uint64_t from, std::uint64_t to) const {
  std::uint32_t k = 0;
  for (auto i = from; i < to; ++i) k += bwt_[i] == c;
  return k;
}

std::uint64_t TokenBwt::rank(TokenId c, std::uint64_t i) const {
  const auto block = i / interval_;
  const auto base = block * interval_;
  const auto next = base + interval_;
  if (i - base > interval_ / 2 && next <= bwt_.size()) {
    return checkpoints_[(block + 1) * sigma_ + c] - count_in(c, i, next);
  }
  return checkpoints_[block * sigma_ + c] + count_in(c, base, i);
}

std::pair<std::uint64_t, std::uint64_t> TokenBwt::step(TokenId c, std::uint64_t lo,
                                                       std::uint64_t hi) const {
  if (c >= sigma_ || lo >= hi) return {0, 0};
  return {c_table_[c] + rank(c, lo), c_table_[c] + rank(c, hi)};
}

std::vector<std::pair<TokenId, std::uint64_t>> TokenBwt::distinct(std::uint64_t lo,
                                                                  std::uint64_t hi) const {
  std::vector<std::pair<TokenId, std::uint64_t>> out;
  if (lo >= hi) return out;
  if (hi - lo < sigma_) {
    std::vector<TokenId> seen(bwt_.begin() + lo, bwt_.begin() + hi);
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size();) {
      std::size_t j = i;
      while (j < seen.size() && seen[j] == seen[i]) ++j;
      out.emplace_back(seen[i], j - i);
      i = j;
    }
    return out;
  }
  const auto blo = lo / interval_;
  const auto bhi = hi / interval_;
  std::vector<std::int64_t> counts(sigma_);
  for (std::uint32_t c = 0; c < sigma_; ++c) {
    counts[c] = static_cast<std::int64_t>(checkpoints_[bhi * sigma_ + c]) -
                checkpoints_[blo * sigma_ + c];
  }
  for (auto i = blo * interval_; i < lo; ++i) --counts[bwt_[i]];
  for (auto i = bhi * interval_; i < hi; ++i) ++counts[bwt_[i]];
  for (std::uint32_t c = 0; c < sigma_; ++c) {
    if (counts[c] > 0) out.emplace_back(c, static_cast<std::uint64_t>(counts[c]));
  }
  return out;
}

void TokenBwt::write(io::BinaryWriter& w) const {
  w.u32(sigma_);
  w.u32(interval_);
  w.u32_array(bwt_);
  w.u64_array(c_table_);
  w.u32_array(checkpoints_);
}

TokenBwt TokenBwt::read(io::BinaryReader& r) {
  TokenBwt b;
  b.sigma_ = r.u32();
  b.interval_ = r.u32();
  b.bwt_ = r.u32_array();
  b.c_table_ = r.u64_array();
  b.checkpoints_ = r.u32_array();
  const auto n = b.bwt_.size();
  if (b.interval_ == 0 || b.c_table_.size() != b.sigma_ + std::size_t{1} ||
      b.checkpoints_.size() != (n / b.interval_ + 1) * b.sigma_ ||
      (b.sigma_ > 0 && b.c_table_.back() != n)) {
    throw Error(ErrorCode::kFormat, "inconsistent BWT tables");
  }
  for (TokenId t : b.bwt_) {
    if (t >= b.sigma_) throw Error(ErrorCode::kFormat, "BWT token outside alphabet");
  }
  return b;
}

}  // namespace detail

// ---------------------------------------------------------------------------

FMIndex FMIndex::build(std::span<const FlatStream> streams, Vocabulary vocab, Options options) {
  if (streams.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot index an empty corpus");
  if (options.sample_rate == 0 || options.checkpoint_interval == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate and checkpoint interval must be >= 1");
  }
  FMIndex index;
  index.options_ = options;
  const auto sigma = static_cast<std::uint32_t>(vocab.size());

  std::vector<TokenId> text;
  std::vector<TokenId> mirror;
  for (const auto& s : streams) {
    for (TokenId t : s.tokens) {
      if (t >= sigma) {
        throw Error(ErrorCode::kInvalidArgument,
                    "token id " + std::to_string(t) + " outside vocabulary in " + s.doc_id);
      }
    }
    IndexedDocument doc;
    doc.id = s.doc_id;
    doc.start = text.size();
    doc.length = static_cast<std::uint32_t>(s.tokens.size());
    try {
      doc.layout = parse_layout(s.tokens);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument, s.doc_id + ": " + e.what());
    }
    text.insert(text.end(), s.tokens.begin(), s.tokens.end());
    mirror.insert(mirror.end(), s.tokens.rbegin() + 1, s.tokens.rend());
    mirror.push_back(token::kSentinel);
    index.docs_.push_back(std::move(doc));
  }
  index.rebuild_lookup();
  if (index.id_lookup_.size() > 1) {
    for (std::size_t i = 1; i < index.id_lookup_.size(); ++i) {
      if (index.id_lookup_[i - 1].first == index.id_lookup_[i].first) {
        throw Error(ErrorCode::kDuplicateId, "duplicate document id " + index.id_lookup_[i].first);
      }
    }
  }

  const auto n = text.size();
  {
    const auto sa = suffix_array(text);
    index.text_ = detail::TokenBwt(text, sa, sigma, options.checkpoint_interval);
    // Stream starts are always sampled, so locate never walks LF through a
    // sentinel row.
    std::vector<bool> sampled(n, false);
    for (std::size_t row = 0; row < n; ++row) {
      const auto pos = sa[row];
      if (pos % options.sample_rate == 0 || pos == 0 || text[pos - 1] == token::kSentinel) {
        sampled[row] = true;
        index.samples_.push_back(pos);
      }
    }
    index.sampled_rows_ = detail::RankBitvector(sampled);
  }
  {
    const auto sa = suffix_array(mirror);
    index.mirror_ = detail::TokenBwt(mirror, sa, sigma, options.checkpoint_interval);
    std::vector<bool> body(n, false);
    for (std::size_t row = 0; row < n; ++row) {
      const auto pos = sa[row];
      const auto [d, mirror_offset] = index.resolve(pos);
      const auto& doc = index.docs_[d];
      if (mirror_offset + 1 >= doc.length) continue;  // sentinel
      const auto offset = doc.length - 2 - mirror_offset;
      body[row] = offset >= doc.layout.body_begin && offset < doc.layout.body_end;
    }
    index.body_rows_ = detail::RankBitvector(body);
  }
  index.vocab_ = std::move(vocab);
  return index;
}

void FMIndex::rebuild_lookup() {
  doc_starts_.clear();
  id_lookup_.clear();
  for (std::uint32_t i = 0; i < docs_.size(); ++i) {
    doc_starts_.push_back(docs_[i].start);
    id_lookup_.emplace_back(docs_[i].id, i);
  }
  std::sort(id_lookup_.begin(), id_lookup_.end());
}

std::optional<std::uint32_t> FMIndex::doc_index(std::string_view id) const {
  auto it = std::lower_bound(id_lookup_.begin(), id_lookup_.end(), id,
                             [](const auto& e, std::string_view key) { return e.first < key; });
  if (it == id_lookup_.end() || it->first != id) return std::nullopt;
  return it->second;
}

std::pair<std::uint32_t, std::uint32_t> FMIndex::resolve(std::uint64_t text_pos) const {
  auto it = std::upper_bound(doc_starts_.begin(), doc_starts_.end(), text_pos);
  const auto d = static_cast<std::uint32_t>(std::distance(doc_starts_.begin(), it) - 1);
  return {d, static_cast<std::uint32_t>(text_pos - doc_starts_[d])};
}

MatchRange FMIndex::range(std::span<const TokenId> pattern) const {
  MatchRange r = full_range();
  for (auto it = pattern.rbegin(); it != pattern.rend() && !r.empty(); ++it) {
    r = extend_backward(r, *it);
  }
  if (r.empty()) return {};
  return r;
}

MatchRange FMIndex::extend_backward(const MatchRange& range, TokenId token) const {
  if (range.empty() || token == token::kSentinel) return {};
  auto [lo, hi] = text_.step(token, range.lo, range.hi);
  if (lo >= hi) return {};
  return {lo, hi, range.pattern_len + 1};
}

std::uint64_t FMIndex::count(std::span<const TokenId> pattern) const {
  if (pattern.empty()) return 0;
  return range(pattern).size();
}

std::vector<Occurrence> FMIndex::locate(const MatchRange& range, std::size_t limit) const {
  std::vector<Occurrence> out;
  if (range.empty() || range.pattern_len == 0) return out;
  const auto end = range.lo + std::min<std::uint64_t>(range.size(), limit);
  out.reserve(end - range.lo);
  for (auto row = range.lo; row < end; ++row) {
    std::uint64_t r = row;
    std::uint64_t steps = 0;
    while (!sampled_rows_.get(r)) {
      r = text_.lf(r);
      ++steps;
    }
    const auto pos = samples_[sampled_rows_.rank1(r)] + steps;
    const auto [d, offset] = resolve(pos);
    out.push_back({d, offset});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Occurrence> FMIndex::locate(std::span<const TokenId> pattern, std::size_t limit) const {
  if (pattern.empty()) return {};
  return locate(range(pattern), limit);
}

MirrorRange FMIndex::mirror_range(std::span<const TokenId> pattern) const {
  MirrorRange r = mirror_full_range();
  for (TokenId t : pattern) {
    r = extend_forward(r, t);
    if (r.empty()) return {};
  }
  return r;
}

MirrorRange FMIndex::extend_forward(const MirrorRange& range, TokenId token) const {
  if (range.empty() || token == token::kSentinel) return {};
  auto [lo, hi] = mirror_.step(token, range.lo, range.hi);
  if (lo >= hi) return {};
  return {lo, hi, range.pattern_len + 1};
}

std::vector<Successor> FMIndex::successors(const MirrorRange& range) const {
  std::vector<Successor> out;
  for (auto [t, k] : mirror_.distinct(range.lo, range.hi)) {
    if (t != token::kSentinel) out.push_back({t, k});
  }
  return out;
}

std::vector<Successor> FMIndex::successors(std::span<const TokenId> pattern) const {
  return successors(mirror_range(pattern));
}

std::uint64_t FMIndex::body_count(const MirrorRange& range) const {
  if (range.empty()) return 0;
  return body_rows_.rank1(range.hi) - body_rows_.rank1(range.lo);
}

Region FMIndex::region_at(std::uint32_t doc, std::uint32_t offset) const {
  const auto& l = docs_.at(doc).layout;
  if (offset >= l.title_begin && offset < l.title_end) return Region::kTitle;
  if (offset >= l.body_begin && offset < l.body_end) return Region::kBody;
  for (auto [b, e] : l.queries) {
    if (offset >= b && offset < e) return Region::kQuery;
  }
  return Region::kDelimiter;
}

// ---------------------------------------------------------------------------
// Binary format: "MNDR", u32 version, options, vocabulary, documents, text
// BWT, locate samples, mirror BWT, body rows, CRC-32 trailer.

namespace {
constexpr std::string_view kMagic = "MNDR";
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> FMIndex::serialize() const {
  io::BinaryWriter w;
  w.raw(kMagic);
  w.u32(kVersion);
  w.u32(options_.checkpoint_interval);
  w.u32(options_.sample_rate);

  const auto tokens = vocab_.tokens();
  w.u64(tokens.size());
  for (const auto& t : tokens) w.str(t);

  w.u64(docs_.size());
  for (const auto& d : docs_) {
    w.str(d.id);
    w.u64(d.start);
    w.u32(d.length);
    w.u32(d.layout.title_begin);
    w.u32(d.layout.title_end);
    w.u32(d.layout.body_begin);
    w.u32(d.layout.body_end);
    w.u32(static_cast<std::uint32_t>(d.layout.queries.size()));
    for (auto [b, e] : d.layout.queries) {
      w.u32(b);
      w.u32(e);
    }
  }

  text_.write(w);
  w.u64(sampled_rows_.size());
  w.u64_array(sampled_rows_.words());
  w.u32_array(samples_);
  mirror_.write(w);
  w.u64(body_rows_.size());
  w.u64_array(body_rows_.words());
  w.seal();
  return w.bytes();
}

FMIndex FMIndex::deserialize(std::span<const std::uint8_t> bytes) {
  io::BinaryReader r(io::verify_sealed(bytes, "index"));
  if (r.raw(4) != kMagic) throw Error(ErrorCode::kFormat, "not an index file (bad magic)");
  if (const auto v = r.u32(); v != kVersion) {
    throw Error(ErrorCode::kFormat, "unsupported index version " + std::to_string(v));
  }
  FMIndex index;
  index.options_.checkpoint_interval = r.u32();
  index.options_.sample_rate = r.u32();

  const auto vocab_size = r.u64();
  std::vector<std::string> tokens;
  for (std::uint64_t i = 0; i < vocab_size; ++i) tokens.push_back(r.str());
  {
    Vocabulary base;
    if (tokens.size() < base.size() ||
        !std::equal(base.tokens().begin(), base.tokens().end(), tokens.begin())) {
      throw Error(ErrorCode::kFormat, "index vocabulary lacks the reserved block");
    }
    index.vocab_ = Vocabulary::from_words({tokens.begin() + base.size(), tokens.end()});
    if (!std::equal(tokens.begin(), tokens.end(), index.vocab_.tokens().begin(),
                    index.vocab_.tokens().end())) {
      throw Error(ErrorCode::kFormat, "index vocabulary is not in canonical order");
    }
  }

  const auto doc_count = r.u64();
  std::uint64_t expected_start = 0;
  for (std::uint64_t i = 0; i < doc_count; ++i) {
    IndexedDocument d;
    d.id = r.str();
    d.start = r.u64();
    d.length = r.u32();
    d.layout.title_begin = r.u32();
    d.layout.title_end = r.u32();
    d.layout.body_begin = r.u32();
    d.layout.body_end = r.u32();
    const auto nq = r.u32();
    for (std::uint32_t q = 0; q < nq; ++q) {
      const auto b = r.u32();
      const auto e = r.u32();
      d.layout.queries.emplace_back(b, e);
    }
    if (d.start != expected_start) throw Error(ErrorCode::kFormat, "document table is not contiguous");
    expected_start += d.length;
    index.docs_.push_back(std::move(d));
  }
  index.rebuild_lookup();

  index.text_ = detail::TokenBwt::read(r);
  {
    const auto size = r.u64();
    index.sampled_rows_ = detail::RankBitvector(r.u64_array(), size);
  }
  index.samples_ = r.u32_array();
  index.mirror_ = detail::TokenBwt::read(r);
  {
    const auto size = r.u64();
    index.body_rows_ = detail::RankBitvector(r.u64_array(), size);
  }
  if (!r.at_end()) throw Error(ErrorCode::kFormat, "trailing bytes in index file");

  const auto n = index.text_.size();
  if (n != expected_start || index.mirror_.size() != n || index.sampled_rows_.size() != n ||
      index.body_rows_.size() != n || index.samples_.size() != index.sampled_rows_.rank1(n) ||
      index.text_.sigma() != index.vocab_.size() || index.mirror_.sigma() != index.vocab_.size()) {
    throw Error(ErrorCode::kFormat, "index sections disagree in size");
  }
  return index;
}

void FMIndex::save(const std::string& path) const { io::write_file(path, serialize()); }

FMIndex FMIndex::load(const std::string& path) { return deserialize(io::read_file(path)); }

}  // namespace mvgr
