// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mvgr/error.hpp"

namespace mvgr {

Corpus::Corpus(std::vector<Passage> passages) {
  passages_.reserve(passages.size());
  for (auto& p : passages) add(std::move(p));
}

void Corpus::add(Passage passage) {
  auto [it, inserted] = by_id_.emplace(passage.id, passages_.size());
  if (!inserted) {
    throw Error(ErrorCode::kDuplicateId, "duplicate passage id \"" + passage.id + "\"");
  }
  passages_.push_back(std::move(passage));
}

const Passage* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &passages_[it->second];
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl" || name == "json") return CorpusFormat::kJsonl;
  if (name == "tsv") return CorpusFormat::kTsv;
  throw Error(ErrorCode::kInvalidArgument, "unknown corpus format \"" + std::string(name) + "\"");
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

Passage parse_json_record(const std::string& text, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(line, std::string("invalid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) parse_error(line, "record is not a JSON object");
  auto get_string = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) parse_error(line, std::string("missing field \"") + key + "\"");
      return {};
    }
    if (!it->is_string()) parse_error(line, std::string("field \"") + key + "\" is not a string");
    return it->get<std::string>();
  };
  Passage p;
  p.id = get_string("id", true);
  p.title = normalize_whitespace(get_string("title", false));
  p.body = normalize_whitespace(get_string("text", true));
  if (auto it = j.find("pseudo_queries"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) parse_error(line, "field \"pseudo_queries\" is not an array");
    for (const auto& q : *it) {
      if (!q.is_string()) parse_error(line, "pseudo_queries entry is not a string");
      auto norm = normalize_whitespace(q.get<std::string>());
      if (!norm.empty()) p.pseudo_queries.push_back(std::move(norm));
    }
  }
  return p;
}

Passage parse_tsv_record(const std::string& text, std::size_t line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = text.find('\t', start);
    fields.push_back(text.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 3) {
    parse_error(line, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
  }
  return Passage{fields[0], normalize_whitespace(fields[1]), normalize_whitespace(fields[2]), {}};
}

}  // namespace

Corpus parse_corpus(std::string_view contents, CorpusFormat format) {
  Corpus corpus;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    std::string line(contents.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    pos = nl == std::string_view::npos ? contents.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (normalize_whitespace(line).empty()) continue;
    Passage p = format == CorpusFormat::kJsonl ? parse_json_record(line, line_no)
                                               : parse_tsv_record(line, line_no);
    if (p.id.empty()) parse_error(line_no, "empty passage id");
    if (p.body.empty()) parse_error(line_no, "empty passage text");
    try {
      corpus.add(std::move(p));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

Corpus load_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus file " + path);
  std::string contents{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_corpus(contents, format);
}

void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  for (const auto& p : corpus.passages()) {
    nlohmann::json j = {{"id", p.id}, {"title", p.title}, {"text", p.body},
                        {"pseudo_queries", p.pseudo_queries}};
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Pseudo-queries

namespace {

constexpr std::string_view kTitleTemplates[] = {
    "what is {} about", "tell me about {}", "what does {} refer to",
    "where does {} come from", "who is connected to {}",
};

constexpr std::string_view kSpanTemplates[] = {
    "{} refers to what", "what is meant by {}", "which text mentions {}",
    "who or what is {}", "when did {} happen",
};

std::string fill(std::string_view tmpl, std::string_view value) {
  std::string out(tmpl);
  out.replace(out.find("{}"), 2, value);
  return out;
}

}  // namespace

std::vector<std::string> TemplateQueryGenerator::generate(const Passage& passage, std::size_t k,
                                                          std::uint64_t seed) const {
  const auto& tok = default_tokenizer();
  const auto title_pieces = tok.split(passage.title);
  const std::string title = tok.join(title_pieces);
  const auto body = tok.split(passage.body);

  const bool use_title = !title.empty();
  const bool use_spans = body.size() >= options_.min_span;
  std::vector<std::string> out;
  if (k == 0 || (!use_title && !use_spans)) return out;

  std::mt19937_64 rng(seed ^ fnv1a64(passage.id));
  std::set<std::string> seen;
  auto push = [&](std::string q) {
    if (seen.insert(q).second) out.push_back(std::move(q));
  };

  std::size_t title_i = 0;
  std::size_t span_i = 0;
  constexpr std::size_t kTitleCount = std::size(kTitleTemplates);
  constexpr std::size_t kSpanCount = std::size(kSpanTemplates);
  // Span sampling may collide; bound the attempts so tiny bodies terminate.
  std::size_t attempts = 0;
  const std::size_t max_attempts = 16 * k + 16;
  while (out.size() < k && attempts++ < max_attempts) {
    const bool title_turn =
        use_title && title_i < kTitleCount && (!use_spans || out.size() % 2 == 0);
    if (title_turn) {
      push(fill(kTitleTemplates[title_i++], title));
      continue;
    }
    if (!use_spans) break;
    const std::size_t hi = std::min(options_.max_span, body.size());
    std::uniform_int_distribution<std::size_t> len_dist(options_.min_span, hi);
    const std::size_t len = len_dist(rng);
    std::uniform_int_distribution<std::size_t> start_dist(0, body.size() - len);
    const std::size_t start = start_dist(rng);
    std::span<const std::string> span(body.data() + start, len);
    push(fill(kSpanTemplates[span_i++ % kSpanCount], tok.join(span)));
  }
  return out;
}

std::vector<std::string> template_pseudo_queries(const Passage& passage, std::size_t k,
                                                 std::uint64_t seed) {
  return TemplateQueryGenerator().generate(passage, k, seed);
}

Corpus attach_pseudo_queries(Corpus corpus, const QueryGenerator& generator, std::size_t k,
                             std::uint64_t seed, std::vector<std::string>* warnings) {
  if (k == 0) return corpus;
  for (auto& p : corpus.mutable_passages()) {
    if (!p.pseudo_queries.empty()) continue;
    try {
      auto queries = generator.generate(p, k, seed);
      if (queries.size() > k) queries.resize(k);
      for (auto& q : queries) {
        q = normalize_whitespace(q);
        if (!q.empty()) p.pseudo_queries.push_back(std::move(q));
      }
    } catch (const std::exception& e) {
      p.pseudo_queries.clear();
      if (warnings) warnings->push_back("pseudo-query generation failed for " + p.id + ": " + e.what());
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Flattening

Vocabulary build_vocabulary(const Corpus& corpus, const Tokenizer& tokenizer) {
  std::vector<std::string> words;
  auto add = [&](std::string_view text) {
    for (auto& w : tokenizer.split(text)) words.push_back(std::move(w));
  };
  for (const auto& p : corpus.passages()) {
    add(p.title);
    add(p.body);
    for (const auto& q : p.pseudo_queries) add(q);
  }
  return Vocabulary::from_words(std::move(words));
}

FlatStream flatten(const Passage& passage, const Vocabulary& vocab, const Tokenizer& tokenizer) {
  FlatStream stream{passage.id, {}};
  auto& t = stream.tokens;
  auto append = [&](TokenId open, std::string_view text, TokenId close) {
    t.push_back(open);
    const auto ids = vocab.encode(tokenizer.split(text));
    t.insert(t.end(), ids.begin(), ids.end());
    t.push_back(close);
  };
  append(token::kTitleStart, passage.title, token::kTitleEnd);
  append(token::kBodyStart, passage.body, token::kBodyEnd);
  for (const auto& q : passage.pseudo_queries) append(token::kQueryStart, q, token::kQueryEnd);
  t.push_back(token::kSentinel);
  return stream;
}

std::vector<FlatStream> flatten_corpus(const Corpus& corpus, const Vocabulary& vocab,
                                       const Tokenizer& tokenizer) {
  std::vector<FlatStream> out;
  out.reserve(corpus.doc_count());
  for (const auto& p : corpus.passages()) out.push_back(flatten(p, vocab, tokenizer));
  return out;
}

StreamLayout parse_layout(std::span<const TokenId> tokens) {
  std::size_t i = 0;
  auto bad = [](const char* what) { throw Error(ErrorCode::kFormat, std::string("malformed stream: ") + what); };
  auto region = [&](TokenId open, TokenId close) {
    if (i >= tokens.size() || tokens[i] != open) bad("missing start delimiter");
    const auto begin = static_cast<std::uint32_t>(++i);
    while (i < tokens.size() && token::is_content(tokens[i])) ++i;
    if (i >= tokens.size() || tokens[i] != close) bad("missing end delimiter");
    return std::pair{begin, static_cast<std::uint32_t>(i++)};
  };
  StreamLayout layout;
  std::tie(layout.title_begin, layout.title_end) = region(token::kTitleStart, token::kTitleEnd);
  std::tie(layout.body_begin, layout.body_end) = region(token::kBodyStart, token::kBodyEnd);
  while (i < tokens.size() && tokens[i] == token::kQueryStart) {
    layout.queries.push_back(region(token::kQueryStart, token::kQueryEnd));
  }
  if (i + 1 != tokens.size() || tokens[i] != token::kSentinel) bad("missing trailing sentinel");
  return layout;
}

StreamSegments extract_segments(std::span<const TokenId> tokens) {
  const auto layout = parse_layout(tokens);
  auto slice = [&](std::uint32_t b, std::uint32_t e) {
    return std::vector<TokenId>(tokens.begin() + b, tokens.begin() + e);
  };
  StreamSegments seg;
  seg.title = slice(layout.title_begin, layout.title_end);
  seg.body = slice(layout.body_begin, layout.body_end);
  for (auto [b, e] : layout.queries) seg.queries.push_back(slice(b, e));
  return seg;
}

}  // namespace mvgr
