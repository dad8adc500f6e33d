// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvgr/error.hpp"
#include "mvgr/pipeline.hpp"
#include "mvgr/synthetic.hpp"

namespace mvgr {

namespace {

struct Settings {
  std::string config;
  std::string corpus, corpus_format, index, scorer, pairs, queries, qrels, run, output;
  bool force = false;
  std::size_t pseudo_queries = 5;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // scorer training
  std::string ratio = "3:10:5";
  std::size_t unsupervised = 0;
  std::size_t order = 2;
  double smoothing = 0.1;
  double query_weight = 1.0;
  // decoding and ranking
  std::size_t beam_size = 15;
  std::size_t max_title_len = 32, max_substring_len = 10, max_query_len = 32;
  std::size_t predictions_per_view = 0;
  double query_length_bias = 0.0;
  std::vector<std::string> views = {"title", "substring", "pseudo-query"};
  std::string transform = "exp";
  double length_exponent = 1.0;
  std::vector<double> view_weights = {1.0, 1.0, 1.0};
  std::size_t depth = 100;
  // evaluation
  std::vector<std::size_t> beam_sizes = {5, 10, 15, 20};
  std::string format = "table";
  // synthetic data
  std::size_t entities = 25, aspects = 8, heldout = 100;
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorCode::kInvalidArgument, std::string("missing required flag --") + flag);
}

void check_writable(const std::string& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw Error(ErrorCode::kExists, path + " already exists; pass --force to overwrite");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

CorpusFormat corpus_format(const Settings& s) {
  if (!s.corpus_format.empty()) return parse_corpus_format(s.corpus_format);
  return std::filesystem::path(s.corpus).extension() == ".tsv" ? CorpusFormat::kTsv : CorpusFormat::kJsonl;
}

// The corpus exactly as the index saw it: loaded, then expanded with
// template pseudo-queries under the same k and seed.
Corpus prepared_corpus(const Settings& s, std::ostream& err) {
  require(s.corpus, "corpus");
  std::vector<std::string> warnings;
  auto corpus = attach_pseudo_queries(load_corpus(s.corpus, corpus_format(s)), TemplateQueryGenerator{},
                                      s.pseudo_queries, s.seed, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return corpus;
}

RetrievalConfig retrieval_config(const Settings& s) {
  RetrievalConfig c;
  c.beam.beam_size = s.beam_size;
  c.beam.max_title_len = s.max_title_len;
  c.beam.max_substring_len = s.max_substring_len;
  c.beam.max_query_len = s.max_query_len;
  c.beam.predictions_per_view = s.predictions_per_view;
  c.beam.query_length_bias = s.query_length_bias;
  std::string views;
  for (const auto& v : s.views) views += (views.empty() ? "" : ",") + v;
  c.views = parse_views(views);
  if (s.transform == "exp") {
    c.transform.kind = ScoreTransform::Kind::kLengthNormalizedExp;
  } else if (s.transform == "raw") {
    c.transform.kind = ScoreTransform::Kind::kRaw;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown transform " + s.transform + " (expected exp or raw)");
  }
  c.transform.length_exponent = s.length_exponent;
  if (s.view_weights.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "--view-weights takes three values: title,substring,pseudo-query");
  }
  std::copy(s.view_weights.begin(), s.view_weights.end(), c.transform.view_weights.begin());
  c.depth = s.depth;
  return c;
}

struct Loaded {
  FMIndex index;
  NgramScorer scorer;
};

Loaded load_system(const Settings& s) {
  require(s.index, "index");
  require(s.scorer, "scorer");
  auto index = FMIndex::load(s.index);
  auto scorer = NgramScorer::load(s.scorer, index.vocab());
  return {std::move(index), std::move(scorer)};
}

void cmd_build_index(const Settings& s, std::ostream& out, std::ostream& err) {
  require(s.index, "index");
  check_writable(s.index, s.force);
  const auto corpus = prepared_corpus(s, err);
  auto vocab = build_vocabulary(corpus);
  const auto streams = flatten_corpus(corpus, vocab);
  const auto index = FMIndex::build(streams, std::move(vocab));
  index.save(s.index);
  out << "indexed " << index.doc_count() << " documents, " << index.size() << " tokens, vocabulary "
      << index.vocab().size() << '\n';
}

void cmd_train_scorer(const Settings& s, std::ostream& out, std::ostream& err) {
  require(s.pairs, "pairs");
  require(s.index, "index");
  require(s.scorer, "scorer");
  check_writable(s.scorer, s.force);
  const auto corpus = prepared_corpus(s, err);
  const auto vocab = build_vocabulary(corpus);
  const auto index = FMIndex::load(s.index);
  if (vocab.fingerprint() != index.vocab().fingerprint()) {
    throw Error(ErrorCode::kVocabularyMismatch,
                "corpus vocabulary does not match the index; rebuild the index or use the same "
                "--pseudo-queries and --seed");
  }
  TrainingConfig tc;
  tc.samples.ratio = parse_ratio(s.ratio);
  tc.samples.seed = s.seed;
  tc.unsupervised_per_passage = s.unsupervised;
  tc.ngram.order = static_cast<unsigned>(s.order);
  tc.ngram.smoothing = s.smoothing;
  tc.ngram.query_weight = s.query_weight;
  TrainingReport report;
  const auto pairs = load_training_pairs(s.pairs);
  const auto scorer = train_scorer(pairs, corpus, index.vocab(), tc, &report);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  scorer.save(s.scorer);
  out << "samples";
  for (auto v : kAllViews) out << ' ' << view_name(v) << '=' << report.supervised[v];
  out << " unsupervised=" << report.unsupervised << '\n';
}

void cmd_retrieve(const Settings& s, std::ostream& out, std::ostream& err) {
  require(s.queries, "queries");
  const auto sys = load_system(s);
  const Retriever retriever(sys.index, sys.scorer, retrieval_config(s));
  const auto queries = load_queries(s.queries);
  std::ostringstream run;
  for (const auto& r : retrieve_all(retriever, queries, s.workers)) {
    if (!r.error.empty()) err << "warning: query " << r.query_id << " failed: " << r.error << '\n';
    write_run(run, r.query_id, r.ranked, s.depth);
  }
  if (s.output.empty() || s.output == "-") {
    out << run.str();
  } else {
    check_writable(s.output, s.force);
    write_text(s.output, run.str());
    out << "wrote " << queries.size() << " queries to " << s.output << '\n';
  }
}

void emit_report(const Settings& s, const EvalReport& report, std::ostream& out, std::ostream& err) {
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  if (!s.output.empty()) {
    check_writable(s.output, s.force);
    write_text(s.output, report.to_json() + "\n");
  }
  out << (s.format == "json" ? report.to_json() + "\n" : report.to_table());
}

void cmd_evaluate(const Settings& s, std::ostream& out, std::ostream& err) {
  require(s.qrels, "qrels");
  const auto qrels = load_qrels(s.qrels);
  if (!s.run.empty()) {
    emit_report(s, evaluate_run(load_run(s.run), qrels, {}), out, err);
    return;
  }
  require(s.queries, "queries (or --run)");
  const auto sys = load_system(s);
  const Retriever retriever(sys.index, sys.scorer, retrieval_config(s));
  const auto queries = load_queries(s.queries);
  emit_report(
      s, run_eval(queries, qrels, [&](const Query& q) { return retriever.retrieve(q.text); }, {}, s.workers), out,
      err);
}

void cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
  require(s.queries, "queries");
  require(s.qrels, "qrels");
  const auto sys = load_system(s);
  const auto queries = load_queries(s.queries);
  const auto qrels = load_qrels(s.qrels);
  const MetricSpec metrics;
  const auto rows =
      sweep_beam_sizes(queries, qrels, sys.index, sys.scorer, retrieval_config(s), s.beam_sizes, metrics, s.workers);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  out << "beam";
  for (const auto& n : metrics.names()) out << '\t' << n;
  out << '\n';
  for (const auto& row : rows) {
    for (const auto& w : row.report.warnings) err << "warning: beam " << row.beam_size << ": " << w << '\n';
    out << row.beam_size;
    char buf[32];
    for (double v : row.report.mean) {
      std::snprintf(buf, sizeof(buf), "\t%.4f", v);
      out << buf;
    }
    out << '\n';
    auto entry = nlohmann::ordered_json::parse(row.report.to_json());
    entry.erase("per_query");
    j.push_back({{"beam_size", row.beam_size}, {"report", entry}});
  }
  if (!s.output.empty()) {
    check_writable(s.output, s.force);
    write_text(s.output, j.dump(2) + "\n");
  }
}

void cmd_synth(const Settings& s, std::ostream& out, std::ostream&) {
  require(s.output, "output");
  SyntheticOptions o;
  o.entities = s.entities;
  o.aspects = s.aspects;
  o.heldout_queries = s.heldout;
  o.seed = s.seed;
  const auto bench = make_synthetic(o);
  const auto corpus = std::filesystem::path(s.output) / "corpus.jsonl";
  check_writable(corpus.string(), s.force);
  write_synthetic(bench, s.output);
  out << "wrote " << bench.corpus.doc_count() << " passages, " << bench.train.size() << " training pairs, "
      << bench.queries.size() << " queries to " << s.output << '\n';
}

std::string one_line(std::string text) {
  for (auto& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Multiview generative passage retrieval over an FM-index", "mvgr"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.get_config_formatter_base()->arrayDelimiter(',');

  app.add_option("--corpus", s.corpus, "Corpus file (.jsonl or .tsv)");
  app.add_option("--corpus-format", s.corpus_format, "jsonl or tsv; defaults to the file extension");
  app.add_option("--index", s.index, "Index file");
  app.add_option("--scorer", s.scorer, "Scorer file");
  app.add_option("--pairs", s.pairs, "Training pairs TSV: query, passage id");
  app.add_option("--queries", s.queries, "Queries TSV: query id, text");
  app.add_option("--qrels", s.qrels, "Qrels TSV: query id, passage id");
  app.add_option("--run", s.run, "Run TSV to evaluate");
  app.add_option("--output", s.output, "Output path");
  app.add_flag("--force", s.force, "Overwrite existing outputs");
  app.add_option("--pseudo-queries", s.pseudo_queries, "Template pseudo-queries per passage without any")
      ->capture_default_str();
  app.add_option("--seed", s.seed, "Seed for every randomized step")->capture_default_str();
  app.add_option("--workers", s.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--ratio", s.ratio, "Training samples per pair, title:substring:pseudo-query")
      ->capture_default_str();
  app.add_option("--unsupervised", s.unsupervised, "Unsupervised samples per passage")->capture_default_str();
  app.add_option("--order", s.order, "N-gram order")->capture_default_str();
  app.add_option("--smoothing", s.smoothing, "Additive smoothing")->capture_default_str();
  app.add_option("--query-weight", s.query_weight, "Weight of query-term evidence")->capture_default_str();
  app.add_option("--beam-size", s.beam_size, "Beam size")->capture_default_str();
  app.add_option("--max-title-len", s.max_title_len)->capture_default_str();
  app.add_option("--max-substring-len", s.max_substring_len)->capture_default_str();
  app.add_option("--max-query-len", s.max_query_len)->capture_default_str();
  app.add_option("--predictions-per-view", s.predictions_per_view, "0 means the beam size")->capture_default_str();
  app.add_option("--query-length-bias", s.query_length_bias, "Added per token to pseudo-query scores")
      ->capture_default_str();
  app.add_option("--views", s.views, "Comma-separated views")->delimiter(',')->capture_default_str();
  app.add_option("--transform", s.transform, "exp or raw")->capture_default_str();
  app.add_option("--length-exponent", s.length_exponent)->capture_default_str();
  app.add_option("--view-weights", s.view_weights, "title,substring,pseudo-query")->delimiter(',')->expected(3);
  app.add_option("--depth", s.depth, "Ranked passages kept per query")->capture_default_str();
  app.add_option("--beam-sizes", s.beam_sizes, "Beam sizes to sweep")->delimiter(',');
  app.add_option("--format", s.format, "table or json")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
  app.add_option("--entities", s.entities)->capture_default_str();
  app.add_option("--aspects", s.aspects)->capture_default_str();
  app.add_option("--heldout", s.heldout)->capture_default_str();

  using Command = void (*)(const Settings&, std::ostream&, std::ostream&);
  std::vector<std::pair<CLI::App*, Command>> commands{
      {app.add_subcommand("build-index", "Build and save the index"), cmd_build_index},
      {app.add_subcommand("train-scorer", "Train and save the n-gram scorer"), cmd_train_scorer},
      {app.add_subcommand("retrieve", "Write a TSV run for a queries file"), cmd_retrieve},
      {app.add_subcommand("evaluate", "Score a run file, or retrieve and score"), cmd_evaluate},
      {app.add_subcommand("sweep", "Evaluate several beam sizes"), cmd_sweep},
      {app.add_subcommand("synth", "Write the synthetic benchmark"), cmd_synth},
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error " << error_code_name(ErrorCode::kInvalidArgument) << ": " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) fn(s, out, err);
    }
  } catch (const Error& e) {
    err << "error " << error_code_name(e.code()) << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error " << error_code_name(ErrorCode::kIo) << ": " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mvgr
