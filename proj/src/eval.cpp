// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvgr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mvgr/corpus.hpp"
#include "mvgr/error.hpp"

namespace mvgr {

namespace {

std::string read_text(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, std::string("cannot open ") + what + " " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Calls fn(line_no, fields) for every non-blank line.
template <typename Fn>
void for_each_row(std::string_view contents, std::size_t expected_fields, const char* what, Fn fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    std::string_view line = contents.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? contents.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (normalize_whitespace(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      fields.emplace_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != expected_fields) {
      throw Error(ErrorCode::kParse, std::string(what) + " line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(expected_fields) + " tab-separated fields");
    }
    fn(line_no, fields);
  }
}

}  // namespace

Qrels parse_qrels(std::string_view contents) {
  Qrels qrels;
  for_each_row(contents, 2, "qrels", [&](std::size_t, std::vector<std::string>& f) {
    qrels[f[0]].insert(f[1]);
  });
  return qrels;
}

Qrels load_qrels(const std::string& path) { return parse_qrels(read_text(path, "qrels")); }

std::vector<Query> parse_queries(std::string_view contents) {
  std::vector<Query> queries;
  std::set<std::string> seen;
  for_each_row(contents, 2, "queries", [&](std::size_t line, std::vector<std::string>& f) {
    if (!seen.insert(f[0]).second) {
      throw Error(ErrorCode::kDuplicateId, "queries line " + std::to_string(line) + ": duplicate query id " + f[0]);
    }
    queries.push_back({f[0], f[1]});
  });
  return queries;
}

std::vector<Query> load_queries(const std::string& path) { return parse_queries(read_text(path, "queries")); }

std::map<std::string, RankedList> parse_run(std::string_view contents) {
  std::map<std::string, std::vector<std::pair<long, RankedEntry>>> rows;
  for_each_row(contents, 4, "run", [&](std::size_t line, std::vector<std::string>& f) {
    try {
      rows[f[0]].push_back({std::stol(f[2]), {f[1], std::stod(f[3])}});
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "run line " + std::to_string(line) + ": bad rank or score");
    }
  });
  std::map<std::string, RankedList> run;
  for (auto& [qid, list] : rows) {
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& out = run[qid];
    for (auto& [_, e] : list) out.push_back(std::move(e));
  }
  return run;
}

std::map<std::string, RankedList> load_run(const std::string& path) { return parse_run(read_text(path, "run")); }

int hits_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (relevant.contains(ranked[i].passage_id)) return 1;
  }
  return 0;
}

double recall_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (relevant.empty()) throw Error(ErrorCode::kInvalidArgument, "recall is undefined without relevant passages");
  std::set<std::string> found;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (relevant.contains(ranked[i].passage_id)) found.insert(ranked[i].passage_id);
  }
  return static_cast<double>(found.size()) / static_cast<double>(relevant.size());
}

double mrr_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (relevant.contains(ranked[i].passage_id)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

std::vector<std::string> MetricSpec::names() const {
  std::vector<std::string> out;
  for (auto k : hits) out.push_back("hits@" + std::to_string(k));
  for (auto k : recall) out.push_back("recall@" + std::to_string(k));
  for (auto k : mrr) out.push_back("mrr@" + std::to_string(k));
  return out;
}

std::vector<double> MetricSpec::compute(const RankedList& ranked, const RelevantSet& relevant) const {
  std::vector<double> out;
  for (auto k : hits) out.push_back(hits_at_k(ranked, relevant, k));
  for (auto k : recall) out.push_back(recall_at_k(ranked, relevant, k));
  for (auto k : mrr) out.push_back(mrr_at_k(ranked, relevant, k));
  return out;
}

double EvalReport::metric(std::string_view name) const {
  for (std::size_t i = 0; i < metric_names.size(); ++i) {
    if (metric_names[i] == name) return mean.at(i);
  }
  throw Error(ErrorCode::kInvalidArgument, "no metric named " + std::string(name));
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["evaluated"] = per_query.size();
  j["skipped"] = skipped;
  auto& means = j["mean"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < metric_names.size(); ++i) means[metric_names[i]] = mean[i];
  auto& rows = j["per_query"] = nlohmann::ordered_json::array();
  for (const auto& q : per_query) {
    nlohmann::ordered_json row;
    row["query_id"] = q.query_id;
    for (std::size_t i = 0; i < metric_names.size(); ++i) row[metric_names[i]] = q.values[i];
    rows.push_back(std::move(row));
  }
  j["warnings"] = warnings;
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char buf[64];
  for (const auto& n : metric_names) {
    std::snprintf(buf, sizeof(buf), "%-12s", n.c_str());
    out << buf;
  }
  out << '\n';
  for (double v : mean) {
    std::snprintf(buf, sizeof(buf), "%-12.4f", v);
    out << buf;
  }
  out << "\n(" << per_query.size() << " queries evaluated, " << skipped << " skipped)\n";
  return out.str();
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

EvalReport finalize(EvalReport report) {
  report.mean.assign(report.metric_names.size(), 0.0);
  if (report.per_query.empty()) return report;
  for (const auto& q : report.per_query) {
    for (std::size_t i = 0; i < q.values.size(); ++i) report.mean[i] += q.values[i];
  }
  for (auto& m : report.mean) m /= static_cast<double>(report.per_query.size());
  return report;
}

}  // namespace

EvalReport run_eval(std::span<const Query> queries, const Qrels& qrels, const Engine& engine,
                    const MetricSpec& metrics, std::size_t workers) {
  EvalReport report;
  report.metric_names = metrics.names();
  std::vector<const Query*> evaluated;
  for (const auto& q : queries) {
    auto it = qrels.find(q.id);
    if (it == qrels.end() || it->second.empty()) {
      ++report.skipped;
      report.warnings.push_back("query " + q.id + " has no qrels; skipped");
      continue;
    }
    evaluated.push_back(&q);
  }
  report.per_query.resize(evaluated.size());
  parallel_for(evaluated.size(), workers, [&](std::size_t i) {
    const Query& q = *evaluated[i];
    report.per_query[i] = {q.id, metrics.compute(engine(q), qrels.at(q.id))};
  });
  return finalize(std::move(report));
}

EvalReport evaluate_run(const std::map<std::string, RankedList>& run, const Qrels& qrels,
                        const MetricSpec& metrics) {
  EvalReport report;
  report.metric_names = metrics.names();
  const RankedList empty;
  std::size_t missing = 0;
  for (const auto& [qid, relevant] : qrels) {
    if (relevant.empty()) {
      ++report.skipped;
      continue;
    }
    auto it = run.find(qid);
    if (it == run.end()) ++missing;
    report.per_query.push_back({qid, metrics.compute(it == run.end() ? empty : it->second, relevant)});
  }
  std::size_t unjudged = 0;
  for (const auto& [qid, _] : run) unjudged += !qrels.contains(qid);
  if (missing) report.warnings.push_back(std::to_string(missing) + " qrels queries have no rows in the run");
  if (unjudged) report.warnings.push_back(std::to_string(unjudged) + " run queries have no qrels");
  return finalize(std::move(report));
}

}  // namespace mvgr
