// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvgr/ranker.hpp"

namespace mvgr {

using RelevantSet = std::set<std::string>;
using Qrels = std::map<std::string, RelevantSet>;

struct Query {
  std::string id;
  std::string text;
};

// query_id \t passage_id
Qrels parse_qrels(std::string_view contents);
Qrels load_qrels(const std::string& path);
// query_id \t text
std::vector<Query> parse_queries(std::string_view contents);
std::vector<Query> load_queries(const std::string& path);
// query_id \t passage_id \t rank \t score; rows are re-ordered by rank.
std::map<std::string, RankedList> parse_run(std::string_view contents);
std::map<std::string, RankedList> load_run(const std::string& path);

// 1 if any of the top-k passages is relevant.
int hits_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k);
// |top-k ∩ relevant| / |relevant|. Throws Error(kInvalidArgument) when
// `relevant` is empty.
double recall_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k);
// 1 / rank of the first relevant passage within the top k, else 0.
double mrr_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k);

struct MetricSpec {
  std::vector<std::size_t> hits = {5, 20, 100};
  std::vector<std::size_t> recall = {5, 20, 100};
  std::vector<std::size_t> mrr = {10};

  std::vector<std::string> names() const;
  std::vector<double> compute(const RankedList& ranked, const RelevantSet& relevant) const;
};

struct QueryResult {
  std::string query_id;
  std::vector<double> values;  // aligned with EvalReport::metric_names
};

struct EvalReport {
  std::vector<std::string> metric_names;
  std::vector<QueryResult> per_query;
  std::vector<double> mean;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;

  double metric(std::string_view name) const;
  std::string to_json() const;
  std::string to_table() const;
};

// Retrieval engine under evaluation.
using Engine = std::function<RankedList(const Query&)>;

// Runs every query that has qrels; queries without qrels are skipped with a
// warning. Work is split across `workers` threads and merged in input order.
EvalReport run_eval(std::span<const Query> queries, const Qrels& qrels, const Engine& engine,
                    const MetricSpec& metrics, std::size_t workers = 1);

// Scores a stored run against every query in `qrels`; queries absent from the
// run count as empty rankings.
EvalReport evaluate_run(const std::map<std::string, RankedList>& run, const Qrels& qrels,
                        const MetricSpec& metrics);

// Calls fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace mvgr
