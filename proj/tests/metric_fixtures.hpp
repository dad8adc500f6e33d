// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mvgr/eval.hpp"

namespace mvgr::testing {

// Hand-computed metric values for small ranked lists.
struct MetricFixture {
  std::string name;
  RankedList ranked;
  RelevantSet relevant;
  double hits5, hits20, recall5, recall20, recall100, mrr10;
};

inline RankedList ranked_ids(const std::vector<std::string>& ids) {
  RankedList out;
  double score = static_cast<double>(ids.size());
  for (const auto& id : ids) out.push_back({id, score--});
  return out;
}

inline RankedList fillers_with(std::size_t n, std::vector<std::pair<std::size_t, std::string>> at) {
  std::vector<std::string> ids;
  for (std::size_t i = 1; i <= n; ++i) ids.push_back("n" + std::to_string(i));
  for (auto& [rank, id] : at) ids[rank - 1] = id;
  return ranked_ids(ids);
}

inline std::vector<MetricFixture> metric_fixtures() {
  return {
      // Relevant passage at rank 1.
      {"top", ranked_ids({"a", "b", "c", "d", "e", "f"}), {"a"}, 1, 1, 1, 1, 1, 1.0},
      // Rank 6: just outside the top 5.
      {"rank6", fillers_with(8, {{6, "r"}}), {"r"}, 0, 1, 0, 1, 1, 1.0 / 6.0},
      // Four relevant at ranks 2, 5, 7 and absent.
      {"partial", fillers_with(8, {{2, "r1"}, {5, "r2"}, {7, "r3"}}), {"r1", "r2", "r3", "r4"}, 1, 1, 0.5, 0.75,
       0.75, 0.5},
      // Nothing retrieved.
      {"empty", {}, {"a"}, 0, 0, 0, 0, 0, 0.0},
      // Ranks 11 and 25 of 30.
      {"deep", fillers_with(30, {{11, "r"}, {25, "s"}}), {"r", "s"}, 0, 1, 0, 0.5, 1, 0.0},
  };
}

}  // namespace mvgr::testing
