// Copyright 2026 The protoscore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The five executability metrics and their corpus-level aggregation.

#ifndef PROTOSCORE_METRICS_HPP_
#define PROTOSCORE_METRICS_HPP_

#include <array>
#include <cstddef>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "protoscore/alignment.hpp"
#include "protoscore/scoring.hpp"
#include "protoscore/types.hpp"

namespace protoscore {

// Step-M: 1 iff the step counts agree.
inline double step_match(const std::vector<Step>& pred, const GoldReference& gold) {
  return pred.size() == gold.steps.size() ? 1.0 : 0.0;
}

// Order-S: 1 iff the action sequences are identical.
template <std::ranges::random_access_range P, std::ranges::random_access_range R>
  requires ComparableSequences<P, R>
double order_s_metric(const P& pred, const R& ref) {
  const auto n = static_cast<std::size_t>(std::ranges::size(pred));
  if (n != static_cast<std::size_t>(std::ranges::size(ref))) return 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pred[i] == ref[i])) return 0.0;
  }
  return 1.0;
}

// Order-LCS: 2 * LCS / (n + m).
template <std::ranges::random_access_range P, std::ranges::random_access_range R>
  requires ComparableSequences<P, R>
double order_lcs_metric(const P& pred, const R& ref) {
  const auto total = static_cast<std::size_t>(std::ranges::size(pred) + std::ranges::size(ref));
  if (total == 0) return 0.0;
  return 2.0 * static_cast<double>(lcs_length(pred, ref)) / static_cast<double>(total);
}

// Semantic-A: the anchored semantic average rescaled to [0, 1].
inline double semantic_alignment(const std::vector<Step>& pred, const GoldReference& gold,
                                 const ScoreConfig& cfg) {
  return semantic_reward(pred, gold, cfg).semantic_avg / kMaxPairTerm;
}

inline Metrics compute_metrics(const std::vector<Step>& pred, const GoldReference& gold,
                               const ScoreConfig& cfg) {
  std::vector<std::string> pred_actions;
  pred_actions.reserve(pred.size());
  for (const auto& s : pred) pred_actions.push_back(s.action);
  const auto gold_actions = gold.actions();
  Metrics m;
  m.step_m = step_match(pred, gold);
  m.order_s = order_s_metric(pred_actions, gold_actions);
  m.order_lcs = order_lcs_metric(pred_actions, gold_actions);
  m.order_tau = order_tau(pred_actions, gold_actions);
  m.semantic_a = semantic_alignment(pred, gold, cfg);
  return m;
}

/// Per-sample metrics. When parse_ok is false every metric is zero.
struct MetricRow {
  std::string id;
  Metrics metrics;
  bool parse_ok = false;
  bool consistency_ok = false;
};

inline json row_to_json(const MetricRow& row) {
  json out = metrics_to_json(row.metrics);
  out["id"] = row.id;
  out["parse_ok"] = row.parse_ok;
  out["consistency_ok"] = row.consistency_ok;
  return out;
}

/// Corpus means (x100) plus failure counts.
struct AggregateReport {
  std::size_t rows = 0;
  std::size_t parse_failures = 0;
  std::size_t consistency_failures = 0;  // rows that parsed but failed the consistency gate
  Metrics mean_percent;
};

class EmptyCorpusError : public std::invalid_argument {
 public:
  EmptyCorpusError() : std::invalid_argument("empty corpus") {}
};

/// Arithmetic mean of each metric times 100. Folds in input order.
inline AggregateReport aggregate(std::span<const MetricRow> rows) {
  if (rows.empty()) throw EmptyCorpusError();
  AggregateReport report;
  Metrics sum;
  for (const auto& row : rows) {
    sum.step_m += row.metrics.step_m;
    sum.order_s += row.metrics.order_s;
    sum.order_lcs += row.metrics.order_lcs;
    sum.order_tau += row.metrics.order_tau;
    sum.semantic_a += row.metrics.semantic_a;
    report.parse_failures += !row.parse_ok;
    report.consistency_failures += row.parse_ok && !row.consistency_ok;
  }
  const double n = static_cast<double>(rows.size());
  report.rows = rows.size();
  report.mean_percent = {sum.step_m / n * 100.0, sum.order_s / n * 100.0, sum.order_lcs / n * 100.0,
                         sum.order_tau / n * 100.0, sum.semantic_a / n * 100.0};
  return report;
}

// Column order of the printed table.
inline constexpr std::array<std::string_view, 5> kMetricColumns = {"Semantic-A", "Order-LCS", "Order-S",
                                                                   "Order-Tau", "Step-M"};

inline std::array<double, 5> metric_columns(const Metrics& m) {
  return {m.semantic_a, m.order_lcs, m.order_s, m.order_tau, m.step_m};
}

inline json aggregate_to_json(const AggregateReport& r) {
  json metrics = json::object();
  const auto values = metric_columns(r.mean_percent);
  for (std::size_t c = 0; c < kMetricColumns.size(); ++c) metrics[std::string(kMetricColumns[c])] = values[c];
  return json{{"rows", r.rows},
              {"parse_failures", r.parse_failures},
              {"consistency_failures", r.consistency_failures},
              {"metrics", std::move(metrics)}};
}

/// Aligned plain-text table, two decimals.
inline std::string aggregate_to_table(const AggregateReport& r) {
  std::string header, values;
  const auto numbers = metric_columns(r.mean_percent);
  for (std::size_t c = 0; c < kMetricColumns.size(); ++c) {
    char cell[32];
    std::snprintf(cell, sizeof cell, "%12s", std::string(kMetricColumns[c]).c_str());
    header += cell;
    std::snprintf(cell, sizeof cell, "%12.2f", numbers[c]);
    values += cell;
  }
  return header + "\n" + values + "\nrows=" + std::to_string(r.rows) +
         " parse_failures=" + std::to_string(r.parse_failures) +
         " consistency_failures=" + std::to_string(r.consistency_failures) + "\n";
}

}  // namespace protoscore

#endif  // PROTOSCORE_METRICS_HPP_
