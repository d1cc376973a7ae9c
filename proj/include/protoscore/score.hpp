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

// Gated SCORE: parse, format gate, consistency gate, then step scale combined
// with step semantics. Also the per-pair evaluation used by the batch CLI.

#ifndef PROTOSCORE_SCORE_HPP_
#define PROTOSCORE_SCORE_HPP_

#include <string>
#include <string_view>

#include "protoscore/gates.hpp"
#include "protoscore/metrics.hpp"
#include "protoscore/parser.hpp"
#include "protoscore/scoring.hpp"
#include "protoscore/types.hpp"

namespace protoscore {

struct Evaluation {
  ScoreReport report;
  MetricRow row;
};

/// Scores one raw response against a reference and computes its metrics from
/// a single parse. Never throws on malformed responses; problems are listed
/// in report.failures.
inline Evaluation evaluate(std::string_view pred_raw, const GoldReference& gold, const ScoreConfig& cfg) {
  Evaluation ev;
  ev.row.id = gold.id;
  ScoreReport& report = ev.report;

  const ParseResult parsed = parse_output(pred_raw);
  for (const auto& f : parsed.failures) report.failures.push_back(f.describe());
  report.format_gate = format_gate(parsed);
  if (!report.format_gate) {
    if (parsed.ok()) report.failures.push_back("format: key section is empty or mis-numbered");
    return ev;
  }

  const std::vector<Step> pred_steps = key_steps(parsed.output);
  ev.row.parse_ok = true;
  ev.row.metrics = compute_metrics(pred_steps, gold, cfg);
  report.metrics = ev.row.metrics;

  ConsistencyResult consistency = check_consistency(parsed.output, cfg.tau);
  report.consistency_gate = consistency.passed;
  ev.row.consistency_ok = consistency.passed;
  for (auto& f : consistency.failures) report.failures.push_back(std::move(f));
  if (!report.consistency_gate) return ev;

  const ScaleInputs scale{pred_steps.size(), gold.steps.size(), average_orc_words(parsed.output)};
  report.r_scale = step_scale(scale, cfg);
  SemanticResult semantic = semantic_reward(pred_steps, gold, cfg);
  report.order = semantic.order;
  report.semantic_avg = semantic.semantic_avg;
  report.r_semantics = semantic.r_semantics;
  report.anchors = std::move(semantic.anchors.pairs);
  report.score = map_reward_range(combine_raw(report.r_scale, report.r_semantics, cfg), cfg);
  return ev;
}

/// SCORE(y, y*) = I_format * I_cons * (r_scale ⊗ r_semantics), mapped into the
/// configured reward range. Gate failure yields exactly 0.
inline ScoreReport score(std::string_view pred_raw, const GoldReference& gold, const ScoreConfig& cfg) {
  return evaluate(pred_raw, gold, cfg).report;
}

/// All five metrics for one prediction; a parse failure gives an all-zero row.
inline MetricRow evaluate_pair(std::string_view pred_raw, const GoldReference& gold, const ScoreConfig& cfg) {
  return evaluate(pred_raw, gold, cfg).row;
}

}  // namespace protoscore

#endif  // PROTOSCORE_SCORE_HPP_
