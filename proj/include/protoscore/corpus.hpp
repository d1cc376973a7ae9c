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

// NDJSON corpora and batch evaluation.

#ifndef PROTOSCORE_CORPUS_HPP_
#define PROTOSCORE_CORPUS_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "protoscore/metrics.hpp"
#include "protoscore/score.hpp"
#include "protoscore/types.hpp"

namespace protoscore {

// Exit statuses of run_eval.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitIdMismatch = 3;

struct Prediction {
  std::string id;
  std::string output;
};

/// Thrown while loading corpora; carries the run_eval exit status.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

namespace detail {

// Calls fn(line_number, json) for every non-blank line.
template <class Fn>
void for_each_ndjson(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(kExitIo, "cannot read '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw CorpusError(kExitSchema, path + ":" + std::to_string(line_no) + ": invalid JSON");
    }
    fn(line_no, j);
  }
  if (in.bad()) throw CorpusError(kExitIo, "error while reading '" + path + "'");
}

}  // namespace detail

inline std::vector<GoldReference> load_gold(const std::string& path) {
  std::vector<GoldReference> out;
  std::unordered_set<std::string> ids;
  detail::for_each_ndjson(path, [&](std::size_t line_no, const json& j) {
    try {
      out.push_back(gold_from_json(j));
    } catch (const SchemaError& e) {
      throw CorpusError(kExitSchema, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(out.back().id).second) {
      throw CorpusError(kExitSchema, path + ":" + std::to_string(line_no) + ": duplicate id '" + out.back().id + "'");
    }
  });
  return out;
}

inline std::vector<Prediction> load_predictions(const std::string& path) {
  std::vector<Prediction> out;
  std::unordered_set<std::string> ids;
  detail::for_each_ndjson(path, [&](std::size_t line_no, const json& j) {
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (!j.is_object()) throw CorpusError(kExitSchema, where + "expected a JSON object");
    for (const char* field : {"id", "output"}) {
      if (!j.contains(field) || !j.at(field).is_string()) {
        throw CorpusError(kExitSchema, where + "field '" + field + "' must be a string");
      }
    }
    Prediction p{j.at("id").get<std::string>(), j.at("output").get<std::string>()};
    if (!ids.insert(p.id).second) throw CorpusError(kExitSchema, where + "duplicate id '" + p.id + "'");
    out.push_back(std::move(p));
  });
  return out;
}

inline json evaluation_to_json(const Evaluation& ev) {
  json out = row_to_json(ev.row);
  out["score"] = ev.report.score;
  out["gates"] = json{{"format", ev.report.format_gate}, {"consistency", ev.report.consistency_gate}};
  out["components"] = json{{"scale", ev.report.r_scale},
                           {"order", ev.report.order},
                           {"semantic_avg", ev.report.semantic_avg}};
  return out;
}

/// Scores every prediction against the gold entry with the same id using
/// `jobs` worker threads. Results are in prediction order regardless of
/// `jobs`.
inline std::vector<Evaluation> evaluate_corpus(const std::vector<Prediction>& preds,
                                               const std::vector<GoldReference>& gold, const ScoreConfig& cfg,
                                               unsigned jobs) {
  std::unordered_map<std::string, const GoldReference*> by_id;
  for (const auto& g : gold) by_id.emplace(g.id, &g);
  for (const auto& p : preds) {
    if (!by_id.count(p.id)) throw CorpusError(kExitIdMismatch, "prediction id '" + p.id + "' has no gold reference");
  }

  std::vector<Evaluation> results(preds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < preds.size(); i = next++) {
      results[i] = evaluate(preds[i].output, *by_id.at(preds[i].id), cfg);
      results[i].row.id = preds[i].id;
    }
  };
  jobs = std::clamp(jobs, 1u, 256u);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  return results;
}

/// Path of the aggregate report written next to the per-row output.
inline std::string summary_path(const std::string& out_path) { return out_path + ".summary.json"; }

/// Batch evaluation: per-row NDJSON to `out_path`, aggregate JSON to
/// summary_path(out_path), aligned table to `table`. Returns the exit status;
/// diagnostics go to `err`.
inline int run_eval(const std::string& pred_path, const std::string& gold_path, const std::string& out_path,
                    const ScoreConfig& cfg, unsigned jobs, std::ostream& table, std::ostream& err) {
  try {
    const auto gold = load_gold(gold_path);
    const auto preds = load_predictions(pred_path);
    if (preds.empty()) throw CorpusError(kExitSchema, "empty corpus: '" + pred_path + "' has no predictions");
    const auto results = evaluate_corpus(preds, gold, cfg, jobs);

    std::vector<MetricRow> rows;
    rows.reserve(results.size());
    std::ostringstream lines;
    for (const auto& ev : results) {
      rows.push_back(ev.row);
      lines << dump_line(evaluation_to_json(ev)) << '\n';
    }
    const AggregateReport report = aggregate(rows);
    json summary = aggregate_to_json(report);
    summary["config"] = config_to_json(cfg);

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw CorpusError(kExitIo, "cannot write '" + out_path + "'");
    out << lines.str();
    std::ofstream sum(summary_path(out_path), std::ios::binary | std::ios::trunc);
    if (!sum) throw CorpusError(kExitIo, "cannot write '" + summary_path(out_path) + "'");
    sum << summary.dump(2) << '\n';
    if (!out || !sum) throw CorpusError(kExitIo, "write failed for '" + out_path + "'");
    table << aggregate_to_table(report);
    return kExitOk;
  } catch (const CorpusError& e) {
    err << "error: " << e.what() << '\n';
    return e.status();
  }
}

}  // namespace protoscore

#endif  // PROTOSCORE_CORPUS_HPP_
