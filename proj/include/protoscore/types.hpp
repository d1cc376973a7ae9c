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

// Domain types shared by every module: steps, parsed outputs, gold references,
// the scoring configuration and the score report, plus their JSON forms.

#ifndef PROTOSCORE_TYPES_HPP_
#define PROTOSCORE_TYPES_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "protoscore/text.hpp"

namespace protoscore {

using json = nlohmann::json;

/// Raised when an input document does not match its schema. `path()` names
/// the offending field, e.g. "steps[0].action".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Normalizes every entry, drops entries that normalize to the empty string
/// and removes duplicates while keeping first-seen order.
inline std::vector<std::string> normalized_set(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  out.reserve(raw.size());
  for (const auto& item : raw) {
    std::string norm = normalize_text(item);
    if (norm.empty()) continue;
    if (std::find(out.begin(), out.end(), norm) == out.end()) out.push_back(std::move(norm));
  }
  return out;
}

/// One atomic action unit: a single action verb with the objects it acts on
/// and the parameters it is performed under. All strings are normalized.
struct Step {
  std::string action;
  std::vector<std::string> objects;
  std::vector<std::string> parameters;

  /// Builds a step from raw strings. Throws SchemaError if the action is empty
  /// after normalization.
  static Step make(std::string_view action, const std::vector<std::string>& objects,
                   const std::vector<std::string>& parameters) {
    Step step;
    step.action = normalize_text(action);
    if (step.action.empty()) throw SchemaError("action", "action is empty after normalization");
    step.objects = normalized_set(objects);
    step.parameters = normalized_set(parameters);
    return step;
  }

  friend bool operator==(const Step&, const Step&) = default;
};

struct KeyStep {
  std::size_t index = 0;
  Step step;
  friend bool operator==(const KeyStep&, const KeyStep&) = default;
};

struct OrcStep {
  std::size_t index = 0;
  std::string text;  // raw, as written by the model
  friend bool operator==(const OrcStep&, const OrcStep&) = default;
};

/// The four-section model output: reasoning, structured steps, their
/// natural-language rendering and safety notes.
struct ProtocolOutput {
  std::string think;
  std::vector<KeyStep> key;
  std::vector<OrcStep> orc;
  std::string note;

  std::vector<std::string> actions() const {
    std::vector<std::string> out;
    out.reserve(key.size());
    for (const auto& k : key) out.push_back(k.step.action);
    return out;
  }

  friend bool operator==(const ProtocolOutput&, const ProtocolOutput&) = default;
};

/// Reference protocol y*: a non-empty sequence of steps.
struct GoldReference {
  std::string id;
  std::vector<Step> steps;
  std::optional<std::vector<std::string>> orc;

  std::vector<std::string> actions() const {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.action);
    return out;
  }

  friend bool operator==(const GoldReference&, const GoldReference&) = default;
};

enum class OrderMode { kStrict, kLcs };
enum class Combine { kSum, kProduct };
enum class RewardRange { kUnit, kConstant, kScaled, kShift };
enum class VerbosityPenalty { kLiteral, kRatio };

/// Every tunable of the scorer. Defaults reproduce the reference setting
/// (strict order, order+semantics summed, scale multiplied, [0,1] range).
struct ScoreConfig {
  double tau = 0.95;
  int max_step_words = 30;
  double decay_lambda = 1.5;
  double deviation_fraction = 0.6;
  OrderMode order_mode = OrderMode::kStrict;
  Combine order_combine = Combine::kSum;
  Combine scale_combine = Combine::kProduct;
  RewardRange reward_range = RewardRange::kUnit;
  double obj_gate = 0.5;
  // kLiteral divides by the mean word count once it exceeds max_step_words;
  // kRatio divides by mean / max_step_words instead.
  VerbosityPenalty verbosity_penalty = VerbosityPenalty::kLiteral;

  /// Throws SchemaError naming the first out-of-range field.
  void validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw SchemaError("tau", "must lie in [0, 1]");
    if (max_step_words < 1) throw SchemaError("max_step_words", "must be a positive integer");
    if (!(decay_lambda > 0.0)) throw SchemaError("decay_lambda", "must be positive");
    if (!(deviation_fraction > 0.0)) throw SchemaError("deviation_fraction", "must be positive");
    if (!(obj_gate >= 0.0 && obj_gate <= 1.0)) throw SchemaError("obj_gate", "must lie in [0, 1]");
  }

  friend bool operator==(const ScoreConfig&, const ScoreConfig&) = default;
};

/// The five executability metrics for one prediction.
struct Metrics {
  double step_m = 0.0;
  double order_s = 0.0;
  double order_lcs = 0.0;
  double order_tau = 0.0;
  double semantic_a = 0.0;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct Anchor {
  std::size_t pred = 0;  // 1-based
  std::size_t ref = 0;   // 1-based
  friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct ScoreReport {
  bool format_gate = false;
  bool consistency_gate = false;
  double r_scale = 0.0;
  double order = 0.0;
  double semantic_avg = 0.0;
  double r_semantics = 0.0;
  double score = 0.0;
  Metrics metrics;
  std::vector<Anchor> anchors;
  std::vector<std::string> failures;
};

// ---------------------------------------------------------------------------
// Enum names

inline std::string_view to_string(OrderMode m) { return m == OrderMode::kStrict ? "strict" : "lcs"; }
inline std::string_view to_string(Combine c) { return c == Combine::kSum ? "sum" : "product"; }
inline std::string_view to_string(VerbosityPenalty v) {
  return v == VerbosityPenalty::kLiteral ? "literal" : "ratio";
}
inline std::string_view to_string(RewardRange r) {
  switch (r) {
    case RewardRange::kUnit: return "unit";
    case RewardRange::kConstant: return "constant";
    case RewardRange::kScaled: return "scaled";
    case RewardRange::kShift: return "shift";
  }
  return "unit";
}

inline OrderMode parse_order_mode(std::string_view s) {
  if (s == "strict") return OrderMode::kStrict;
  if (s == "lcs") return OrderMode::kLcs;
  throw SchemaError("order_mode", "expected strict|lcs, got '" + std::string(s) + "'");
}

inline Combine parse_combine(std::string_view s, const std::string& field) {
  if (s == "sum") return Combine::kSum;
  if (s == "product") return Combine::kProduct;
  throw SchemaError(field, "expected sum|product, got '" + std::string(s) + "'");
}

inline RewardRange parse_reward_range(std::string_view s) {
  if (s == "unit") return RewardRange::kUnit;
  if (s == "constant") return RewardRange::kConstant;
  if (s == "scaled") return RewardRange::kScaled;
  if (s == "shift") return RewardRange::kShift;
  throw SchemaError("reward_range", "expected unit|constant|scaled|shift, got '" + std::string(s) + "'");
}

inline VerbosityPenalty parse_verbosity_penalty(std::string_view s) {
  if (s == "literal") return VerbosityPenalty::kLiteral;
  if (s == "ratio") return VerbosityPenalty::kRatio;
  throw SchemaError("verbosity_penalty", "expected literal|ratio, got '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// JSON

inline json config_to_json(const ScoreConfig& c) {
  return json{{"tau", c.tau},
              {"max_step_words", c.max_step_words},
              {"decay_lambda", c.decay_lambda},
              {"deviation_fraction", c.deviation_fraction},
              {"order_mode", to_string(c.order_mode)},
              {"order_combine", to_string(c.order_combine)},
              {"scale_combine", to_string(c.scale_combine)},
              {"reward_range", to_string(c.reward_range)},
              {"obj_gate", c.obj_gate},
              {"verbosity_penalty", to_string(c.verbosity_penalty)}};
}

namespace detail {

inline double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline const std::string& require_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get_ref<const std::string&>();
}

inline std::vector<std::string> require_string_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(require_string(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace detail

/// Applies the fields present in `patch` on top of `base`. Unknown keys and
/// ill-typed or out-of-range values raise SchemaError.
inline ScoreConfig apply_config_patch(ScoreConfig base, const json& patch) {
  if (!patch.is_object()) throw SchemaError("", "config must be a JSON object");
  for (const auto& [key, value] : patch.items()) {
    if (key == "tau") {
      base.tau = detail::require_number(value, key);
    } else if (key == "max_step_words") {
      if (!value.is_number_integer()) throw SchemaError(key, "expected an integer");
      const auto v = value.get<long long>();
      if (v < 1 || v > 1'000'000) throw SchemaError(key, "must be a positive integer");
      base.max_step_words = static_cast<int>(v);
    } else if (key == "decay_lambda") {
      base.decay_lambda = detail::require_number(value, key);
    } else if (key == "deviation_fraction") {
      base.deviation_fraction = detail::require_number(value, key);
    } else if (key == "order_mode") {
      base.order_mode = parse_order_mode(detail::require_string(value, key));
    } else if (key == "order_combine") {
      base.order_combine = parse_combine(detail::require_string(value, key), key);
    } else if (key == "scale_combine") {
      base.scale_combine = parse_combine(detail::require_string(value, key), key);
    } else if (key == "reward_range") {
      base.reward_range = parse_reward_range(detail::require_string(value, key));
    } else if (key == "obj_gate") {
      base.obj_gate = detail::require_number(value, key);
    } else if (key == "verbosity_penalty") {
      base.verbosity_penalty = parse_verbosity_penalty(detail::require_string(value, key));
    } else {
      throw SchemaError(key, "unknown config field");
    }
  }
  base.validate();
  return base;
}

inline ScoreConfig config_from_json(const json& j) { return apply_config_patch(ScoreConfig{}, j); }

inline json step_to_json(const Step& s) {
  return json{{"action", s.action}, {"objects", s.objects}, {"parameters", s.parameters}};
}

/// Parses {"action", "objects", "parameters"}; exactly these three keys.
inline Step step_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "step must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "action" && key != "objects" && key != "parameters") {
      throw SchemaError(path + "." + key, "unknown step field");
    }
  }
  for (const char* field : {"action", "objects", "parameters"}) {
    if (!j.contains(field)) throw SchemaError(path + "." + field, "missing field");
  }
  const std::string& action = detail::require_string(j.at("action"), path + ".action");
  auto objects = detail::require_string_array(j.at("objects"), path + ".objects");
  auto parameters = detail::require_string_array(j.at("parameters"), path + ".parameters");
  try {
    return Step::make(action, objects, parameters);
  } catch (const SchemaError&) {
    throw SchemaError(path + ".action", "action is empty after normalization");
  }
}

inline json gold_to_json(const GoldReference& g) {
  json steps = json::array();
  for (const auto& s : g.steps) steps.push_back(step_to_json(s));
  json out{{"id", g.id}, {"steps", std::move(steps)}};
  if (g.orc) out["orc"] = *g.orc;
  return out;
}

inline GoldReference gold_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("", "reference must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "id" && key != "steps" && key != "orc") throw SchemaError(key, "unknown reference field");
  }
  if (!j.contains("id")) throw SchemaError("id", "missing field");
  if (!j.contains("steps")) throw SchemaError("steps", "missing field");
  GoldReference gold;
  gold.id = detail::require_string(j.at("id"), "id");
  const json& steps = j.at("steps");
  if (!steps.is_array()) throw SchemaError("steps", "expected an array of steps");
  if (steps.empty()) throw SchemaError("steps", "reference must contain at least one step");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    gold.steps.push_back(step_from_json(steps[i], "steps[" + std::to_string(i) + "]"));
  }
  if (j.contains("orc") && !j.at("orc").is_null()) {
    gold.orc = detail::require_string_array(j.at("orc"), "orc");
  }
  return gold;
}

inline json metrics_to_json(const Metrics& m) {
  return json{{"step_m", m.step_m},
              {"order_s", m.order_s},
              {"order_lcs", m.order_lcs},
              {"order_tau", m.order_tau},
              {"semantic_a", m.semantic_a}};
}

inline json report_to_json(const ScoreReport& r) {
  json anchors = json::array();
  for (const auto& a : r.anchors) anchors.push_back(json::array({a.pred, a.ref}));
  return json{{"format_gate", r.format_gate},
              {"consistency_gate", r.consistency_gate},
              {"r_scale", r.r_scale},
              {"order", r.order},
              {"semantic_avg", r.semantic_avg},
              {"r_semantics", r.r_semantics},
              {"score", r.score},
              {"metrics", metrics_to_json(r.metrics)},
              {"anchors", std::move(anchors)},
              {"failures", r.failures}};
}

/// Serializes to one line. Invalid UTF-8 in raw strings is replaced, never thrown.
inline std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace protoscore

#endif  // PROTOSCORE_TYPES_HPP_
