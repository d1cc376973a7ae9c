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

// Step-scale reward, object/parameter overlap, positional decay and the
// anchored semantic reward.

#ifndef PROTOSCORE_SCORING_HPP_
#define PROTOSCORE_SCORING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "protoscore/alignment.hpp"
#include "protoscore/text.hpp"
#include "protoscore/types.hpp"

namespace protoscore {

struct ScaleInputs {
  std::size_t n_pred = 0;
  std::size_t n_gold = 1;
  double avg_words = 0.0;  // mean word count per orc step
};

/// Deviation threshold M = max(1, floor(deviation_fraction * n_gold)).
inline std::size_t deviation_threshold(std::size_t n_gold, double deviation_fraction) {
  // The epsilon absorbs representation error in the fraction (0.6 * 10 must floor to 6).
  const double raw = std::floor(deviation_fraction * static_cast<double>(n_gold) + 1e-9);
  return std::max<std::size_t>(1, raw > 0 ? static_cast<std::size_t>(raw) : 0);
}

/// r_scale = f(|n_pred - n_gold|) / g(avg_words): cosine decay over the step
/// count gap (zero once the gap reaches M) divided by a verbosity penalty.
inline double step_scale(const ScaleInputs& in, const ScoreConfig& cfg) {
  const std::size_t m = deviation_threshold(std::max<std::size_t>(in.n_gold, 1), cfg.deviation_fraction);
  const std::size_t d = in.n_pred > in.n_gold ? in.n_pred - in.n_gold : in.n_gold - in.n_pred;
  const double f = d < m ? std::cos(std::numbers::pi * static_cast<double>(d) / (2.0 * static_cast<double>(m))) : 0.0;
  const double limit = static_cast<double>(cfg.max_step_words);
  double g = 1.0;
  if (in.avg_words > limit) {
    g = cfg.verbosity_penalty == VerbosityPenalty::kLiteral ? in.avg_words : in.avg_words / limit;
  }
  return std::clamp(f / g, 0.0, 1.0);
}

/// Jaccard similarity of two subword sets; 0 when both are empty.
inline double set_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Minimum subword Jaccard for an unmatched object pair to earn partial credit.
inline constexpr double kSoftMatchThreshold = 0.5;

/// Soft intersection-over-union of two object sets.
///
/// Exactly equal strings count fully. Among the remaining elements, pairs
/// whose subword Jaccard reaches kSoftMatchThreshold are matched greedily
/// (highest similarity first, each element used once) and treated as one
/// fuzzy element: it adds its similarity to the intersection and counts once
/// in the union. Both sets empty gives 1. Symmetric in its arguments.
inline double object_overlap(const std::vector<std::string>& pred, const std::vector<std::string>& ref) {
  const std::set<std::string> a(pred.begin(), pred.end());
  const std::set<std::string> b(ref.begin(), ref.end());
  if (a.empty() && b.empty()) return 1.0;

  std::vector<std::string> only_a, only_b;
  std::size_t exact = 0;
  for (const auto& x : a) {
    if (b.count(x)) {
      ++exact;
    } else {
      only_a.push_back(x);
    }
  }
  for (const auto& y : b) {
    if (!a.count(y)) only_b.push_back(y);
  }
  const std::size_t uni = a.size() + b.size() - exact;

  struct Candidate {
    double similarity;
    std::string low, high;  // the pair's strings in lexical order
    std::size_t ia, ib;
  };
  std::vector<Candidate> candidates;
  std::vector<std::set<std::string>> sub_b;
  sub_b.reserve(only_b.size());
  for (const auto& y : only_b) sub_b.push_back(subwords(y));
  for (std::size_t i = 0; i < only_a.size(); ++i) {
    const auto sub_a = subwords(only_a[i]);
    for (std::size_t j = 0; j < only_b.size(); ++j) {
      const double s = set_jaccard(sub_a, sub_b[j]);
      if (s >= kSoftMatchThreshold) {
        candidates.push_back({s, std::min(only_a[i], only_b[j]), std::max(only_a[i], only_b[j]), i, j});
      }
    }
  }
  // Ordering depends only on the unordered pair, which keeps the result symmetric.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(y.similarity, x.low, x.high) < std::tie(x.similarity, y.low, y.high);
  });
  std::vector<bool> used_a(only_a.size(), false), used_b(only_b.size(), false);
  double soft = 0.0;
  std::size_t soft_pairs = 0;
  for (const auto& c : candidates) {
    if (used_a[c.ia] || used_b[c.ib]) continue;
    used_a[c.ia] = used_b[c.ib] = true;
    soft += c.similarity;
    ++soft_pairs;
  }
  return (static_cast<double>(exact) + soft) / static_cast<double>(uni - soft_pairs);
}

/// Subword union K(P) over every entry of a parameter set.
inline std::set<std::string> subword_union(const std::vector<std::string>& entries) {
  std::set<std::string> out;
  for (const auto& e : entries) out.merge(subwords(e));
  return out;
}

/// Par(i,j): 1 if both empty, 0 if exactly one is empty, otherwise the
/// Jaccard similarity of their subword unions.
inline double parameter_overlap(const std::vector<std::string>& pred, const std::vector<std::string>& ref) {
  if (pred.empty() && ref.empty()) return 1.0;
  if (pred.empty() || ref.empty()) return 0.0;
  const auto a = subword_union(pred);
  const auto b = subword_union(ref);
  if (a.empty() && b.empty()) return 1.0;
  return set_jaccard(a, b);
}

/// m_ij = max(0, 1 - (|i - j| / D)^lambda).
inline double positional_decay(std::size_t i, std::size_t j, std::size_t d_ref, double lambda) {
  if (d_ref == 0) return 0.0;
  const double gap = static_cast<double>(i > j ? i - j : j - i);
  return std::max(0.0, 1.0 - std::pow(gap / static_cast<double>(d_ref), lambda));
}

struct SemanticResult {
  double r_semantics = 0.0;
  double semantic_avg = 0.0;  // in [0, 1.5]
  double order = 0.0;
  AnchorSet anchors;
};

/// Maximum of one anchored pair term, m * (Obj + Par / 2).
inline constexpr double kMaxPairTerm = 1.5;

inline double semantic_average(const std::vector<Step>& pred, const std::vector<Step>& gold,
                               const AnchorSet& anchors, const ScoreConfig& cfg) {
  if (anchors.pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [i, j] : anchors.pairs) {
    const Step& p = pred[i - 1];
    const Step& g = gold[j - 1];
    const double obj = object_overlap(p.objects, g.objects);
    const double par = obj >= cfg.obj_gate ? parameter_overlap(p.parameters, g.parameters) : 0.0;
    total += positional_decay(i, j, gold.size(), cfg.decay_lambda) * (obj + 0.5 * par);
  }
  return total / static_cast<double>(anchors.pairs.size());
}

inline SemanticResult semantic_reward(const std::vector<Step>& pred, const GoldReference& gold,
                                      const ScoreConfig& cfg) {
  std::vector<std::string> pred_actions;
  pred_actions.reserve(pred.size());
  for (const auto& s : pred) pred_actions.push_back(s.action);
  const std::vector<std::string> gold_actions = gold.actions();

  SemanticResult out;
  out.anchors = align_anchors(pred_actions, gold_actions);
  out.order = cfg.order_mode == OrderMode::kStrict ? order_strict(pred_actions, gold_actions)
                                                   : order_lcs_reward(pred_actions, gold_actions);
  out.semantic_avg = semantic_average(pred, gold.steps, out.anchors, cfg);
  out.r_semantics = cfg.order_combine == Combine::kSum ? out.order + out.semantic_avg
                                                       : out.order * out.semantic_avg;
  return out;
}

inline std::vector<Step> key_steps(const ProtocolOutput& p) {
  std::vector<Step> steps;
  steps.reserve(p.key.size());
  for (const auto& k : p.key) steps.push_back(k.step);
  return steps;
}

inline SemanticResult semantic_reward(const ProtocolOutput& pred, const GoldReference& gold,
                                      const ScoreConfig& cfg) {
  return semantic_reward(key_steps(pred), gold, cfg);
}

/// Largest raw value the configured combination can produce
/// (order <= 1, semantic_avg <= 1.5, r_scale <= 1).
inline double max_raw_score(const ScoreConfig& cfg) {
  const double semantics = cfg.order_combine == Combine::kSum ? 1.0 + kMaxPairTerm : 1.0 * kMaxPairTerm;
  return cfg.scale_combine == Combine::kProduct ? 1.0 * semantics : 1.0 + semantics;
}

inline double combine_raw(double r_scale, double r_semantics, const ScoreConfig& cfg) {
  return cfg.scale_combine == Combine::kProduct ? r_scale * r_semantics : r_scale + r_semantics;
}

/// Maps a raw combined value into the configured reward range.
inline double map_reward_range(double raw, const ScoreConfig& cfg) {
  const double unit = raw / max_raw_score(cfg);
  switch (cfg.reward_range) {
    case RewardRange::kUnit: return unit;
    case RewardRange::kConstant: return raw;
    case RewardRange::kScaled: return raw * 2.0;
    case RewardRange::kShift: return unit * 2.5 - 1.25;
  }
  return unit;
}

/// Mean whitespace-token count over the orc steps (0 when there are none).
inline double average_orc_words(const ProtocolOutput& p) {
  if (p.orc.empty()) return 0.0;
  std::size_t words = 0;
  for (const auto& o : p.orc) words += word_count(o.text);
  return static_cast<double>(words) / static_cast<double>(p.orc.size());
}

}  // namespace protoscore

#endif  // PROTOSCORE_SCORING_HPP_
