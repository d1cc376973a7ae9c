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

// Consistency gate: every token declared in a <key> step must appear in the
// matching <orc> step.

#ifndef PROTOSCORE_GATES_HPP_
#define PROTOSCORE_GATES_HPP_

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "protoscore/types.hpp"

namespace protoscore {

/// T_i = {action} ∪ objects ∪ parameters, as a set of normalized tokens.
inline std::vector<std::string> step_tokens(const Step& step) {
  std::vector<std::string> tokens;
  tokens.reserve(1 + step.objects.size() + step.parameters.size());
  auto add = [&](const std::string& t) {
    if (!t.empty() && std::find(tokens.begin(), tokens.end(), t) == tokens.end()) tokens.push_back(t);
  };
  add(step.action);
  for (const auto& o : step.objects) add(o);
  for (const auto& p : step.parameters) add(p);
  return tokens;
}

/// Fraction of the step's tokens that occur as contiguous substrings of the
/// normalized orc text. A step with no tokens has coverage 0.
inline double token_coverage(const Step& step, std::string_view orc_text) {
  const std::vector<std::string> tokens = step_tokens(step);
  if (tokens.empty()) return 0.0;
  const std::string haystack = normalize_text(orc_text);
  std::size_t covered = 0;
  for (const auto& t : tokens) covered += haystack.find(t) != std::string::npos;
  return static_cast<double>(covered) / static_cast<double>(tokens.size());
}

struct ConsistencyResult {
  bool passed = false;
  double min_coverage = 0.0;
  std::vector<std::string> failures;
};

/// Structural correspondence (|orc| == |key| and both index sets equal
/// {1..N}) plus min-coverage over all steps >= tau.
inline ConsistencyResult check_consistency(const ProtocolOutput& parsed, double tau) {
  ConsistencyResult result;
  const std::size_t n = parsed.key.size();
  bool structural = true;
  if (parsed.orc.size() != n) {
    result.failures.push_back("consistency: " + std::to_string(parsed.key.size()) + " key steps but " +
                              std::to_string(parsed.orc.size()) + " orc steps");
    structural = false;
  }
  auto indices_cover = [n](const auto& steps) {
    std::vector<bool> seen(n + 1, false);
    for (const auto& s : steps) {
      if (s.index < 1 || s.index > n || seen[s.index]) return false;
      seen[s.index] = true;
    }
    return steps.size() == n;
  };
  if (!indices_cover(parsed.key)) {
    result.failures.push_back("consistency: key indices are not exactly 1.." + std::to_string(n));
    structural = false;
  }
  if (!indices_cover(parsed.orc)) {
    result.failures.push_back("consistency: orc indices are not exactly 1.." + std::to_string(n));
    structural = false;
  }
  if (!structural || n == 0) return result;

  double min_cov = 1.0;
  for (const auto& k : parsed.key) {
    const auto orc = std::find_if(parsed.orc.begin(), parsed.orc.end(),
                                  [&](const OrcStep& o) { return o.index == k.index; });
    const double cov = token_coverage(k.step, orc->text);
    if (cov < tau) {
      result.failures.push_back("consistency: step " + std::to_string(k.index) + " coverage " +
                                std::to_string(cov) + " below tau");
    }
    min_cov = std::min(min_cov, cov);
  }
  result.min_coverage = min_cov;
  result.passed = min_cov >= tau;
  return result;
}

/// I_cons.
inline bool consistency_gate(const ProtocolOutput& parsed, double tau) {
  return check_consistency(parsed, tau).passed;
}

}  // namespace protoscore

#endif  // PROTOSCORE_GATES_HPP_
