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

// Group-relative advantage normalization for policy-gradient training.

#ifndef PROTOSCORE_ADVANTAGES_HPP_
#define PROTOSCORE_ADVANTAGES_HPP_

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace protoscore {

/// Groups whose population standard deviation falls below this get all-zero advantages.
inline constexpr double kDegenerateGroupStd = 1e-8;

/// A_i = (r_i - mean) / std over one query group, population std.
inline std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.empty()) throw std::invalid_argument("group_advantages: empty reward group");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double stddev = std::sqrt(var / n);

  std::vector<double> out(rewards.size(), 0.0);
  if (!(stddev >= kDegenerateGroupStd)) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / stddev;
  return out;
}

}  // namespace protoscore

#endif  // PROTOSCORE_ADVANTAGES_HPP_
