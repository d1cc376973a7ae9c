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

// Sequence alignment over action sequences: greedy monotone action anchors,
// strict subsequence order, LCS order and Kendall-style order correlation.
//
// All functions are templates over random-access ranges whose elements are
// equality comparable; anchor and tau assignment additionally hash elements.

#ifndef PROTOSCORE_ALIGNMENT_HPP_
#define PROTOSCORE_ALIGNMENT_HPP_

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <deque>
#include <functional>
#include <ranges>
#include <span>
#include <unordered_map>
#include <vector>

#include "protoscore/types.hpp"

namespace protoscore {

template <class A, class B>
concept ComparableSequences =
    std::ranges::random_access_range<A> && std::ranges::random_access_range<B> &&
    std::equality_comparable_with<std::ranges::range_reference_t<A>, std::ranges::range_reference_t<B>>;

/// Monotone pair set W plus whatever was left unmatched. Indices are 1-based.
struct AnchorSet {
  std::vector<Anchor> pairs;
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_ref;
};

namespace detail {

// Positions (0-based) of every value in `seq`, in increasing order.
template <std::ranges::random_access_range R>
auto positions_by_value(const R& seq) {
  using Value = std::ranges::range_value_t<R>;
  std::unordered_map<Value, std::vector<std::size_t>> positions;
  const auto n = static_cast<std::size_t>(std::ranges::size(seq));
  for (std::size_t j = 0; j < n; ++j) positions[seq[j]].push_back(j);
  return positions;
}

}  // namespace detail

/// Greedy first-come-first-match alignment. Each prediction, scanned left to
/// right, takes the earliest reference occurrence of the same action strictly
/// after the previous match. Per-value cursors only move forward, so the scan
/// is linear in n + m.
template <std::ranges::random_access_range P, std::ranges::random_access_range R>
  requires ComparableSequences<P, R>
AnchorSet align_anchors(const P& pred, const R& ref) {
  struct Cursor {
    const std::vector<std::size_t>* positions;
    std::size_t next = 0;
  };
  const auto positions = detail::positions_by_value(ref);
  std::unordered_map<std::ranges::range_value_t<R>, Cursor> cursors;

  AnchorSet out;
  const auto n = static_cast<std::size_t>(std::ranges::size(pred));
  const auto m = static_cast<std::size_t>(std::ranges::size(ref));
  std::vector<bool> ref_used(m, false);
  std::size_t last = 0;  // 1-based index of the previous match, 0 = none
  for (std::size_t i = 0; i < n; ++i) {
    const auto found = positions.find(pred[i]);
    if (found == positions.end()) {
      out.unmatched_pred.push_back(i + 1);
      continue;
    }
    auto [it, inserted] = cursors.try_emplace(found->first, Cursor{&found->second, 0});
    Cursor& cursor = it->second;
    while (cursor.next < cursor.positions->size() && (*cursor.positions)[cursor.next] + 1 <= last) {
      ++cursor.next;
    }
    if (cursor.next == cursor.positions->size()) {
      out.unmatched_pred.push_back(i + 1);
      continue;
    }
    const std::size_t j = (*cursor.positions)[cursor.next++];
    out.pairs.push_back({i + 1, j + 1});
    ref_used[j] = true;
    last = j + 1;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!ref_used[j]) out.unmatched_ref.push_back(j + 1);
  }
  return out;
}

/// True if `needle` embeds into `haystack` with order preserved.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
  requires ComparableSequences<A, B>
bool is_subsequence(const A& needle, const B& haystack) {
  const auto n = static_cast<std::size_t>(std::ranges::size(needle));
  const auto m = static_cast<std::size_t>(std::ranges::size(haystack));
  std::size_t i = 0;
  for (std::size_t j = 0; j < m && i < n; ++j) {
    if (needle[i] == haystack[j]) ++i;
  }
  return i == n;
}

/// 1 if the sequences are equal or either is a subsequence of the other.
/// An empty sequence never earns the order reward.
template <std::ranges::random_access_range P, std::ranges::random_access_range R>
  requires ComparableSequences<P, R>
double order_strict(const P& pred, const R& ref) {
  if (std::ranges::empty(pred) || std::ranges::empty(ref)) return 0.0;
  return (is_subsequence(pred, ref) || is_subsequence(ref, pred)) ? 1.0 : 0.0;
}

/// Length of the longest common subsequence, classic O(nm) DP kept in two rows.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
  requires ComparableSequences<A, B>
std::size_t lcs_length(const A& a, const B& b) {
  const auto n = static_cast<std::size_t>(std::ranges::size(a));
  const auto m = static_cast<std::size_t>(std::ranges::size(b));
  if (n == 0 || m == 0) return 0;
  std::vector<std::size_t> prev(m + 1, 0), curr(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

/// LCS / m: fraction of the reference order preserved. Reward variant; the
/// evaluation metric normalizes by (n + m) / 2 instead.
template <std::ranges::random_access_range P, std::ranges::random_access_range R>
  requires ComparableSequences<P, R>
double order_lcs_reward(const P& pred, const R& ref) {
  const auto m = static_cast<std::size_t>(std::ranges::size(ref));
  if (m == 0) return 0.0;
  return static_cast<double>(lcs_length(pred, ref)) / static_cast<double>(m);
}

/// Reference index (1-based) for each matched prediction, in prediction order.
/// Unlike align_anchors, a prediction may match any unused reference
/// occurrence of its action (the earliest one), so reorderings stay visible.
template <std::ranges::random_access_range P, std::ranges::random_access_range R>
  requires ComparableSequences<P, R>
std::vector<std::size_t> tau_assignment(const P& pred, const R& ref) {
  auto positions = detail::positions_by_value(ref);
  std::unordered_map<std::ranges::range_value_t<R>, std::size_t> used;
  std::vector<std::size_t> out;
  const auto n = static_cast<std::size_t>(std::ranges::size(pred));
  for (std::size_t i = 0; i < n; ++i) {
    const auto found = positions.find(pred[i]);
    if (found == positions.end()) continue;
    std::size_t& next = used[found->first];
    if (next < found->second.size()) out.push_back(found->second[next++] + 1);
  }
  return out;
}

/// (C - D') / (C + D') over all index pairs; 0 when there is no pair.
/// Indices are assumed distinct.
inline double kendall_tau(std::span<const std::size_t> indices) {
  long long concordant = 0;
  long long discordant = 0;
  for (std::size_t p = 0; p < indices.size(); ++p) {
    for (std::size_t q = p + 1; q < indices.size(); ++q) {
      if (indices[p] < indices[q]) {
        ++concordant;
      } else if (indices[p] > indices[q]) {
        ++discordant;
      }
    }
  }
  if (concordant + discordant == 0) return 0.0;
  return static_cast<double>(concordant - discordant) / static_cast<double>(concordant + discordant);
}

template <std::ranges::random_access_range P, std::ranges::random_access_range R>
  requires ComparableSequences<P, R>
double order_tau(const P& pred, const R& ref) {
  const std::vector<std::size_t> assigned = tau_assignment(pred, ref);
  return kendall_tau(assigned);
}

}  // namespace protoscore

#endif  // PROTOSCORE_ALIGNMENT_HPP_
