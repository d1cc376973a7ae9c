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

// Parser for four-section model output and the format gate.
//
// Expected layout (text outside the four sections is ignored):
//
//   <think> free text </think>
//   <key>
//   Step 1: {"action": "...", "objects": [...], "parameters": [...]}
//   ...
//   </key>
//   <orc>
//   Step 1: natural-language rendering of key step 1
//   ...
//   </orc>
//   <note> free text </note>

#ifndef PROTOSCORE_PARSER_HPP_
#define PROTOSCORE_PARSER_HPP_

#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protoscore/types.hpp"

namespace protoscore {

enum class ParseFailureKind {
  kMissingSection,
  kSectionOrder,
  kBadStepHeader,
  kBadStepJson,
  kNonContiguousIndex,
  kEmptyKey,
};

inline std::string_view to_string(ParseFailureKind k) {
  switch (k) {
    case ParseFailureKind::kMissingSection: return "missing_section";
    case ParseFailureKind::kSectionOrder: return "section_order";
    case ParseFailureKind::kBadStepHeader: return "bad_step_header";
    case ParseFailureKind::kBadStepJson: return "bad_step_json";
    case ParseFailureKind::kNonContiguousIndex: return "non_contiguous_index";
    case ParseFailureKind::kEmptyKey: return "empty_key";
  }
  return "unknown";
}

struct ParseFailure {
  ParseFailureKind kind;
  std::string section;             // "think", "key", "orc", "note" or "" for document-level
  std::optional<std::size_t> step;  // step index (header value, or 1-based line ordinal)
  std::string detail;

  std::string describe() const {
    std::string out(to_string(kind));
    if (!section.empty()) out += " at " + section;
    if (step) out += " step " + std::to_string(*step);
    if (!detail.empty()) out += ": " + detail;
    return out;
  }
};

/// Everything parse_output recovers. `output` is best effort and is always
/// populated with the steps that did parse; it is trustworthy only when
/// `failures` is empty.
struct ParseResult {
  ProtocolOutput output;
  std::vector<ParseFailure> failures;

  bool ok() const noexcept { return failures.empty(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(s.substr(start));
      break;
    }
    lines.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Recognizes `Step <digits>:` at the start of `line` (leading whitespace
// allowed). On success returns the index and sets `rest` to the text after the
// colon.
inline std::optional<std::size_t> match_step_header(std::string_view line, std::string_view& rest) {
  std::string_view s = line;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  constexpr std::string_view kWord = "Step";
  if (!s.starts_with(kWord)) return std::nullopt;
  s.remove_prefix(kWord.size());
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  std::size_t digits = 0;
  std::size_t value = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) {
    if (digits >= 9) return std::nullopt;
    value = value * 10 + static_cast<std::size_t>(s[digits] - '0');
    ++digits;
  }
  if (digits == 0) return std::nullopt;
  s.remove_prefix(digits);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  if (s.empty() || s.front() != ':') return std::nullopt;
  s.remove_prefix(1);
  rest = s;
  return value;
}

struct SectionSpan {
  std::size_t open = std::string_view::npos;   // position of "<tag>"
  std::size_t body = 0;                        // first byte after "<tag>"
  std::size_t close = std::string_view::npos;  // position of "</tag>"
  std::size_t end = 0;                         // first byte after "</tag>"

  bool found() const { return open != std::string_view::npos && close != std::string_view::npos; }
};

inline SectionSpan locate_section(std::string_view raw, std::string_view tag) {
  SectionSpan span;
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  span.open = raw.find(open);
  if (span.open == std::string_view::npos) return span;
  span.body = span.open + open.size();
  span.close = raw.find(close, span.body);
  if (span.close != std::string_view::npos) span.end = span.close + close.size();
  return span;
}

inline void parse_key_section(std::string_view body, ProtocolOutput& out,
                              std::vector<ParseFailure>& failures) {
  std::vector<std::size_t> indices;
  std::size_t ordinal = 0;
  for (std::string_view line : split_lines(body)) {
    line = trim(line);
    if (line.empty()) continue;
    ++ordinal;
    std::string_view rest;
    const auto index = match_step_header(line, rest);
    if (!index) {
      failures.push_back({ParseFailureKind::kBadStepHeader, "key", ordinal,
                          "expected 'Step <n>: {json}', got '" + std::string(line.substr(0, 60)) + "'"});
      continue;
    }
    indices.push_back(*index);
    const json parsed = json::parse(trim(rest), nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      failures.push_back({ParseFailureKind::kBadStepJson, "key", *index, "step body is not valid JSON"});
      continue;
    }
    try {
      out.key.push_back({*index, step_from_json(parsed, "step")});
    } catch (const SchemaError& e) {
      failures.push_back({ParseFailureKind::kBadStepJson, "key", *index, e.what()});
    }
  }
  if (ordinal == 0) {
    failures.push_back({ParseFailureKind::kEmptyKey, "key", std::nullopt, "no steps in <key>"});
    return;
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] != k + 1) {
      failures.push_back({ParseFailureKind::kNonContiguousIndex, "key", indices[k],
                          "expected step " + std::to_string(k + 1) + " at position " + std::to_string(k + 1)});
      break;
    }
  }
}

inline void parse_orc_section(std::string_view body, ProtocolOutput& out,
                              std::vector<ParseFailure>& failures) {
  std::optional<OrcStep> current;
  std::string text;
  auto flush = [&] {
    if (current) {
      current->text = std::string(trim(text));
      out.orc.push_back(std::move(*current));
    }
    current.reset();
    text.clear();
  };
  std::size_t ordinal = 0;
  for (std::string_view line : split_lines(body)) {
    std::string_view rest;
    if (const auto index = match_step_header(line, rest)) {
      flush();
      ++ordinal;
      current = OrcStep{*index, {}};
      text = std::string(rest);
      continue;
    }
    if (current) {
      text += '\n';
      text += line;
    } else if (!trim(line).empty()) {
      failures.push_back({ParseFailureKind::kBadStepHeader, "orc", std::nullopt,
                          "text before the first 'Step <n>:' line"});
    }
  }
  flush();
}

}  // namespace detail

/// Parses a complete model response. Collects every failure rather than
/// stopping at the first.
inline ParseResult parse_output(std::string_view raw) {
  static constexpr std::array<std::string_view, 4> kSections = {"think", "key", "orc", "note"};
  ParseResult result;
  std::array<detail::SectionSpan, 4> spans;
  for (std::size_t s = 0; s < kSections.size(); ++s) {
    spans[s] = detail::locate_section(raw, kSections[s]);
    if (!spans[s].found()) {
      result.failures.push_back({ParseFailureKind::kMissingSection, std::string(kSections[s]), std::nullopt,
                                 "<" + std::string(kSections[s]) + "> section not found"});
    }
  }
  // Each present section must close before the next one opens.
  const detail::SectionSpan* previous = nullptr;
  std::string_view previous_name;
  for (std::size_t s = 0; s < kSections.size(); ++s) {
    if (!spans[s].found()) continue;
    if (previous != nullptr && spans[s].open < previous->end) {
      result.failures.push_back({ParseFailureKind::kSectionOrder, std::string(kSections[s]), std::nullopt,
                                 "<" + std::string(kSections[s]) + "> must follow </" +
                                     std::string(previous_name) + ">"});
    }
    previous = &spans[s];
    previous_name = kSections[s];
  }

  auto body = [&](std::size_t s) {
    return raw.substr(spans[s].body, spans[s].close - spans[s].body);
  };
  if (spans[0].found()) result.output.think = std::string(detail::trim(body(0)));
  if (spans[1].found()) detail::parse_key_section(body(1), result.output, result.failures);
  if (spans[2].found()) detail::parse_orc_section(body(2), result.output, result.failures);
  if (spans[3].found()) result.output.note = std::string(detail::trim(body(3)));
  return result;
}

/// I_format: the output parsed cleanly into a non-empty key with indices 1..N.
inline bool format_gate(const ParseResult& parsed) {
  if (!parsed.ok() || parsed.output.key.empty()) return false;
  for (std::size_t k = 0; k < parsed.output.key.size(); ++k) {
    const auto& step = parsed.output.key[k];
    if (step.index != k + 1 || step.step.action.empty()) return false;
  }
  return true;
}

/// Canonical writer; parse_output(write_output(p)) == p for outputs whose
/// think/note/orc text is already trimmed and free of section tags.
inline std::string write_output(const ProtocolOutput& p) {
  std::string out;
  out += "<think>\n" + p.think + "\n</think>\n<key>\n";
  for (const auto& k : p.key) {
    out += "Step " + std::to_string(k.index) + ": " + dump_line(step_to_json(k.step)) + "\n";
  }
  out += "</key>\n<orc>\n";
  for (const auto& o : p.orc) out += "Step " + std::to_string(o.index) + ": " + o.text + "\n";
  out += "</orc>\n<note>\n" + p.note + "\n</note>\n";
  return out;
}

}  // namespace protoscore

#endif  // PROTOSCORE_PARSER_HPP_
