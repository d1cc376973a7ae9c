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

// Text normalization and subword extraction shared by the gates, rewards and
// metrics. Everything here is a pure function of its input.

#ifndef PROTOSCORE_TEXT_HPP_
#define PROTOSCORE_TEXT_HPP_

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace protoscore {

namespace detail {

inline const icu::Normalizer2& nfkc_casefold() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
      throw std::runtime_error(std::string("ICU NFKC_Casefold unavailable: ") +
                               u_errorName(status));
    }
    return n;
  }();
  return *instance;
}

// Decodes one code point starting at `pos`; malformed bytes decode as U+FFFD.
inline UChar32 next_code_point(std::string_view s, std::size_t& pos) {
  UChar32 c = 0;
  int32_t i = static_cast<int32_t>(pos);
  U8_NEXT(s.data(), i, static_cast<int32_t>(s.size()), c);
  pos = static_cast<std::size_t>(i);
  return c < 0 ? 0xFFFD : c;
}

inline void append_code_point(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, c, error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace detail

/// Canonical form used for every comparison in the library.
///
/// Applies Unicode compatibility normalization together with full case folding
/// (ICU's NFKC_Casefold, which also folds superscript and subscript digits to
/// ASCII digits), then collapses every run of Unicode whitespace to a single
/// space and trims both ends. Total and idempotent; malformed UTF-8 decodes to
/// U+FFFD.
inline std::string normalize_text(std::string_view raw) {
  icu::UnicodeString folded;
  {
    UErrorCode status = U_ZERO_ERROR;
    const icu::UnicodeString in = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    folded = detail::nfkc_casefold().normalize(in, status);
    if (U_FAILURE(status)) folded = in;
  }
  std::string utf8;
  folded.toUTF8String(utf8);

  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < utf8.size()) {
    const std::size_t start = pos;
    const UChar32 c = detail::next_code_point(utf8, pos);
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(utf8, start, pos - start);
  }
  return out;
}

/// Subword set K(s): maximal runs of letters and maximal runs of digits.
/// Whitespace, punctuation and symbols separate runs, and so does every
/// letter/digit boundary ("ph7.4" -> {"ph", "7", "4"}).
inline std::set<std::string> subwords(std::string_view s) {
  enum class Run { kNone, kLetter, kDigit };
  std::set<std::string> out;
  std::string current;
  Run run = Run::kNone;
  auto flush = [&] {
    if (!current.empty()) out.insert(std::move(current));
    current.clear();
    run = Run::kNone;
  };
  std::size_t pos = 0;
  while (pos < s.size()) {
    const UChar32 c = detail::next_code_point(s, pos);
    Run kind = Run::kNone;
    if (u_isdigit(c)) {
      kind = Run::kDigit;
    } else if (u_isalpha(c)) {
      kind = Run::kLetter;
    }
    if (kind != run) flush();
    if (kind == Run::kNone) continue;
    run = kind;
    detail::append_code_point(current, c);
  }
  flush();
  return out;
}

/// Number of whitespace-delimited tokens in `s` after normalization.
inline std::size_t word_count(std::string_view s) {
  const std::string norm = normalize_text(s);
  if (norm.empty()) return 0;
  std::size_t words = 1;
  for (char c : norm) words += (c == ' ');
  return words;
}

}  // namespace protoscore

#endif  // PROTOSCORE_TEXT_HPP_
