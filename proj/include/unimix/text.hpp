// Copyright 2026 The Unimix Authors.
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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace unimix::text {

// Number of Unicode scalar values in `s`, or nullopt if `s` is not
// well-formed UTF-8 (overlong forms, surrogates and values above U+10FFFF
// are rejected).
std::optional<std::uint64_t> count_scalars(std::string_view s);

// Like count_scalars but throws FormatError on malformed input.
std::uint64_t char_count(std::string_view s);

// Returns the prefix of `s` holding at most `max_scalars` scalar values.
// `s` must be valid UTF-8.
std::string_view truncate_scalars(std::string_view s, std::uint64_t max_scalars);

// Simple case folding: ASCII, Latin-1 Supplement, Latin Extended-A, Greek,
// Cyrillic and Armenian capitals map to their lowercase forms. Other code
// points pass through unchanged. `s` must be valid UTF-8.
std::string fold_case(std::string_view s);

// Decodes one scalar value at `pos`, advancing it. Assumes valid UTF-8.
char32_t decode_next(std::string_view s, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

enum class Script {
  kLatin,
  kCyrillic,
  kGreek,
  kArmenian,
  kHebrew,
  kArabic,
  kDevanagari,
  kBengali,
  kGurmukhi,
  kGujarati,
  kTamil,
  kTelugu,
  kKannada,
  kMalayalam,
  kSinhala,
  kThai,
  kLao,
  kMyanmar,
  kGeorgian,
  kEthiopic,
  kKhmer,
  kHangul,
  kKana,
  kHan,
  kCommon,
  kOther,
};

inline constexpr int kScriptCount = static_cast<int>(Script::kOther) + 1;

Script classify(char32_t cp);
std::string_view script_name(Script s);

}  // namespace unimix::text
