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

#include "unimix/text.hpp"

#include <array>
#include <utility>

#include "unimix/error.hpp"

namespace unimix::text {

std::optional<std::uint64_t> count_scalars(std::string_view s) {
  std::uint64_t n = 0;
  std::size_t i = 0;
  const std::size_t size = s.size();
  while (i < size) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      ++i;
      ++n;
      continue;
    }
    std::size_t len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      return std::nullopt;
    }
    if (i + len > size) return std::nullopt;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) return std::nullopt;
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr std::array<char32_t, 5> kMin = {0, 0, 0x80, 0x800,
                                                     0x10000};
    if (cp < kMin[len]) return std::nullopt;  // overlong
    if (cp > 0x10FFFF) return std::nullopt;
    if (cp >= 0xD800 && cp <= 0xDFFF) return std::nullopt;
    i += len;
    ++n;
  }
  return n;
}

std::uint64_t char_count(std::string_view s) {
  auto n = count_scalars(s);
  if (!n) throw FormatError("malformed UTF-8");
  return *n;
}

char32_t decode_next(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : 4;
  char32_t cp = b0 & (len == 2 ? 0x1F : len == 3 ? 0x0F : 0x07);
  for (std::size_t k = 1; k < len && pos + k < s.size(); ++k) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[pos + k]) & 0x3F);
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string_view truncate_scalars(std::string_view s,
                                  std::uint64_t max_scalars) {
  std::size_t pos = 0;
  for (std::uint64_t n = 0; n < max_scalars && pos < s.size(); ++n) {
    decode_next(s, pos);
  }
  return s.substr(0, pos);
}

namespace {

bool odd(char32_t c) { return (c & 1) != 0; }

char32_t fold(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c < 0x100) return c;
  // Latin Extended-A: alternating upper/lower pairs with two phase shifts.
  if (c <= 0x012F) return odd(c) ? c : c + 1;
  if (c >= 0x0132 && c <= 0x0137) return odd(c) ? c : c + 1;
  if (c >= 0x0139 && c <= 0x0148) return odd(c) ? c + 1 : c;
  if (c >= 0x014A && c <= 0x0177) return odd(c) ? c : c + 1;
  if (c == 0x0178) return 0x00FF;
  if (c >= 0x0179 && c <= 0x017E) return odd(c) ? c + 1 : c;
  // Greek.
  if (c == 0x0386) return 0x03AC;
  if (c >= 0x0388 && c <= 0x038A) return c + 37;
  if (c == 0x038C) return 0x03CC;
  if (c == 0x038E || c == 0x038F) return c + 63;
  if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 32;
  if (c == 0x03C2) return 0x03C3;  // final sigma
  // Cyrillic.
  if (c >= 0x0400 && c <= 0x040F) return c + 80;
  if (c >= 0x0410 && c <= 0x042F) return c + 32;
  if (c >= 0x0460 && c <= 0x0481) return odd(c) ? c : c + 1;
  if (c >= 0x048A && c <= 0x04BF) return odd(c) ? c : c + 1;
  if (c == 0x04C0) return 0x04CF;
  if (c >= 0x04C1 && c <= 0x04CE) return odd(c) ? c + 1 : c;
  if (c >= 0x04D0 && c <= 0x052F) return odd(c) ? c : c + 1;
  // Armenian.
  if (c >= 0x0531 && c <= 0x0556) return c + 48;
  return c;
}

struct Range {
  char32_t lo;
  char32_t hi;
  Script script;
};

// Sorted, non-overlapping. Anything not covered is Script::kOther.
constexpr Range kRanges[] = {
    {0x0000, 0x0040, Script::kCommon},
    {0x0041, 0x005A, Script::kLatin},
    {0x005B, 0x0060, Script::kCommon},
    {0x0061, 0x007A, Script::kLatin},
    {0x007B, 0x00A9, Script::kCommon},
    {0x00AA, 0x00AA, Script::kLatin},
    {0x00AB, 0x00B9, Script::kCommon},
    {0x00BA, 0x00BA, Script::kLatin},
    {0x00BB, 0x00BF, Script::kCommon},
    {0x00C0, 0x00D6, Script::kLatin},
    {0x00D7, 0x00D7, Script::kCommon},
    {0x00D8, 0x00F6, Script::kLatin},
    {0x00F7, 0x00F7, Script::kCommon},
    {0x00F8, 0x02AF, Script::kLatin},
    {0x02B0, 0x036F, Script::kCommon},  // modifiers, combining marks
    {0x0370, 0x03FF, Script::kGreek},
    {0x0400, 0x052F, Script::kCyrillic},
    {0x0530, 0x058F, Script::kArmenian},
    {0x0590, 0x05FF, Script::kHebrew},
    {0x0600, 0x06FF, Script::kArabic},
    {0x0750, 0x077F, Script::kArabic},
    {0x08A0, 0x08FF, Script::kArabic},
    {0x0900, 0x097F, Script::kDevanagari},
    {0x0980, 0x09FF, Script::kBengali},
    {0x0A00, 0x0A7F, Script::kGurmukhi},
    {0x0A80, 0x0AFF, Script::kGujarati},
    {0x0B80, 0x0BFF, Script::kTamil},
    {0x0C00, 0x0C7F, Script::kTelugu},
    {0x0C80, 0x0CFF, Script::kKannada},
    {0x0D00, 0x0D7F, Script::kMalayalam},
    {0x0D80, 0x0DFF, Script::kSinhala},
    {0x0E00, 0x0E7F, Script::kThai},
    {0x0E80, 0x0EFF, Script::kLao},
    {0x1000, 0x109F, Script::kMyanmar},
    {0x10A0, 0x10FF, Script::kGeorgian},
    {0x1100, 0x11FF, Script::kHangul},
    {0x1200, 0x139F, Script::kEthiopic},
    {0x1780, 0x17FF, Script::kKhmer},
    {0x1C80, 0x1C8F, Script::kCyrillic},
    {0x1C90, 0x1CBF, Script::kGeorgian},
    {0x1E00, 0x1EFF, Script::kLatin},
    {0x1F00, 0x1FFF, Script::kGreek},
    {0x2000, 0x206F, Script::kCommon},
    {0x20A0, 0x20CF, Script::kCommon},
    {0x2C60, 0x2C7F, Script::kLatin},
    {0x2DE0, 0x2DFF, Script::kCyrillic},
    {0x2E80, 0x2FDF, Script::kHan},
    {0x3000, 0x303F, Script::kCommon},
    {0x3040, 0x30FF, Script::kKana},
    {0x3130, 0x318F, Script::kHangul},
    {0x31F0, 0x31FF, Script::kKana},
    {0x3400, 0x4DBF, Script::kHan},
    {0x4E00, 0x9FFF, Script::kHan},
    {0xA640, 0xA69F, Script::kCyrillic},
    {0xA720, 0xA7FF, Script::kLatin},
    {0xAC00, 0xD7AF, Script::kHangul},
    {0xF900, 0xFAFF, Script::kHan},
    {0xFB50, 0xFDFF, Script::kArabic},
    {0xFE70, 0xFEFF, Script::kArabic},
    {0xFF01, 0xFF20, Script::kCommon},
    {0xFF21, 0xFF3A, Script::kLatin},
    {0xFF3B, 0xFF40, Script::kCommon},
    {0xFF41, 0xFF5A, Script::kLatin},
    {0xFF66, 0xFF9F, Script::kKana},
    {0x20000, 0x3134F, Script::kHan},
};

}  // namespace

std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto b = static_cast<unsigned char>(s[pos]);
    if (b < 0x80) {
      out.push_back(static_cast<char>(fold(b)));
      ++pos;
      continue;
    }
    append_utf8(out, fold(decode_next(s, pos)));
  }
  return out;
}

Script classify(char32_t cp) {
  std::size_t lo = 0;
  std::size_t hi = std::size(kRanges);
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cp < kRanges[mid].lo) {
      hi = mid;
    } else if (cp > kRanges[mid].hi) {
      lo = mid + 1;
    } else {
      return kRanges[mid].script;
    }
  }
  return Script::kOther;
}

std::string_view script_name(Script s) {
  static constexpr std::array<std::string_view, kScriptCount> kNames = {
      "Latin",    "Cyrillic", "Greek",   "Armenian",  "Hebrew",
      "Arabic",   "Devanagari", "Bengali", "Gurmukhi", "Gujarati",
      "Tamil",    "Telugu",   "Kannada", "Malayalam", "Sinhala",
      "Thai",     "Lao",      "Myanmar", "Georgian",  "Ethiopic",
      "Khmer",    "Hangul",   "Kana",    "Han",       "Common",
      "Other",
  };
  return kNames[static_cast<int>(s)];
}

}  // namespace unimix::text
