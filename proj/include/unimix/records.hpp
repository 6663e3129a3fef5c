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
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace unimix {

// One document of a newline-delimited shard:
//   {"text": ..., "lang": ..., "confidence": ..., "source_id": ...}
struct DocumentRecord {
  std::string text;
  std::string lang;
  double langid_confidence = 1.0;
  std::string source_id;

  // Key for per-document random decisions; falls back to the text when the
  // record carries no source id.
  std::string_view stable_key() const {
    return source_id.empty() ? std::string_view(text)
                             : std::string_view(source_id);
  }
};

// Throws FormatError on bad JSON, missing fields, an empty lang, a
// confidence outside [0, 1] or malformed UTF-8 in `text`.
DocumentRecord parse_record(std::string_view line);

// Compact single-line JSON with fixed field order; no trailing newline.
std::string serialize_record(const DocumentRecord& doc);

// Line reader over plain or gzip-compressed files (detected by content).
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();
  LineReader(LineReader&&) noexcept;
  LineReader& operator=(LineReader&&) noexcept;

  // Reads the next line without its terminator. Returns false at EOF.
  bool next(std::string& line);

  // Line number of the line last returned (1-based).
  std::uint64_t line_number() const { return line_; }
  // Uncompressed byte offset of the next line to be read.
  std::uint64_t offset() const { return offset_; }
  // Repositions to an offset previously obtained from offset().
  void seek(std::uint64_t offset, std::uint64_t line_number);

  const std::filesystem::path& path() const { return path_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::filesystem::path path_;
  std::uint64_t line_ = 0;
  std::uint64_t offset_ = 0;
};

// Parses records from a shard, skipping blank lines. Errors carry the shard
// path and line number.
class RecordReader {
 public:
  explicit RecordReader(const std::filesystem::path& path) : lines_(path) {}

  bool next(DocumentRecord& doc);

  std::uint64_t line_number() const { return lines_.line_number(); }
  std::uint64_t offset() const { return lines_.offset(); }
  void seek(std::uint64_t offset, std::uint64_t line_number) {
    lines_.seek(offset, line_number);
  }
  const std::filesystem::path& path() const { return lines_.path(); }

 private:
  LineReader lines_;
  std::string buffer_;
};

std::vector<DocumentRecord> read_records(const std::filesystem::path& path);

void write_records(const std::filesystem::path& path,
                   const std::vector<DocumentRecord>& docs);

// Writes `contents` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
std::uint64_t parse_u64(std::string_view s);

}  // namespace unimix
