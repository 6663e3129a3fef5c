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

#include "unimix/records.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "unimix/error.hpp"
#include "unimix/text.hpp"

namespace unimix {

namespace fs = std::filesystem;
using json = nlohmann::json;

DocumentRecord parse_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad JSON record: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("record is not a JSON object");

  DocumentRecord doc;
  auto field = [&](const char* name) -> const json& {
    auto it = j.find(name);
    if (it == j.end()) throw FormatError(std::string("missing field '") + name + "'");
    return *it;
  };
  const json& text = field("text");
  const json& lang = field("lang");
  const json& conf = field("confidence");
  if (!text.is_string()) throw FormatError("'text' must be a string");
  if (!lang.is_string()) throw FormatError("'lang' must be a string");
  if (!conf.is_number()) throw FormatError("'confidence' must be a number");
  doc.text = text.get<std::string>();
  doc.lang = lang.get<std::string>();
  doc.langid_confidence = conf.get<double>();
  if (auto it = j.find("source_id"); it != j.end()) {
    if (it->is_string()) {
      doc.source_id = it->get<std::string>();
    } else if (it->is_number_integer()) {
      doc.source_id = it->dump();
    } else if (!it->is_null()) {
      throw FormatError("'source_id' must be a string");
    }
  }
  if (doc.lang.empty()) throw FormatError("empty 'lang'");
  if (!(doc.langid_confidence >= 0.0 && doc.langid_confidence <= 1.0)) {
    throw FormatError("'confidence' outside [0, 1]");
  }
  if (!text::count_scalars(doc.text)) throw FormatError("malformed UTF-8 in 'text'");
  return doc;
}

std::string serialize_record(const DocumentRecord& doc) {
  nlohmann::ordered_json j;
  j["text"] = doc.text;
  j["lang"] = doc.lang;
  j["confidence"] = doc.langid_confidence;
  j["source_id"] = doc.source_id;
  return j.dump();
}

struct LineReader::Impl {
  gzFile file = nullptr;
  ~Impl() {
    if (file != nullptr) gzclose(file);
  }
};

LineReader::LineReader(const fs::path& path)
    : impl_(std::make_unique<Impl>()), path_(path) {
  impl_->file = gzopen(path.c_str(), "rb");
  if (impl_->file == nullptr) throw IoError(path.string(), "cannot open");
  gzbuffer(impl_->file, 1 << 18);
}

LineReader::~LineReader() = default;
LineReader::LineReader(LineReader&&) noexcept = default;
LineReader& LineReader::operator=(LineReader&&) noexcept = default;

bool LineReader::next(std::string& line) {
  line.clear();
  char buf[1 << 16];
  bool got = false;
  while (true) {
    if (gzgets(impl_->file, buf, sizeof buf) == nullptr) {
      int err = 0;
      const char* msg = gzerror(impl_->file, &err);
      if (err != Z_OK && err != Z_BUF_ERROR) {
        throw IoError(path_.string(), std::string("read failed: ") + msg, line_ + 1);
      }
      break;
    }
    got = true;
    const std::size_t n = std::strlen(buf);
    line.append(buf, n);
    if (n > 0 && buf[n - 1] == '\n') break;
  }
  if (!got) return false;
  offset_ += line.size();
  ++line_;
  if (!line.empty() && line.back() == '\n') line.pop_back();
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void LineReader::seek(std::uint64_t offset, std::uint64_t line_number) {
  if (gzseek(impl_->file, static_cast<z_off_t>(offset), SEEK_SET) < 0) {
    throw IoError(path_.string(), "seek to offset " + std::to_string(offset) + " failed");
  }
  offset_ = offset;
  line_ = line_number;
}

bool RecordReader::next(DocumentRecord& doc) {
  while (lines_.next(buffer_)) {
    if (buffer_.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      doc = parse_record(buffer_);
    } catch (const FormatError& e) {
      throw IoError(lines_.path().string(), e.what(), lines_.line_number(), ErrorCode::kFormat);
    }
    return true;
  }
  return false;
}

std::vector<DocumentRecord> read_records(const fs::path& path) {
  RecordReader reader(path);
  std::vector<DocumentRecord> out;
  DocumentRecord doc;
  while (reader.next(doc)) out.push_back(std::move(doc));
  return out;
}

void write_records(const fs::path& path, const std::vector<DocumentRecord>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += serialize_record(d);
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(tmp.string(), "cannot open for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw IoError(tmp.string(), "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError(path.string(), "rename failed: " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorCode::kInternal, "to_chars failed");
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    if (s == "inf" || s == "infinity") return HUGE_VAL;
    throw FormatError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw FormatError("not a non-negative integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace unimix
