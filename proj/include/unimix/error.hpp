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
#include <stdexcept>
#include <string>

namespace unimix {

// Error categories map one-to-one onto the C API status codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kEmptyCorpus = 2,
  kIo = 3,
  kFormat = 4,
  kConfig = 5,
  kInternal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

class EmptyCorpus : public Error {
 public:
  explicit EmptyCorpus(const std::string& what = "empty corpus")
      : Error(ErrorCode::kEmptyCorpus, what) {}
};

// Failure reading or writing a file. Carries the file and, when known, the
// 1-based line number. Parse failures located in a file use kFormat.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what,
          std::uint64_t line = 0, ErrorCode code = ErrorCode::kIo)
      : Error(code, Format(path, what, line)),
        path_(path),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::uint64_t line() const { return line_; }

 private:
  static std::string Format(const std::string& path, const std::string& what,
                            std::uint64_t line) {
    std::string out = path;
    if (line != 0) out += ":" + std::to_string(line);
    return out + ": " + what;
  }

  std::string path_;
  std::uint64_t line_;
};

// Malformed record or file contents.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorCode::kFormat, what) {}
};

// Inputs that are individually valid but do not fit together (plan vs shards).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, what) {}
};

}  // namespace unimix
