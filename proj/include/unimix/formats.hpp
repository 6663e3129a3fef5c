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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "unimix/corpus_stats.hpp"
#include "unimix/sampling_policy.hpp"

namespace unimix {

inline constexpr std::string_view kToolName = "unimix";
inline constexpr std::string_view kToolVersion = "0.3.0";

// Provenance echoed into every output file.
struct Provenance {
  std::string args;  // full flag echo; may be empty

  // "# tool: unimix <version>\n# args: <args>\n"
  std::string comment_lines() const;
};

// Stats file: tab-separated lang, char_count, doc_count.
std::string format_stats(const CorpusStats& stats, const Provenance& prov);
CorpusStats parse_stats(std::string_view contents);
void save_stats(const std::filesystem::path& path, const CorpusStats& stats,
                const Provenance& prov);
CorpusStats load_stats(const std::filesystem::path& path);

std::string format_filter_report(const FilterReport& report, const FilterConfig& cfg,
                                 const Provenance& prov);
void save_filter_report(const std::filesystem::path& path, const FilterReport& report,
                        const FilterConfig& cfg, const Provenance& prov);

// Blocklists: one "lang<TAB>term" per line; '#' starts a comment line.
std::map<std::string, std::vector<std::string>> parse_blocklists(std::string_view contents);
std::map<std::string, std::vector<std::string>> load_blocklists(
    const std::filesystem::path& path);

// Plan file: "@key<TAB>value" header rows then one row per language.
std::string format_plan(const AllocationPlan& plan, const Provenance& prov);
AllocationPlan parse_plan(std::string_view contents);
void save_plan(const std::filesystem::path& path, const AllocationPlan& plan,
               const Provenance& prov);
AllocationPlan load_plan(const std::filesystem::path& path);

// Splits on '\t'.
std::vector<std::string_view> split_tabs(std::string_view line);

}  // namespace unimix
