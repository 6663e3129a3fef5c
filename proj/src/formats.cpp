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

#include "unimix/formats.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "unimix/error.hpp"
#include "unimix/records.hpp"

namespace unimix {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStatsSchema = "# unimix-stats v1";
constexpr std::string_view kPlanSchema = "# unimix-plan v1";
constexpr std::string_view kReportSchema = "unimix-filter-report v1";

// Splits into lines, dropping a trailing '\r'.
std::vector<std::string_view> lines_of(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find('\n', pos);
    if (end == std::string_view::npos) end = s.size();
    std::string_view line = s.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = end + 1;
  }
  return out;
}

std::string line_error(std::size_t index, const std::string& what) {
  return "line " + std::to_string(index + 1) + ": " + what;
}

void expect_schema(const std::vector<std::string_view>& lines, std::string_view schema) {
  if (lines.empty() || lines.front() != schema) {
    throw FormatError("missing schema header '" + std::string(schema) + "'");
  }
}

}  // namespace

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = line.find('\t', pos);
    if (end == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
}

std::string Provenance::comment_lines() const {
  std::string out = "# tool: ";
  out += kToolName;
  out += ' ';
  out += kToolVersion;
  out += '\n';
  if (!args.empty()) {
    out += "# args: ";
    for (char c : args) out += (c == '\n' ? ' ' : c);
    out += '\n';
  }
  return out;
}

std::string format_stats(const CorpusStats& stats, const Provenance& prov) {
  std::string out(kStatsSchema);
  out += '\n';
  out += prov.comment_lines();
  out += "lang\tchar_count\tdoc_count\n";
  for (const auto& e : stats.canonical()) {
    out += e.lang + '\t' + std::to_string(e.char_count) + '\t' + std::to_string(e.doc_count) + '\n';
  }
  return out;
}

CorpusStats parse_stats(std::string_view contents) {
  const auto lines = lines_of(contents);
  expect_schema(lines, kStatsSchema);
  CorpusStats stats;
  std::set<std::string> seen;
  bool header = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "lang\tchar_count\tdoc_count") {
        throw FormatError(line_error(i, "expected column header 'lang, char_count, doc_count'"));
      }
      header = true;
      continue;
    }
    const auto cols = split_tabs(line);
    if (cols.size() != 3) throw FormatError(line_error(i, "expected 3 columns"));
    std::string lang(cols[0]);
    if (lang.empty()) throw FormatError(line_error(i, "empty language code"));
    if (!seen.insert(lang).second) throw FormatError(line_error(i, "duplicate language '" + lang + "'"));
    try {
      stats.add(lang, parse_u64(cols[1]), parse_u64(cols[2]));
    } catch (const FormatError& e) {
      throw FormatError(line_error(i, e.what()));
    }
  }
  if (!header) throw FormatError("missing column header");
  return stats;
}

void save_stats(const fs::path& path, const CorpusStats& stats, const Provenance& prov) {
  write_file_atomic(path, format_stats(stats, prov));
}

CorpusStats load_stats(const fs::path& path) {
  try {
    return parse_stats(read_file(path));
  } catch (const FormatError& e) {
    throw IoError(path.string(), e.what(), 0, ErrorCode::kFormat);
  }
}

std::string format_filter_report(const FilterReport& report, const FilterConfig& cfg,
                                 const Provenance& prov) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["schema"] = kReportSchema;
  j["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
  j["args"] = prov.args;
  j["config"] = {{"confidence_threshold", cfg.confidence_threshold},
                 {"soft_pass_rate", cfg.soft_pass_rate},
                 {"prune_threshold", cfg.prune_threshold},
                 {"seed", cfg.seed}};
  auto counts = [](const LanguageFilterCounts& c) {
    ojson o;
    o["docs_seen"] = c.docs_seen;
    o["docs_retained"] = c.docs_retained();
    o["docs_dropped_langid"] = c.docs_dropped_langid;
    o["docs_dropped_blocklist"] = c.docs_dropped_blocklist;
    o["docs_soft_passed"] = c.docs_soft_passed;
    o["chars_seen"] = c.chars_seen;
    o["chars_dropped"] = c.chars_dropped;
    const double docs = static_cast<double>(c.docs_seen);
    const double chars = static_cast<double>(c.chars_seen);
    o["doc_drop_fraction"] =
        c.docs_seen ? static_cast<double>(c.docs_dropped_langid + c.docs_dropped_blocklist) / docs : 0.0;
    o["char_drop_fraction"] = c.chars_seen ? static_cast<double>(c.chars_dropped) / chars : 0.0;
    return o;
  };
  j["totals"] = counts(report.totals());
  ojson langs = ojson::object();
  for (const auto& [lang, c] : report.languages) langs[lang] = counts(c);
  j["languages"] = langs;
  ojson pruned = ojson::object();
  for (const auto& [lang, terms] : report.pruned_terms) pruned[lang] = terms;
  j["pruned_terms"] = pruned;
  j["prune_skipped"] = report.prune_skipped;
  return j.dump(2) + "\n";
}

void save_filter_report(const fs::path& path, const FilterReport& report,
                        const FilterConfig& cfg, const Provenance& prov) {
  write_file_atomic(path, format_filter_report(report, cfg, prov));
}

std::map<std::string, std::vector<std::string>> parse_blocklists(std::string_view contents) {
  std::map<std::string, std::vector<std::string>> out;
  const auto lines = lines_of(contents);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw FormatError(line_error(i, "expected 'lang<TAB>term'"));
    }
    out[std::string(cols[0])].emplace_back(cols[1]);
  }
  return out;
}

std::map<std::string, std::vector<std::string>> load_blocklists(const fs::path& path) {
  try {
    return parse_blocklists(read_file(path));
  } catch (const FormatError& e) {
    throw IoError(path.string(), e.what(), 0, ErrorCode::kFormat);
  }
}

namespace {

std::string policy_kind_name(SamplingPolicy::Kind k) {
  switch (k) {
    case SamplingPolicy::Kind::kTemperature: return "temperature";
    case SamplingPolicy::Kind::kUniMax: return "unimax";
    case SamplingPolicy::Kind::kProportional: return "proportional";
    case SamplingPolicy::Kind::kUniform: return "uniform";
  }
  return "?";
}

}  // namespace

std::string format_plan(const AllocationPlan& plan, const Provenance& prov) {
  std::string out(kPlanSchema);
  out += '\n';
  out += prov.comment_lines();
  const auto& p = plan.policy;
  out += "@policy\t" + policy_kind_name(p.kind()) + '\n';
  if (p.kind() == SamplingPolicy::Kind::kTemperature) out += "@tau\t" + format_double(p.tau()) + '\n';
  if (p.is_unimax()) out += "@max_epochs\t" + format_double(p.max_epochs()) + '\n';
  out += "@budget_chars\t" + format_double(plan.budget_chars) + '\n';
  out += "@unspent_chars\t" + format_double(plan.unspent_chars) + '\n';
  for (const auto& w : plan.warnings) out += "@warning\t" + w + '\n';
  out += "lang\tchar_count\tallocated_chars\trate\tepochs\tcapped\n";
  for (const auto& a : plan.entries) {
    out += a.lang + '\t' + std::to_string(a.char_count) + '\t' + format_double(a.allocated_chars) +
           '\t' + format_double(a.rate) + '\t' + format_double(a.epochs) + '\t' +
           (a.capped ? "1" : "0") + '\n';
  }
  return out;
}

AllocationPlan parse_plan(std::string_view contents) {
  const auto lines = lines_of(contents);
  expect_schema(lines, kPlanSchema);
  std::map<std::string, std::string> header;
  AllocationPlan plan;
  bool columns = false;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    try {
      if (line.front() == '@') {
        if (columns) throw FormatError("header row after column header");
        const auto cols = split_tabs(line.substr(1));
        if (cols.size() != 2) throw FormatError("expected '@key<TAB>value'");
        if (cols[0] == "warning") {
          plan.warnings.emplace_back(cols[1]);
        } else {
          header[std::string(cols[0])] = std::string(cols[1]);
        }
        continue;
      }
      if (!columns) {
        if (line != "lang\tchar_count\tallocated_chars\trate\tepochs\tcapped") {
          throw FormatError("unexpected column header");
        }
        columns = true;
        continue;
      }
      const auto cols = split_tabs(line);
      if (cols.size() != 6) throw FormatError("expected 6 columns");
      Allocation a;
      a.lang = std::string(cols[0]);
      if (a.lang.empty()) throw FormatError("empty language code");
      if (!seen.insert(a.lang).second) throw FormatError("duplicate language '" + a.lang + "'");
      a.char_count = parse_u64(cols[1]);
      a.allocated_chars = parse_double(cols[2]);
      a.rate = parse_double(cols[3]);
      a.epochs = parse_double(cols[4]);
      if (cols[5] != "0" && cols[5] != "1") throw FormatError("capped must be 0 or 1");
      a.capped = cols[5] == "1";
      plan.entries.push_back(std::move(a));
    } catch (const FormatError& e) {
      throw FormatError(line_error(i, e.what()));
    }
  }
  if (!columns) throw FormatError("missing column header");
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw FormatError("missing header '@" + key + "'");
    return it->second;
  };
  const std::string& kind = get("policy");
  try {
    if (kind == "temperature") {
      plan.policy = SamplingPolicy::temperature(parse_double(get("tau")));
    } else if (kind == "unimax") {
      plan.policy = SamplingPolicy::unimax(parse_double(get("max_epochs")));
    } else if (kind == "proportional") {
      plan.policy = SamplingPolicy::proportional();
    } else if (kind == "uniform") {
      plan.policy = SamplingPolicy::uniform();
    } else {
      throw FormatError("unknown policy '" + kind + "'");
    }
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  plan.budget_chars = parse_double(get("budget_chars"));
  plan.unspent_chars = parse_double(get("unspent_chars"));
  double sum = 0;
  for (const auto& a : plan.entries) {
    if (!(a.rate >= 0.0) || !(a.allocated_chars >= 0.0)) throw FormatError("negative rate or allocation");
    sum += a.rate;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) throw FormatError("plan rates do not sum to 1");
  return plan;
}

void save_plan(const fs::path& path, const AllocationPlan& plan, const Provenance& prov) {
  write_file_atomic(path, format_plan(plan, prov));
}

AllocationPlan load_plan(const fs::path& path) {
  try {
    return parse_plan(read_file(path));
  } catch (const FormatError& e) {
    throw IoError(path.string(), e.what(), 0, ErrorCode::kFormat);
  }
}

}  // namespace unimix
