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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "unimix/formats.hpp"
#include "unimix/records.hpp"
#include "unimix/sampling_policy.hpp"
#include "unimix/text.hpp"

namespace unimix {

inline constexpr double kDefaultRatioClip = 1000.0;

// Native (L1) speaker counts and the world population they are measured
// against.
struct SpeakerTable {
  double world_population = 0;
  std::map<std::string, double> native_speakers;
  std::string source;

  // Throws InvalidArgument if a count is negative or exceeds the world.
  void validate() const;

  // "# unimix-speakers v1", optional "# source: ..." line,
  // "world_population<TAB>w", then "lang<TAB>native_speakers" rows.
  static SpeakerTable parse(std::string_view contents);
  static SpeakerTable load(const std::filesystem::path& path);
};

enum class Representation { kUnder, kUnit, kOver };
const char* to_string(Representation r);

struct RatioValue {
  double value = 0;
  bool clipped = false;
};

// R = (w * t_l) / (s_l * sum t). Zero-speaker languages with t_l > 0 get
// `clip` and the clipped flag.
RatioValue representation_ratio(const Distribution& dist, const SpeakerTable& speakers,
                                const std::string& lang, double clip = kDefaultRatioClip);

struct RepresentationEntry {
  std::string lang;
  double usage_rate = 0;
  double speaker_rate = 0;
  RatioValue ratio;
  Representation classification = Representation::kUnit;
};

struct RepresentationReport {
  std::vector<RepresentationEntry> entries;  // sorted by lang
  std::vector<std::string> unmatched;        // in dist, absent from speakers
};

// One entry per speaker-table language; languages missing from `dist` have
// R = 0.
RepresentationReport representation_report(const Distribution& dist,
                                            const SpeakerTable& speakers,
                                            double clip = kDefaultRatioClip);

std::string format_representation_csv(const RepresentationReport& report,
                                      const Provenance& prov);

struct CurvePoint {
  std::size_t rank = 0;  // 1-based by descending char count
  std::string lang;
  std::uint64_t char_count = 0;
  double value = 0;
};

struct RateCurve {
  std::string name;    // plan label
  std::string metric;  // "rate" or "epochs"
  std::vector<CurvePoint> points;
};

// Per plan, a rank-vs-rate and a rank-vs-epochs curve. Throws
// InvalidArgument if the plans were built over different corpora.
std::vector<RateCurve> rate_epoch_curves(const std::vector<AllocationPlan>& plans,
                                         const std::vector<std::string>& names);

// CSV with columns plan,rank,lang,char_count,value for curves of `metric`.
std::string format_curves_csv(const std::vector<RateCurve>& curves, const std::string& metric,
                              const Provenance& prov);

// Character-script fractions of a sampled corpus; a character-level proxy
// for the script makeup of a vocabulary trained on that sample.
struct ScriptComposition {
  std::array<std::uint64_t, text::kScriptCount> counts{};
  std::uint64_t total = 0;

  void add(std::string_view utf8);
  double fraction(text::Script s) const;
};

ScriptComposition script_composition(
    const std::map<std::string, std::vector<DocumentRecord>>& docs, const Distribution& dist,
    std::uint64_t sample_chars, std::uint64_t seed);

struct ShardSet;
ScriptComposition script_composition(const ShardSet& shards, const Distribution& dist,
                                     std::uint64_t sample_chars, std::uint64_t seed,
                                     unsigned threads = 1);

std::string format_script_csv(const ScriptComposition& c, const Provenance& prov);

struct ComparisonRow {
  std::string policy;
  std::string lang;
  std::uint64_t char_count = 0;
  double rate = 0;
  double epochs = 0;
  bool capped = false;
};

struct PolicySummary {
  std::string policy;
  double entropy = 0;
  double max_epochs = 0;
  // Languages sharing the top rate within 1e-6 relative.
  std::size_t head_uniform_count = 0;
};

struct PolicyComparison {
  std::vector<ComparisonRow> rows;
  std::vector<PolicySummary> summaries;
};

PolicyComparison compare_policies(const CorpusStats& stats,
                                  const std::vector<SamplingPolicy>& policies, double budget);

std::string format_comparison_csv(const PolicyComparison& c, const Provenance& prov);

}  // namespace unimix
