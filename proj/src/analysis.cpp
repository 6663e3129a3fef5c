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

#include "unimix/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "unimix/error.hpp"
#include "unimix/mixer.hpp"

namespace unimix {

namespace fs = std::filesystem;

void SpeakerTable::validate() const {
  if (!(world_population > 0)) throw InvalidArgument("world population must be positive");
  if (native_speakers.empty()) throw InvalidArgument("empty speaker table");
  for (const auto& [lang, s] : native_speakers) {
    if (!(s >= 0)) throw InvalidArgument("negative speaker count for '" + lang + "'");
    if (s > world_population) {
      throw InvalidArgument("speaker count for '" + lang + "' exceeds the world population");
    }
  }
}

SpeakerTable SpeakerTable::parse(std::string_view contents) {
  SpeakerTable t;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool schema = false;
  bool world = false;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fail = [&](const std::string& what) {
      return FormatError("line " + std::to_string(line_no) + ": " + what);
    };
    if (!schema) {
      if (line != "# unimix-speakers v1") throw fail("missing schema header '# unimix-speakers v1'");
      schema = true;
      continue;
    }
    if (line.rfind("# source:", 0) == 0) {
      std::string_view s = line.substr(9);
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      t.source = std::string(s);
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0].empty()) throw fail("expected two tab-separated columns");
    try {
      if (cols[0] == "world_population") {
        t.world_population = parse_double(cols[1]);
        world = true;
      } else if (cols[0] == "lang") {
        continue;  // column header
      } else {
        if (!t.native_speakers.emplace(std::string(cols[0]), parse_double(cols[1])).second) {
          throw FormatError("duplicate language '" + std::string(cols[0]) + "'");
        }
      }
    } catch (const FormatError& e) {
      throw fail(e.what());
    }
  }
  if (!world) throw FormatError("missing world_population row");
  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return t;
}

SpeakerTable SpeakerTable::load(const fs::path& path) {
  try {
    return parse(read_file(path));
  } catch (const FormatError& e) {
    throw IoError(path.string(), e.what(), 0, ErrorCode::kFormat);
  }
}

const char* to_string(Representation r) {
  switch (r) {
    case Representation::kUnder: return "underrepresented";
    case Representation::kUnit: return "unit";
    case Representation::kOver: return "overrepresented";
  }
  return "?";
}

namespace {

Representation classify_ratio(double r) {
  if (std::abs(r - 1.0) <= 1e-9) return Representation::kUnit;
  return r > 1.0 ? Representation::kOver : Representation::kUnder;
}

}  // namespace

RatioValue representation_ratio(const Distribution& dist, const SpeakerTable& speakers,
                                const std::string& lang, double clip) {
  auto t = dist.probs().find(lang);
  if (t == dist.probs().end()) throw InvalidArgument("'" + lang + "' missing from distribution");
  auto s = speakers.native_speakers.find(lang);
  if (s == speakers.native_speakers.end()) {
    throw InvalidArgument("'" + lang + "' missing from speaker table");
  }
  const double total = dist.sum();
  if (!(total > 0)) throw EmptyCorpus("distribution has no mass");
  if (t->second == 0) return {0.0, false};
  if (s->second == 0) return {clip, true};
  return {(speakers.world_population * t->second) / (s->second * total), false};
}

RepresentationReport representation_report(const Distribution& dist,
                                            const SpeakerTable& speakers, double clip) {
  speakers.validate();
  RepresentationReport report;
  const double total = dist.sum();
  for (const auto& [lang, s] : speakers.native_speakers) {
    RepresentationEntry e;
    e.lang = lang;
    e.speaker_rate = s / speakers.world_population;
    if (dist.probs().count(lang)) {
      e.usage_rate = dist[lang] / total;
      e.ratio = representation_ratio(dist, speakers, lang, clip);
    }
    e.classification = classify_ratio(e.ratio.value);
    report.entries.push_back(std::move(e));
  }
  for (const auto& [lang, p] : dist.probs()) {
    if (p > 0 && !speakers.native_speakers.count(lang)) report.unmatched.push_back(lang);
  }
  return report;
}

std::string format_representation_csv(const RepresentationReport& report,
                                      const Provenance& prov) {
  std::string out = "# unimix-representation v1\n" + prov.comment_lines();
  out += "lang,usage_rate,speaker_rate,ratio,classification,clipped\n";
  for (const auto& e : report.entries) {
    out += e.lang + ',' + format_double(e.usage_rate) + ',' + format_double(e.speaker_rate) + ',' +
           format_double(e.ratio.value) + ',' + to_string(e.classification) + ',' +
           (e.ratio.clipped ? "1" : "0") + '\n';
  }
  for (const auto& lang : report.unmatched) out += "# unmatched: " + lang + '\n';
  return out;
}

std::vector<RateCurve> rate_epoch_curves(const std::vector<AllocationPlan>& plans,
                                         const std::vector<std::string>& names) {
  if (plans.size() != names.size()) throw InvalidArgument("one name per plan required");
  if (plans.empty()) throw InvalidArgument("no plans given");
  const CorpusStats corpus = plans.front().corpus();
  for (std::size_t i = 1; i < plans.size(); ++i) {
    if (!(plans[i].corpus() == corpus)) {
      throw InvalidArgument("plan '" + names[i] + "' was built over a different corpus than '" +
                            names[0] + "'");
    }
  }
  std::vector<RateCurve> out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    RateCurve rate{names[i], "rate", {}};
    RateCurve epochs{names[i], "epochs", {}};
    std::size_t rank = 0;
    for (const auto& e : corpus.canonical()) {
      const Allocation* a = plans[i].find(e.lang);
      ++rank;
      rate.points.push_back({rank, e.lang, e.char_count, a ? a->rate : 0.0});
      epochs.points.push_back({rank, e.lang, e.char_count, a ? a->epochs : 0.0});
    }
    out.push_back(std::move(rate));
    out.push_back(std::move(epochs));
  }
  return out;
}

std::string format_curves_csv(const std::vector<RateCurve>& curves, const std::string& metric,
                              const Provenance& prov) {
  std::string out = "# unimix-curves v1\n" + prov.comment_lines();
  out += "# metric: " + metric + "\n";
  out += "plan,rank,lang,char_count,value\n";
  for (const auto& c : curves) {
    if (c.metric != metric) continue;
    for (const auto& p : c.points) {
      out += c.name + ',' + std::to_string(p.rank) + ',' + p.lang + ',' +
             std::to_string(p.char_count) + ',' + format_double(p.value) + '\n';
    }
  }
  return out;
}

void ScriptComposition::add(std::string_view utf8) {
  std::size_t pos = 0;
  while (pos < utf8.size()) {
    ++counts[static_cast<int>(text::classify(text::decode_next(utf8, pos)))];
    ++total;
  }
}

double ScriptComposition::fraction(text::Script s) const {
  return total ? static_cast<double>(counts[static_cast<int>(s)]) / static_cast<double>(total) : 0.0;
}

ScriptComposition script_composition(
    const std::map<std::string, std::vector<DocumentRecord>>& docs, const Distribution& dist,
    std::uint64_t sample_chars, std::uint64_t seed) {
  SourceOptions opts;
  opts.seed = seed;
  opts.shuffle = true;
  ScriptComposition c;
  for (const auto& d : sample_vocab_documents(docs, dist, sample_chars, opts)) c.add(d.text);
  if (c.total == 0) throw EmptyCorpus("empty sample");
  return c;
}

ScriptComposition script_composition(const ShardSet& shards, const Distribution& dist,
                                     std::uint64_t sample_chars, std::uint64_t seed,
                                     unsigned threads) {
  SourceOptions opts;
  opts.seed = seed;
  opts.shuffle = true;
  ScriptComposition c;
  sample_vocab_shards(shards, dist, sample_chars, opts, threads,
                      [&](const DocumentRecord& d) { c.add(d.text); });
  if (c.total == 0) throw EmptyCorpus("empty sample");
  return c;
}

std::string format_script_csv(const ScriptComposition& c, const Provenance& prov) {
  std::string out = "# unimix-scripts v1\n" + prov.comment_lines();
  out += "script,chars,fraction\n";
  for (int i = 0; i < text::kScriptCount; ++i) {
    const auto s = static_cast<text::Script>(i);
    out += std::string(text::script_name(s)) + ',' + std::to_string(c.counts[i]) + ',' +
           format_double(c.fraction(s)) + '\n';
  }
  return out;
}

PolicyComparison compare_policies(const CorpusStats& stats,
                                  const std::vector<SamplingPolicy>& policies, double budget) {
  PolicyComparison out;
  for (const auto& policy : policies) {
    const AllocationPlan plan = plan_from_policy(stats, policy, budget);
    const std::string name = policy.describe();
    double top = 0;
    for (const auto& a : plan.entries) {
      out.rows.push_back({name, a.lang, a.char_count, a.rate, a.epochs, a.capped});
      top = std::max(top, a.rate);
    }
    PolicySummary s;
    s.policy = name;
    s.entropy = plan.distribution().entropy();
    s.max_epochs = plan.max_epochs();
    for (const auto& a : plan.entries) {
      if (std::abs(a.rate - top) <= kShareTolerance * top) ++s.head_uniform_count;
    }
    out.summaries.push_back(std::move(s));
  }
  return out;
}

std::string format_comparison_csv(const PolicyComparison& c, const Provenance& prov) {
  std::string out = "# unimix-comparison v1\n" + prov.comment_lines();
  for (const auto& s : c.summaries) {
    out += "# summary: " + s.policy + " entropy=" + format_double(s.entropy) +
           " max_epochs=" + format_double(s.max_epochs) +
           " head_uniform=" + std::to_string(s.head_uniform_count) + '\n';
  }
  out += "policy,lang,char_count,rate,epochs,capped\n";
  for (const auto& r : c.rows) {
    out += '"' + r.policy + "\"," + r.lang + ',' + std::to_string(r.char_count) + ',' +
           format_double(r.rate) + ',' + format_double(r.epochs) + ',' + (r.capped ? "1" : "0") +
           '\n';
  }
  return out;
}

}  // namespace unimix
