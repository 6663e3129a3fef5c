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

// unimix command-line tool: corpus statistics, sampling plans, mixing and
// analysis. Talks to the library only through its C interface.

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "unimix/unimix.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Raised once a library call fails; carries the exit code.
struct Failure {
  int code;
};

int exit_code_for(unimix_status s) {
  switch (s) {
    case UNIMIX_OK: return kExitOk;
    case UNIMIX_ERR_INVALID_ARGUMENT:
    case UNIMIX_ERR_EMPTY_CORPUS:
    case UNIMIX_ERR_CONFIG: return kExitValidation;
    default: return kExitRuntime;
  }
}

void check(unimix_status s) {
  if (s == UNIMIX_OK) return;
  std::fprintf(stderr, "unimix: %s: %s\n", unimix_status_name(s), unimix_last_error());
  throw Failure{exit_code_for(s)};
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::fprintf(stderr, "unimix: %s\n", msg.c_str());
  throw Failure{kExitValidation};
}

void print_warning(const char* msg, void*) { std::fprintf(stderr, "warning: %s\n", msg); }

// Flags that only steer execution; leaving them out of the echo keeps a
// resumed run's outputs identical to an uninterrupted one.
const std::set<std::string> kRunControl = {"--resume", "--checkpoint-every", "--stop-after",
                                           "--threads", "--config"};

std::string echo_of(const CLI::App& sub) {
  std::string out = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (opt->count() == 0 || name.empty() || name == "--help" || kRunControl.count(name)) continue;
    out += ' ' + name;
    if (opt->get_expected_min() == 0) continue;  // plain flag
    for (const auto& r : opt->results()) out += ' ' + r;
  }
  return out;
}

// Accepts integers and exact floating forms such as 5.8e11.
std::uint64_t parse_count(const std::string& s, const char* what) {
  if (s.empty()) usage_error(std::string(what) + ": empty value");
  if (s.find_first_not_of("0123456789") == std::string::npos) {
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) usage_error(std::string(what) + ": value out of range");
    return v;
  }
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(d) || d < 0 || d != std::floor(d) ||
      d >= 18446744073709551616.0) {
    usage_error(std::string(what) + ": expected a non-negative integer, got '" + s + "'");
  }
  return static_cast<std::uint64_t>(d);
}

double parse_temperature(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return INFINITY;
  double tau = 0;
  if (unimix_temperature_preset(s.c_str(), &tau) == UNIMIX_OK) return tau;
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') usage_error("bad temperature '" + s + "'");
  return d;
}

struct BudgetFlags {
  std::string chars;
  std::uint64_t steps = 0;
  std::uint64_t batch = 0;
  std::uint64_t chunk_tokens = 0;
  std::uint64_t chars_per_token = 4;

  void add_to(CLI::App* app) {
    app->add_option("--budget-chars", chars, "Character budget C");
    auto* steps_opt = app->add_option("--steps", steps, "Training steps");
    auto* batch_opt = app->add_option("--batch", batch, "Sequences per batch");
    auto* chunk_opt = app->add_option("--chunk-tokens", chunk_tokens, "Tokens per sequence");
    app->add_option("--chars-per-token", chars_per_token, "Characters per token")
        ->capture_default_str();
    steps_opt->needs(batch_opt)->needs(chunk_opt);
    batch_opt->needs(steps_opt);
    chunk_opt->needs(steps_opt);
  }

  bool given() const { return !chars.empty() || steps > 0; }

  // 0 when no budget flags were given.
  double resolve() const {
    if (!chars.empty() && steps > 0) usage_error("give either --budget-chars or --steps, not both");
    if (!given()) return 0;
    unimix_budget b;
    unimix_budget_init(&b);
    if (!chars.empty()) {
      b.chars = parse_count(chars, "--budget-chars");
      if (b.chars == 0) usage_error("--budget-chars must be positive");
    } else {
      b.steps = steps;
      b.batch_sequences = batch;
      b.tokens_per_sequence = chunk_tokens;
      b.chars_per_token = chars_per_token;
    }
    std::uint64_t out = 0;
    check(unimix_budget_chars(&b, &out));
    return static_cast<double>(out);
  }
};

struct StatsHandle {
  unimix_stats* p = nullptr;
  ~StatsHandle() { unimix_stats_free(p); }
};
struct PlanHandle {
  unimix_plan* p = nullptr;
  PlanHandle() = default;
  PlanHandle(PlanHandle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~PlanHandle() { unimix_plan_free(p); }
};
struct ReportHandle {
  unimix_filter_report* p = nullptr;
  ~ReportHandle() { unimix_filter_report_free(p); }
};

// "temperature=3.33", "tau=3.33", "preset=mt5", "unimax=1", "proportional",
// "uniform".
unimix_policy parse_policy_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  const std::string key = spec.substr(0, eq);
  const std::string val = eq == std::string::npos ? "" : spec.substr(eq + 1);
  unimix_policy p{UNIMIX_POLICY_TEMPERATURE, 1.0, 0.0};
  if ((key == "temperature" || key == "tau" || key == "preset") && !val.empty()) {
    p.temperature = parse_temperature(val);
  } else if (key == "unimax" && !val.empty()) {
    p.kind = UNIMIX_POLICY_UNIMAX;
    char* end = nullptr;
    p.max_epochs = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0') usage_error("bad epoch cap in '" + spec + "'");
  } else if (spec == "proportional") {
    p.kind = UNIMIX_POLICY_PROPORTIONAL;
  } else if (spec == "uniform") {
    p.kind = UNIMIX_POLICY_UNIFORM;
  } else {
    usage_error("unrecognized policy '" + spec +
                "' (use temperature=T, preset=NAME, unimax=N, proportional or uniform)");
  }
  return p;
}

struct MixFlags {
  std::string plan;
  std::string shards;
  std::string out;
  std::uint64_t seed = 0;
  bool shuffle = false;
  std::uint64_t max_doc_chars = 0;
  std::uint64_t checkpoint_every = 0;
  std::uint64_t stop_after = 0;
  std::string resume;
  unsigned threads = 1;

  void add_common(CLI::App* app) {
    app->add_option("--plan", plan, "Plan file from `unimix plan`")->required();
    app->add_option("--shards", shards, "Shard manifest (lang<TAB>path rows)")->required();
    app->add_option("--seed", seed, "Seed for shuffling")->capture_default_str();
    app->add_flag("--shuffle", shuffle, "Seeded per-epoch document order within each language");
    app->add_option("--max-doc-chars", max_doc_chars, "Truncate longer documents (0: off)");
    app->add_option("--checkpoint-every", checkpoint_every,
                    "Documents between state snapshots (0: only at the end)");
    app->add_option("--stop-after", stop_after, "Stop after this many documents in total");
    app->add_option("--resume", resume, "State snapshot to continue from");
    app->add_option("--threads", threads, "Shard scanning threads")
        ->envname("UNIMIX_THREADS")
        ->check(CLI::PositiveNumber);
  }

  unimix_mix_options options() const {
    unimix_mix_options o;
    unimix_mix_options_init(&o);
    o.seed = seed;
    o.shuffle = shuffle ? 1 : 0;
    o.max_doc_chars = max_doc_chars;
    o.threads = threads;
    o.checkpoint_every = checkpoint_every;
    o.stop_after_docs = stop_after;
    o.resume_state = resume.empty() ? nullptr : resume.c_str();
    return o;
  }
};

PlanHandle load_plan(const std::string& path) {
  PlanHandle h;
  check(unimix_plan_load(path.c_str(), &h.p));
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unimix: language sampling plans and mixtures for multilingual corpora"};
  app.set_version_flag("--version", std::string("unimix ") + unimix_version());
  app.set_config("--config", "", "Read flags from a TOML/INI file");
  app.require_subcommand(1);
  app.fallthrough();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Filter shards and count characters per language");
  std::vector<std::string> stats_in;
  std::string stats_out;
  std::string stats_report;
  unimix_filter_options fopts;
  unimix_filter_options_init(&fopts);
  std::string blocklist;
  bool no_prune = false;
  stats_cmd->add_option("--in", stats_in, "Shard files or directories")->required();
  stats_cmd->add_option("--out", stats_out, "Stats TSV to write")->required();
  stats_cmd->add_option("--report", stats_report,
                        "Filter report JSON (default: <out>.report.json)");
  stats_cmd->add_option("--confidence", fopts.confidence_threshold, "Language-ID threshold")
      ->capture_default_str();
  stats_cmd->add_option("--soft-pass", fopts.soft_pass_rate,
                        "Probability a blocklisted document is kept")
      ->capture_default_str();
  stats_cmd->add_option("--prune-threshold", fopts.prune_threshold,
                        "Prune terms matching more than this fraction of a language's documents")
      ->capture_default_str();
  stats_cmd->add_option("--blocklist", blocklist, "Blocklist file (lang<TAB>term rows)");
  stats_cmd->add_flag("--no-prune", no_prune, "Keep overly common blocklist terms");
  stats_cmd->add_option("--seed", fopts.seed, "Seed for soft-pass draws")->capture_default_str();
  stats_cmd->add_option("--threads", fopts.threads, "Worker threads")
      ->envname("UNIMIX_THREADS")
      ->check(CLI::PositiveNumber);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Compute a per-language sampling plan");
  std::string plan_stats;
  std::string plan_out;
  std::string plan_tau;
  std::string plan_preset;
  double plan_epochs = 0;
  bool plan_prop = false;
  bool plan_uniform = false;
  BudgetFlags plan_budget;
  plan_cmd->add_option("--stats", plan_stats, "Stats TSV")->required();
  plan_cmd->add_option("--out", plan_out, "Plan TSV to write")->required();
  auto* tau_opt = plan_cmd->add_option("--temperature", plan_tau,
                                       "Temperature tau, 'inf', or a preset name");
  auto* preset_opt = plan_cmd->add_option("--preset", plan_preset,
                                          "mbert, xlm, xlm-r, mt5 or xlm-e");
  auto* epochs_opt = plan_cmd->add_option("--unimax-epochs", plan_epochs,
                                          "UniMax with this per-language epoch cap");
  auto* prop_opt = plan_cmd->add_flag("--proportional", plan_prop, "Natural proportions");
  auto* uni_opt = plan_cmd->add_flag("--uniform", plan_uniform, "Uniform over languages");
  plan_budget.add_to(plan_cmd);
  for (auto* a : {tau_opt, preset_opt, epochs_opt, prop_opt, uni_opt}) {
    for (auto* b : {tau_opt, preset_opt, epochs_opt, prop_opt, uni_opt}) {
      if (a != b) a->excludes(b);
    }
  }

  // mix
  auto* mix_cmd = app.add_subcommand("mix", "Write a training mixture following a plan");
  MixFlags mix;
  std::uint64_t shard_bytes = 256ull << 20;
  mix.add_common(mix_cmd);
  mix_cmd->add_option("--out", mix.out, "Output directory")->required();
  mix_cmd->add_option("--shard-bytes", shard_bytes, "Output shard size")->capture_default_str();

  // vocab-corpus
  auto* vocab_cmd =
      app.add_subcommand("vocab-corpus", "Sample a plain-text corpus for vocabulary training");
  MixFlags vocab;
  std::string vocab_target;
  vocab.add_common(vocab_cmd);
  vocab_cmd->add_option("--out", vocab.out, "Text file to write")->required();
  vocab_cmd->add_option("--target-chars", vocab_target, "Characters to sample")->required();

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Rate/epoch curves and representation ratios");
  std::vector<std::string> an_plans;
  std::vector<std::string> an_names;
  std::string an_speakers;
  double an_clip = 1000.0;
  std::string an_out;
  std::string an_shards;
  std::string an_sample = "10000000";
  std::uint64_t an_seed = 0;
  analyze_cmd->add_option("--plan", an_plans, "Plan files (repeatable)")->required();
  analyze_cmd->add_option("--name", an_names, "Label per plan (default: file stem)");
  analyze_cmd->add_option("--speakers", an_speakers, "Native-speaker table");
  analyze_cmd->add_option("--clip", an_clip, "Value reported for zero-speaker languages")
      ->capture_default_str();
  analyze_cmd->add_option("--out", an_out, "Output directory")->required();
  analyze_cmd->add_option("--scripts-shards", an_shards,
                          "Shard manifest; also report script composition per plan");
  analyze_cmd->add_option("--sample-chars", an_sample, "Sample size for script composition")
      ->capture_default_str();
  analyze_cmd->add_option("--seed", an_seed, "Sampling seed")->capture_default_str();

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Compare several policies on one corpus");
  std::string cmp_stats;
  std::vector<std::string> cmp_policies;
  std::string cmp_out;
  BudgetFlags cmp_budget;
  compare_cmd->add_option("--stats", cmp_stats, "Stats TSV")->required();
  compare_cmd->add_option("--policy", cmp_policies,
                          "temperature=T, preset=NAME, unimax=N, proportional, uniform")
      ->required();
  compare_cmd->add_option("--out", cmp_out, "Comparison CSV to write")->required();
  cmp_budget.add_to(compare_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  unimix_set_log_callback(print_warning, nullptr);

  try {
    if (stats_cmd->parsed()) {
      const std::string echo = echo_of(*stats_cmd);
      std::vector<const char*> inputs;
      for (const auto& s : stats_in) inputs.push_back(s.c_str());
      fopts.blocklist_path = blocklist.empty() ? nullptr : blocklist.c_str();
      fopts.prune_blocklist = no_prune ? 0 : 1;
      StatsHandle stats;
      ReportHandle report;
      check(unimix_stats_ingest(inputs.data(), inputs.size(), &fopts, &stats.p, &report.p));
      check(unimix_stats_save(stats.p, stats_out.c_str(), echo.c_str()));
      const std::string rpath = stats_report.empty() ? stats_out + ".report.json" : stats_report;
      check(unimix_filter_report_save(report.p, rpath.c_str(), echo.c_str()));
      std::uint64_t seen = 0, langid = 0, block = 0, soft = 0;
      check(unimix_filter_report_totals(report.p, &seen, &langid, &block, &soft));
      std::printf("%zu languages, %llu characters kept; %llu docs seen, %llu dropped (langid), "
                  "%llu dropped (blocklist), %llu soft-passed\n",
                  unimix_stats_size(stats.p),
                  static_cast<unsigned long long>(unimix_stats_total_chars(stats.p)),
                  static_cast<unsigned long long>(seen), static_cast<unsigned long long>(langid),
                  static_cast<unsigned long long>(block), static_cast<unsigned long long>(soft));
    } else if (plan_cmd->parsed()) {
      const std::string echo = echo_of(*plan_cmd);
      unimix_policy policy{UNIMIX_POLICY_TEMPERATURE, 1.0, 0.0};
      if (!plan_tau.empty()) {
        policy.temperature = parse_temperature(plan_tau);
      } else if (!plan_preset.empty()) {
        check(unimix_temperature_preset(plan_preset.c_str(), &policy.temperature));
      } else if (epochs_opt->count()) {
        policy.kind = UNIMIX_POLICY_UNIMAX;
        policy.max_epochs = plan_epochs;
      } else if (plan_prop) {
        policy.kind = UNIMIX_POLICY_PROPORTIONAL;
      } else if (plan_uniform) {
        policy.kind = UNIMIX_POLICY_UNIFORM;
      } else {
        usage_error("choose a policy: --temperature, --preset, --unimax-epochs, "
                    "--proportional or --uniform");
      }
      StatsHandle stats;
      check(unimix_stats_load(plan_stats.c_str(), &stats.p));
      double budget = plan_budget.resolve();
      if (budget == 0) {
        if (policy.kind == UNIMIX_POLICY_UNIMAX) {
          usage_error("UniMax needs a budget: --budget-chars or --steps/--batch/--chunk-tokens");
        }
        // Rates do not depend on the budget; epochs are then per corpus pass.
        budget = static_cast<double>(unimix_stats_total_chars(stats.p));
      }
      PlanHandle plan;
      check(unimix_plan_create(stats.p, &policy, budget, &plan.p));
      check(unimix_plan_save(plan.p, plan_out.c_str(), echo.c_str()));
      std::printf("%zu languages, budget %.0f chars, unspent %.0f chars\n",
                  unimix_plan_size(plan.p), unimix_plan_budget_chars(plan.p),
                  unimix_plan_unspent_chars(plan.p));
    } else if (mix_cmd->parsed()) {
      const std::string echo = echo_of(*mix_cmd);
      PlanHandle plan = load_plan(mix.plan);
      unimix_mix_options o = mix.options();
      o.shard_bytes = shard_bytes;
      int complete = 0;
      check(unimix_mix_run(plan.p, mix.shards.c_str(), mix.out.c_str(), &o, echo.c_str(),
                           &complete));
      if (!complete) {
        std::printf("stopped early; resume with --resume %s\n",
                    (std::filesystem::path(mix.out) / "mix.state.json").string().c_str());
      }
    } else if (vocab_cmd->parsed()) {
      const std::string echo = echo_of(*vocab_cmd);
      PlanHandle plan = load_plan(vocab.plan);
      const unimix_mix_options o = vocab.options();
      int complete = 0;
      check(unimix_vocab_corpus(plan.p, vocab.shards.c_str(),
                                parse_count(vocab_target, "--target-chars"), vocab.out.c_str(),
                                &o, echo.c_str(), &complete));
      if (!complete) {
        std::printf("stopped early; resume with --resume %s.state.json\n", vocab.out.c_str());
      }
    } else if (analyze_cmd->parsed()) {
      const std::string echo = echo_of(*analyze_cmd);
      if (!an_names.empty() && an_names.size() != an_plans.size()) {
        usage_error("give one --name per --plan");
      }
      std::vector<PlanHandle> plans;
      std::vector<const unimix_plan*> ptrs;
      std::vector<std::string> names;
      for (std::size_t i = 0; i < an_plans.size(); ++i) {
        plans.push_back(load_plan(an_plans[i]));
        ptrs.push_back(plans.back().p);
        names.push_back(an_names.empty() ? std::filesystem::path(an_plans[i]).stem().string()
                                         : an_names[i]);
      }
      if (std::set<std::string>(names.begin(), names.end()).size() != names.size()) {
        usage_error("plan names must be distinct; use --name");
      }
      std::vector<const char*> cnames;
      for (const auto& n : names) cnames.push_back(n.c_str());
      check(unimix_analyze(ptrs.data(), cnames.data(), ptrs.size(),
                           an_speakers.empty() ? nullptr : an_speakers.c_str(), an_clip,
                           an_out.c_str(), echo.c_str()));
      if (!an_shards.empty()) {
        const std::uint64_t n = parse_count(an_sample, "--sample-chars");
        for (std::size_t i = 0; i < ptrs.size(); ++i) {
          const auto out = std::filesystem::path(an_out) / ("scripts_" + names[i] + ".csv");
          check(unimix_script_composition(ptrs[i], an_shards.c_str(), n, an_seed,
                                          out.string().c_str(), echo.c_str()));
        }
      }
    } else if (compare_cmd->parsed()) {
      const std::string echo = echo_of(*compare_cmd);
      std::vector<unimix_policy> policies;
      for (const auto& s : cmp_policies) policies.push_back(parse_policy_spec(s));
      StatsHandle stats;
      check(unimix_stats_load(cmp_stats.c_str(), &stats.p));
      double budget = cmp_budget.resolve();
      if (budget == 0) {
        for (const auto& p : policies) {
          if (p.kind == UNIMIX_POLICY_UNIMAX) usage_error("UniMax policies need a budget");
        }
        budget = static_cast<double>(unimix_stats_total_chars(stats.p));
      }
      check(unimix_compare(stats.p, policies.data(), policies.size(), budget, cmp_out.c_str(),
                           echo.c_str()));
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitOk;
}
