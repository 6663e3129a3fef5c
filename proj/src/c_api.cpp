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

#include "unimix/unimix.h"

#include <cmath>
#include <filesystem>
#include <mutex>
#include <new>
#include <string>
#include <vector>

#include "unimix/analysis.hpp"
#include "unimix/corpus_stats.hpp"
#include "unimix/error.hpp"
#include "unimix/formats.hpp"
#include "unimix/mixer.hpp"
#include "unimix/sampling_policy.hpp"

namespace fs = std::filesystem;

struct unimix_stats {
  unimix::CorpusStats stats;
  std::vector<unimix::LanguageStats> canonical;

  void refresh() { canonical = stats.canonical(); }
};

struct unimix_filter_report {
  unimix::FilterReport report;
  unimix::FilterConfig cfg;
};

struct unimix_plan {
  unimix::AllocationPlan plan;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_log_mu;
unimix_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

void log_warning(const std::string& msg) {
  std::lock_guard lock(g_log_mu);
  if (g_log_fn) g_log_fn(msg.c_str(), g_log_user);
}

unimix_status fail(unimix_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <class F>
unimix_status guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return UNIMIX_OK;
  } catch (const unimix::Error& e) {
    return fail(static_cast<unimix_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(UNIMIX_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(UNIMIX_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(UNIMIX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UNIMIX_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw unimix::InvalidArgument(std::string(name) + " must not be null");
}

unimix::Provenance prov_of(const char* args) { return {args ? args : ""}; }

unimix::SamplingPolicy to_policy(const unimix_policy& p) {
  switch (p.kind) {
    case UNIMIX_POLICY_TEMPERATURE: return unimix::SamplingPolicy::temperature(p.temperature);
    case UNIMIX_POLICY_UNIMAX: return unimix::SamplingPolicy::unimax(p.max_epochs);
    case UNIMIX_POLICY_PROPORTIONAL: return unimix::SamplingPolicy::proportional();
    case UNIMIX_POLICY_UNIFORM: return unimix::SamplingPolicy::uniform();
  }
  throw unimix::InvalidArgument("unknown policy kind");
}

unimix::MixerConfig to_mixer_config(const unimix_mix_options* o) {
  unimix_mix_options d;
  unimix_mix_options_init(&d);
  if (!o) o = &d;
  unimix::MixerConfig cfg;
  cfg.seed = o->seed;
  cfg.shuffle = o->shuffle != 0;
  if (o->max_doc_chars) cfg.max_doc_chars = o->max_doc_chars;
  cfg.shard_bytes = o->shard_bytes;
  cfg.threads = o->threads;
  cfg.checkpoint_every = o->checkpoint_every;
  cfg.stop_after_docs = o->stop_after_docs;
  if (o->resume_state && *o->resume_state) cfg.resume = fs::path(o->resume_state);
  return cfg;
}

void emit_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) log_warning(w);
}

}  // namespace

extern "C" {

const char* unimix_version(void) {
  static const std::string v(unimix::kToolVersion);
  return v.c_str();
}

const char* unimix_last_error(void) { return g_last_error.c_str(); }

const char* unimix_status_name(unimix_status status) {
  switch (status) {
    case UNIMIX_OK: return "ok";
    case UNIMIX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case UNIMIX_ERR_EMPTY_CORPUS: return "empty corpus";
    case UNIMIX_ERR_IO: return "i/o error";
    case UNIMIX_ERR_FORMAT: return "format error";
    case UNIMIX_ERR_CONFIG: return "configuration error";
    case UNIMIX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void unimix_set_log_callback(unimix_log_fn fn, void* user) {
  std::lock_guard lock(g_log_mu);
  g_log_fn = fn;
  g_log_user = user;
}

void unimix_filter_options_init(unimix_filter_options* opts) {
  if (!opts) return;
  const unimix::FilterConfig d;
  opts->confidence_threshold = d.confidence_threshold;
  opts->soft_pass_rate = d.soft_pass_rate;
  opts->prune_threshold = d.prune_threshold;
  opts->seed = d.seed;
  opts->blocklist_path = nullptr;
  opts->prune_blocklist = 1;
  opts->threads = 1;
}

unimix_status unimix_stats_ingest(const char* const* inputs, size_t n_inputs,
                                  const unimix_filter_options* opts, unimix_stats** out_stats,
                                  unimix_filter_report** out_report) {
  return guard([&] {
    require(out_stats, "out_stats");
    if (n_inputs == 0) throw unimix::InvalidArgument("no inputs given");
    require(inputs, "inputs");
    unimix_filter_options o;
    unimix_filter_options_init(&o);
    if (opts) o = *opts;

    unimix::FilterConfig cfg;
    cfg.confidence_threshold = o.confidence_threshold;
    cfg.soft_pass_rate = o.soft_pass_rate;
    cfg.prune_threshold = o.prune_threshold;
    cfg.seed = o.seed;
    if (o.blocklist_path && *o.blocklist_path) cfg.blocklists = unimix::load_blocklists(o.blocklist_path);
    cfg.validate();

    std::vector<fs::path> raw;
    for (size_t i = 0; i < n_inputs; ++i) {
      require(inputs[i], "input path");
      raw.emplace_back(inputs[i]);
    }
    const auto files = unimix::expand_inputs(raw);
    if (files.empty()) throw unimix::EmptyCorpus("no shard files found in the inputs");

    unimix::PruneResult pruned;
    if (o.prune_blocklist && !cfg.blocklists.empty()) {
      pruned = unimix::prune_blocklist_shards(files, cfg, o.threads);
      cfg.blocklists = pruned.blocklists;
    }
    auto result = unimix::ingest_shards(files, cfg, o.threads);
    result.report.pruned_terms = std::move(pruned.pruned_terms);
    result.report.prune_skipped = std::move(pruned.skipped);
    for (const auto& lang : result.report.prune_skipped) {
      log_warning("'" + lang + "': blocklist given but no documents; pruning skipped");
    }

    auto stats = std::make_unique<unimix_stats>();
    stats->stats = std::move(result.stats);
    stats->refresh();
    if (out_report) {
      auto report = std::make_unique<unimix_filter_report>();
      report->report = std::move(result.report);
      report->cfg = std::move(cfg);
      *out_report = report.release();
    }
    *out_stats = stats.release();
  });
}

unimix_status unimix_stats_create(unimix_stats** out) {
  return guard([&] {
    require(out, "out");
    *out = new unimix_stats();
  });
}

unimix_status unimix_stats_add(unimix_stats* stats, const char* lang, uint64_t chars,
                               uint64_t docs) {
  return guard([&] {
    require(stats, "stats");
    require(lang, "lang");
    if (!*lang) throw unimix::InvalidArgument("empty language code");
    stats->stats.add(lang, chars, docs);
    stats->refresh();
  });
}

unimix_status unimix_stats_merge(const unimix_stats* a, const unimix_stats* b,
                                 unimix_stats** out) {
  return guard([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    auto m = std::make_unique<unimix_stats>();
    m->stats = unimix::merge_stats(a->stats, b->stats);
    m->refresh();
    *out = m.release();
  });
}

unimix_status unimix_stats_load(const char* path, unimix_stats** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    auto s = std::make_unique<unimix_stats>();
    s->stats = unimix::load_stats(path);
    s->refresh();
    *out = s.release();
  });
}

unimix_status unimix_stats_save(const unimix_stats* stats, const char* path,
                                const char* args_echo) {
  return guard([&] {
    require(stats, "stats");
    require(path, "path");
    unimix::save_stats(path, stats->stats, prov_of(args_echo));
  });
}

size_t unimix_stats_size(const unimix_stats* stats) { return stats ? stats->canonical.size() : 0; }

uint64_t unimix_stats_total_chars(const unimix_stats* stats) {
  return stats ? stats->stats.total_chars() : 0;
}

unimix_status unimix_stats_entry(const unimix_stats* stats, size_t index, const char** lang,
                                 uint64_t* chars, uint64_t* docs) {
  return guard([&] {
    require(stats, "stats");
    if (index >= stats->canonical.size()) throw unimix::InvalidArgument("index out of range");
    const auto& e = stats->canonical[index];
    if (lang) *lang = e.lang.c_str();
    if (chars) *chars = e.char_count;
    if (docs) *docs = e.doc_count;
  });
}

void unimix_stats_free(unimix_stats* stats) { delete stats; }

unimix_status unimix_filter_report_save(const unimix_filter_report* report, const char* path,
                                        const char* args_echo) {
  return guard([&] {
    require(report, "report");
    require(path, "path");
    unimix::save_filter_report(path, report->report, report->cfg, prov_of(args_echo));
  });
}

unimix_status unimix_filter_report_totals(const unimix_filter_report* report,
                                          uint64_t* docs_seen, uint64_t* docs_dropped_langid,
                                          uint64_t* docs_dropped_blocklist,
                                          uint64_t* docs_soft_passed) {
  return guard([&] {
    require(report, "report");
    const auto t = report->report.totals();
    if (docs_seen) *docs_seen = t.docs_seen;
    if (docs_dropped_langid) *docs_dropped_langid = t.docs_dropped_langid;
    if (docs_dropped_blocklist) *docs_dropped_blocklist = t.docs_dropped_blocklist;
    if (docs_soft_passed) *docs_soft_passed = t.docs_soft_passed;
  });
}

void unimix_filter_report_free(unimix_filter_report* report) { delete report; }

unimix_status unimix_temperature_preset(const char* name, double* tau) {
  return guard([&] {
    require(name, "name");
    require(tau, "tau");
    const auto t = unimix::temperature_preset(name);
    if (!t) throw unimix::InvalidArgument(std::string("unknown temperature preset '") + name + "'");
    *tau = *t;
  });
}

void unimix_budget_init(unimix_budget* budget) {
  if (!budget) return;
  *budget = unimix_budget{};
  budget->chars_per_token = unimix::TokenSchedule{}.chars_per_token;
}

unimix_status unimix_budget_chars(const unimix_budget* budget, uint64_t* out) {
  return guard([&] {
    require(budget, "budget");
    require(out, "out");
    if (budget->chars) {
      *out = unimix::budget_chars(unimix::BudgetSpec::chars(budget->chars));
      return;
    }
    unimix::TokenSchedule s;
    s.steps = budget->steps;
    s.batch_sequences = budget->batch_sequences;
    s.tokens_per_sequence = budget->tokens_per_sequence;
    s.chars_per_token = budget->chars_per_token;
    *out = unimix::budget_chars(unimix::BudgetSpec::schedule(s));
  });
}

unimix_status unimix_plan_create(const unimix_stats* stats, const unimix_policy* policy,
                                 double budget_chars, unimix_plan** out) {
  return guard([&] {
    require(stats, "stats");
    require(policy, "policy");
    require(out, "out");
    auto p = std::make_unique<unimix_plan>();
    p->plan = unimix::plan_from_policy(stats->stats, to_policy(*policy), budget_chars);
    emit_warnings(p->plan.warnings);
    *out = p.release();
  });
}

unimix_status unimix_plan_load(const char* path, unimix_plan** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    auto p = std::make_unique<unimix_plan>();
    p->plan = unimix::load_plan(path);
    *out = p.release();
  });
}

unimix_status unimix_plan_save(const unimix_plan* plan, const char* path, const char* args_echo) {
  return guard([&] {
    require(plan, "plan");
    require(path, "path");
    unimix::save_plan(path, plan->plan, prov_of(args_echo));
  });
}

size_t unimix_plan_size(const unimix_plan* plan) { return plan ? plan->plan.entries.size() : 0; }

unimix_status unimix_plan_entry(const unimix_plan* plan, size_t index, unimix_allocation* out) {
  return guard([&] {
    require(plan, "plan");
    require(out, "out");
    if (index >= plan->plan.entries.size()) throw unimix::InvalidArgument("index out of range");
    const auto& a = plan->plan.entries[index];
    out->lang = a.lang.c_str();
    out->char_count = a.char_count;
    out->allocated_chars = a.allocated_chars;
    out->rate = a.rate;
    out->epochs = a.epochs;
    out->capped = a.capped ? 1 : 0;
  });
}

double unimix_plan_budget_chars(const unimix_plan* plan) {
  return plan ? plan->plan.budget_chars : 0.0;
}

double unimix_plan_unspent_chars(const unimix_plan* plan) {
  return plan ? plan->plan.unspent_chars : 0.0;
}

size_t unimix_plan_warning_count(const unimix_plan* plan) {
  return plan ? plan->plan.warnings.size() : 0;
}

const char* unimix_plan_warning(const unimix_plan* plan, size_t index) {
  if (!plan || index >= plan->plan.warnings.size()) return nullptr;
  return plan->plan.warnings[index].c_str();
}

void unimix_plan_free(unimix_plan* plan) { delete plan; }

void unimix_mix_options_init(unimix_mix_options* opts) {
  if (!opts) return;
  const unimix::MixerConfig d;
  opts->seed = d.seed;
  opts->shuffle = d.shuffle ? 1 : 0;
  opts->max_doc_chars = 0;
  opts->shard_bytes = d.shard_bytes;
  opts->threads = d.threads;
  opts->checkpoint_every = d.checkpoint_every;
  opts->stop_after_docs = d.stop_after_docs;
  opts->resume_state = nullptr;
}

unimix_status unimix_mix_run(const unimix_plan* plan, const char* shard_manifest,
                             const char* out_dir, const unimix_mix_options* opts,
                             const char* args_echo, int* complete) {
  return guard([&] {
    require(plan, "plan");
    require(shard_manifest, "shard_manifest");
    require(out_dir, "out_dir");
    const auto shards = unimix::ShardSet::load(shard_manifest);
    const auto r = unimix::run_mix(shards, plan->plan, to_mixer_config(opts), out_dir,
                                   args_echo ? args_echo : "");
    if (r.complete) emit_warnings(r.manifest.warnings);
    if (complete) *complete = r.complete ? 1 : 0;
  });
}

unimix_status unimix_vocab_corpus(const unimix_plan* plan, const char* shard_manifest,
                                  uint64_t target_chars, const char* out_path,
                                  const unimix_mix_options* opts, const char* args_echo,
                                  int* complete) {
  return guard([&] {
    require(plan, "plan");
    require(shard_manifest, "shard_manifest");
    require(out_path, "out_path");
    if (target_chars == 0) throw unimix::InvalidArgument("target character count must be positive");
    const auto shards = unimix::ShardSet::load(shard_manifest);
    const auto r = unimix::sample_vocab_corpus(shards, plan->plan.distribution(), target_chars,
                                               to_mixer_config(opts), out_path,
                                               args_echo ? args_echo : "");
    if (complete) *complete = r.complete ? 1 : 0;
  });
}

unimix_status unimix_analyze(const unimix_plan* const* plans, const char* const* names,
                             size_t n_plans, const char* speakers_path, double ratio_clip,
                             const char* out_dir, const char* args_echo) {
  return guard([&] {
    require(plans, "plans");
    require(names, "names");
    require(out_dir, "out_dir");
    if (!(ratio_clip > 0)) throw unimix::InvalidArgument("ratio clip must be positive");
    std::vector<unimix::AllocationPlan> ps;
    std::vector<std::string> ns;
    for (size_t i = 0; i < n_plans; ++i) {
      require(plans[i], "plan");
      require(names[i], "name");
      ps.push_back(plans[i]->plan);
      ns.emplace_back(names[i]);
    }
    const auto prov = prov_of(args_echo);
    const auto curves = unimix::rate_epoch_curves(ps, ns);
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw unimix::IoError(dir.string(), "cannot create directory: " + ec.message());
    unimix::write_file_atomic(dir / "curves_rate.csv", unimix::format_curves_csv(curves, "rate", prov));
    unimix::write_file_atomic(dir / "curves_epochs.csv",
                              unimix::format_curves_csv(curves, "epochs", prov));
    if (!speakers_path || !*speakers_path) {
      log_warning("no speaker table given; representation report skipped");
      return;
    }
    const auto speakers = unimix::SpeakerTable::load(speakers_path);
    for (size_t i = 0; i < ps.size(); ++i) {
      const auto report = unimix::representation_report(ps[i].distribution(), speakers, ratio_clip);
      if (!report.unmatched.empty()) {
        log_warning("plan '" + ns[i] + "': " + std::to_string(report.unmatched.size()) +
                    " languages have no speaker count and are omitted from the representation "
                    "report (listed in its trailing comments)");
      }
      unimix::write_file_atomic(dir / ("representation_" + ns[i] + ".csv"),
                                unimix::format_representation_csv(report, prov));
    }
  });
}

unimix_status unimix_representation_ratio(const unimix_plan* plan, const char* speakers_path,
                                          const char* lang, double ratio_clip, double* ratio,
                                          int* clipped) {
  return guard([&] {
    require(plan, "plan");
    require(speakers_path, "speakers_path");
    require(lang, "lang");
    require(ratio, "ratio");
    const auto speakers = unimix::SpeakerTable::load(speakers_path);
    const auto dist = plan->plan.distribution();
    // Languages outside the plan are simply not represented.
    if (!dist.probs().count(lang)) {
      if (!speakers.native_speakers.count(lang)) {
        throw unimix::InvalidArgument(std::string("'") + lang + "' missing from speaker table");
      }
      *ratio = 0;
      if (clipped) *clipped = 0;
      return;
    }
    const auto r = unimix::representation_ratio(dist, speakers, lang, ratio_clip);
    *ratio = r.value;
    if (clipped) *clipped = r.clipped ? 1 : 0;
  });
}

unimix_status unimix_script_composition(const unimix_plan* plan, const char* shard_manifest,
                                        uint64_t sample_chars, uint64_t seed,
                                        const char* out_path, const char* args_echo) {
  return guard([&] {
    require(plan, "plan");
    require(shard_manifest, "shard_manifest");
    require(out_path, "out_path");
    if (sample_chars == 0) throw unimix::InvalidArgument("sample size must be positive");
    const auto shards = unimix::ShardSet::load(shard_manifest);
    const auto c =
        unimix::script_composition(shards, plan->plan.distribution(), sample_chars, seed);
    unimix::write_file_atomic(out_path, unimix::format_script_csv(c, prov_of(args_echo)));
  });
}

unimix_status unimix_compare(const unimix_stats* stats, const unimix_policy* policies,
                             size_t n_policies, double budget_chars, const char* out_path,
                             const char* args_echo) {
  return guard([&] {
    require(stats, "stats");
    require(policies, "policies");
    require(out_path, "out_path");
    if (n_policies == 0) throw unimix::InvalidArgument("no policies given");
    std::vector<unimix::SamplingPolicy> ps;
    for (size_t i = 0; i < n_policies; ++i) ps.push_back(to_policy(policies[i]));
    const auto c = unimix::compare_policies(stats->stats, ps, budget_chars);
    unimix::write_file_atomic(out_path, unimix::format_comparison_csv(c, prov_of(args_echo)));
  });
}

}  // extern "C"
