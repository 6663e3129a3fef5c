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

/*
 * C interface to the unimix library.
 *
 * Every fallible call returns a unimix_status; on failure a message is
 * available from unimix_last_error() on the calling thread until the next
 * call. Objects are opaque handles released with the matching *_free
 * function. Strings returned by accessors are owned by the handle.
 */
#ifndef UNIMIX_UNIMIX_H_
#define UNIMIX_UNIMIX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UNIMIX_API __declspec(dllexport)
#else
#define UNIMIX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum unimix_status {
  UNIMIX_OK = 0,
  UNIMIX_ERR_INVALID_ARGUMENT = 1,
  UNIMIX_ERR_EMPTY_CORPUS = 2,
  UNIMIX_ERR_IO = 3,
  UNIMIX_ERR_FORMAT = 4,
  UNIMIX_ERR_CONFIG = 5,
  UNIMIX_ERR_INTERNAL = 6
} unimix_status;

typedef struct unimix_stats unimix_stats;
typedef struct unimix_filter_report unimix_filter_report;
typedef struct unimix_plan unimix_plan;

UNIMIX_API const char* unimix_version(void);
UNIMIX_API const char* unimix_last_error(void);
UNIMIX_API const char* unimix_status_name(unimix_status status);

/* Receives warnings (plan/shard mismatches, skipped report sections). */
typedef void (*unimix_log_fn)(const char* message, void* user);
UNIMIX_API void unimix_set_log_callback(unimix_log_fn fn, void* user);

/* ---- corpus statistics ------------------------------------------------ */

typedef struct unimix_filter_options {
  double confidence_threshold; /* documents below this are dropped; 0.95 */
  double soft_pass_rate;       /* blocklisted documents kept anyway; 0.001 */
  double prune_threshold;      /* terms matching more docs are pruned; 0.10 */
  uint64_t seed;
  const char* blocklist_path;  /* "lang<TAB>term" lines, or NULL */
  int prune_blocklist;         /* nonzero: prune before filtering; 1 */
  unsigned threads;            /* 1 */
} unimix_filter_options;

UNIMIX_API void unimix_filter_options_init(unimix_filter_options* opts);

/* Inputs are shard files or directories of *.jsonl[.gz] shards. */
UNIMIX_API unimix_status unimix_stats_ingest(const char* const* inputs, size_t n_inputs,
                                             const unimix_filter_options* opts,
                                             unimix_stats** out_stats,
                                             unimix_filter_report** out_report);

UNIMIX_API unimix_status unimix_stats_create(unimix_stats** out);
UNIMIX_API unimix_status unimix_stats_add(unimix_stats* stats, const char* lang, uint64_t chars,
                                          uint64_t docs);
UNIMIX_API unimix_status unimix_stats_merge(const unimix_stats* a, const unimix_stats* b,
                                            unimix_stats** out);
UNIMIX_API unimix_status unimix_stats_load(const char* path, unimix_stats** out);
UNIMIX_API unimix_status unimix_stats_save(const unimix_stats* stats, const char* path,
                                           const char* args_echo);
UNIMIX_API size_t unimix_stats_size(const unimix_stats* stats);
UNIMIX_API uint64_t unimix_stats_total_chars(const unimix_stats* stats);
/* Entries in canonical order: descending char count, ties by lang. */
UNIMIX_API unimix_status unimix_stats_entry(const unimix_stats* stats, size_t index,
                                            const char** lang, uint64_t* chars, uint64_t* docs);
UNIMIX_API void unimix_stats_free(unimix_stats* stats);

UNIMIX_API unimix_status unimix_filter_report_save(const unimix_filter_report* report,
                                                   const char* path, const char* args_echo);
UNIMIX_API unimix_status unimix_filter_report_totals(const unimix_filter_report* report,
                                                     uint64_t* docs_seen,
                                                     uint64_t* docs_dropped_langid,
                                                     uint64_t* docs_dropped_blocklist,
                                                     uint64_t* docs_soft_passed);
UNIMIX_API void unimix_filter_report_free(unimix_filter_report* report);

/* ---- policies and plans ---------------------------------------------- */

typedef enum unimix_policy_kind {
  UNIMIX_POLICY_TEMPERATURE = 0,
  UNIMIX_POLICY_UNIMAX = 1,
  UNIMIX_POLICY_PROPORTIONAL = 2,
  UNIMIX_POLICY_UNIFORM = 3
} unimix_policy_kind;

typedef struct unimix_policy {
  unimix_policy_kind kind;
  double temperature; /* TEMPERATURE only; INFINITY means uniform */
  double max_epochs;  /* UNIMAX only */
} unimix_policy;

/* "mbert", "xlm", "xlm-r", "mt5", "xlm-e". */
UNIMIX_API unimix_status unimix_temperature_preset(const char* name, double* tau);

/* chars != 0 gives the budget directly; otherwise it is
 * steps * batch_sequences * tokens_per_sequence * chars_per_token. */
typedef struct unimix_budget {
  uint64_t chars;
  uint64_t steps;
  uint64_t batch_sequences;
  uint64_t tokens_per_sequence;
  uint64_t chars_per_token; /* 4 */
} unimix_budget;

UNIMIX_API void unimix_budget_init(unimix_budget* budget);
UNIMIX_API unimix_status unimix_budget_chars(const unimix_budget* budget, uint64_t* out);

UNIMIX_API unimix_status unimix_plan_create(const unimix_stats* stats,
                                            const unimix_policy* policy, double budget_chars,
                                            unimix_plan** out);
UNIMIX_API unimix_status unimix_plan_load(const char* path, unimix_plan** out);
UNIMIX_API unimix_status unimix_plan_save(const unimix_plan* plan, const char* path,
                                          const char* args_echo);

typedef struct unimix_allocation {
  const char* lang;
  uint64_t char_count;
  double allocated_chars;
  double rate;
  double epochs;
  int capped;
} unimix_allocation;

UNIMIX_API size_t unimix_plan_size(const unimix_plan* plan);
UNIMIX_API unimix_status unimix_plan_entry(const unimix_plan* plan, size_t index,
                                           unimix_allocation* out);
UNIMIX_API double unimix_plan_budget_chars(const unimix_plan* plan);
UNIMIX_API double unimix_plan_unspent_chars(const unimix_plan* plan);
UNIMIX_API size_t unimix_plan_warning_count(const unimix_plan* plan);
UNIMIX_API const char* unimix_plan_warning(const unimix_plan* plan, size_t index);
UNIMIX_API void unimix_plan_free(unimix_plan* plan);

/* ---- mixing ------------------------------------------------------------ */

typedef struct unimix_mix_options {
  uint64_t seed;
  int shuffle;               /* seeded per-epoch order within each language */
  uint64_t max_doc_chars;    /* 0: no truncation */
  uint64_t shard_bytes;      /* output shard size; 256 MiB */
  unsigned threads;          /* shard scanning parallelism */
  uint64_t checkpoint_every; /* documents between state snapshots; 0: end only */
  uint64_t stop_after_docs;  /* 0: run to completion */
  const char* resume_state;  /* state snapshot to continue from, or NULL */
} unimix_mix_options;

UNIMIX_API void unimix_mix_options_init(unimix_mix_options* opts);

/* Writes <out_dir>/mix-NNNNN.jsonl, manifest.json and mix.state.json.
 * *complete is set to 0 when stopped early by stop_after_docs. */
UNIMIX_API unimix_status unimix_mix_run(const unimix_plan* plan, const char* shard_manifest,
                                        const char* out_dir, const unimix_mix_options* opts,
                                        const char* args_echo, int* complete);

/* Samples a plain-text corpus following the plan's rates. */
UNIMIX_API unimix_status unimix_vocab_corpus(const unimix_plan* plan, const char* shard_manifest,
                                             uint64_t target_chars, const char* out_path,
                                             const unimix_mix_options* opts,
                                             const char* args_echo, int* complete);

/* ---- analysis ---------------------------------------------------------- */

/* Writes curves_rate.csv and curves_epochs.csv to out_dir and, when
 * speakers_path is non-NULL, representation_<name>.csv per plan. */
UNIMIX_API unimix_status unimix_analyze(const unimix_plan* const* plans,
                                        const char* const* names, size_t n_plans,
                                        const char* speakers_path, double ratio_clip,
                                        const char* out_dir, const char* args_echo);

UNIMIX_API unimix_status unimix_representation_ratio(const unimix_plan* plan,
                                                     const char* speakers_path, const char* lang,
                                                     double ratio_clip, double* ratio,
                                                     int* clipped);

/* Script fractions of a sample drawn at the plan's rates. */
UNIMIX_API unimix_status unimix_script_composition(const unimix_plan* plan,
                                                   const char* shard_manifest,
                                                   uint64_t sample_chars, uint64_t seed,
                                                   const char* out_path, const char* args_echo);

UNIMIX_API unimix_status unimix_compare(const unimix_stats* stats,
                                        const unimix_policy* policies, size_t n_policies,
                                        double budget_chars, const char* out_path,
                                        const char* args_echo);

#ifdef __cplusplus
}
#endif

#endif /* UNIMIX_UNIMIX_H_ */
