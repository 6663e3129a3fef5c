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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unimix/records.hpp"
#include "unimix/sampling_policy.hpp"

namespace unimix {

// Position of a language stream: `pass` completed passes plus `position`
// documents into the current one. shard/offset/line locate the next record
// for file-backed sequential reads.
struct SourceCursor {
  std::uint64_t pass = 0;
  std::uint64_t position = 0;
  std::uint64_t shard = 0;
  std::uint64_t offset = 0;
  std::uint64_t line = 0;

  bool operator==(const SourceCursor&) const = default;
};

struct SourceOptions {
  std::uint64_t seed = 0;
  bool shuffle = false;                        // seeded per-pass permutation
  std::optional<std::uint64_t> max_doc_chars;  // truncate longer documents
};

// One language's documents, cycled endlessly in canonical order (or a
// seeded permutation per pass when shuffling).
class DocumentSource {
 public:
  virtual ~DocumentSource() = default;

  virtual DocumentRecord next() = 0;
  virtual SourceCursor cursor() const = 0;
  virtual void restore(const SourceCursor& c) = 0;

  // Characters and documents in one full pass, after truncation.
  virtual std::uint64_t total_chars() const = 0;
  virtual std::uint64_t doc_count() const = 0;
  virtual std::uint64_t max_doc_chars() const = 0;
};

std::unique_ptr<DocumentSource> make_memory_source(std::string lang,
                                                   std::vector<DocumentRecord> docs,
                                                   const SourceOptions& opts = {});

// Scans the shards once up front; failures name the shard and line.
std::unique_ptr<DocumentSource> make_shard_source(std::string lang,
                                                  std::vector<std::filesystem::path> shards,
                                                  const SourceOptions& opts = {});

// Per-language shard lists, each path-sorted.
struct ShardSet {
  std::map<std::string, std::vector<std::filesystem::path>> shards;

  void add(const std::string& lang, std::filesystem::path p);
  void canonicalize();

  // Manifest: "# unimix-shards v1", then "lang<TAB>path" rows; relative
  // paths resolve against the manifest's directory.
  static ShardSet load(const std::filesystem::path& manifest);
  static ShardSet parse(std::string_view contents, const std::filesystem::path& base);
};

struct MixTarget {
  std::string lang;
  double rate = 0;          // p_l used by the scheduler
  double target_chars = 0;  // emission stops once reached
  bool capped = false;
};

struct LanguageState {
  std::uint64_t emitted_chars = 0;
  std::uint64_t emitted_docs = 0;
  bool exhausted = false;
  SourceCursor cursor;

  bool operator==(const LanguageState&) const = default;
};

struct OutputPosition {
  std::uint64_t shard = 0;
  std::uint64_t bytes = 0;
  std::uint64_t docs = 0;

  bool operator==(const OutputPosition&) const = default;
};

// Everything needed to continue a run; aligned with the lang-sorted targets.
struct MixerState {
  std::vector<LanguageState> langs;
  std::uint64_t total_emitted_chars = 0;
  std::uint64_t total_emitted_docs = 0;
  OutputPosition output;
  bool complete = false;

  bool operator==(const MixerState&) const = default;
};

std::string serialize_state(const MixerState& state, std::uint64_t fingerprint);
MixerState parse_state(std::string_view contents, std::uint64_t expected_fingerprint);

// Among non-exhausted languages, the one with the largest character deficit
// rate * total_emitted - emitted (ties to the smaller lang code, which is
// the earlier index since targets are lang-sorted). nullopt when every
// language is exhausted.
std::optional<std::size_t> next_language(const MixerState& state,
                                         std::span<const MixTarget> targets);

// Sequential scheduler driving one DocumentSource per target.
class Mixer {
 public:
  using Emit = std::function<void(std::size_t lang_index, const DocumentRecord& doc,
                                  std::uint64_t chars)>;

  // Sorts targets by lang; `sources` maps lang to its source.
  Mixer(std::vector<MixTarget> targets,
        std::map<std::string, std::unique_ptr<DocumentSource>> sources);

  // Replaces the state, repositioning each source at its saved cursor.
  void restore(const MixerState& state);

  // Emits one document. Returns false at end of mix.
  bool step(const Emit& emit);

  const MixerState& state() const { return state_; }
  MixerState& mutable_state() { return state_; }
  const std::vector<MixTarget>& targets() const { return targets_; }
  const DocumentSource& source(std::size_t i) const { return *sources_[i]; }

 private:
  std::vector<MixTarget> targets_;
  std::vector<std::unique_ptr<DocumentSource>> sources_;
  MixerState state_;
};

// Targets realizing a plan over the given corpus sizes. Languages with zero
// allocation are dropped; a positive allocation over an empty corpus is a
// ConfigError. For UniMax plans the target is additionally held to
// N * corpus_chars so the cap survives a stats/shards mismatch. Mismatches
// above 1% are reported through `warnings`.
std::vector<MixTarget> plan_targets(const AllocationPlan& plan,
                                    const std::map<std::string, std::uint64_t>& corpus_chars,
                                    std::vector<std::string>* warnings);

// Targets p_l * total_chars for every language with p_l > 0.
std::vector<MixTarget> vocab_targets(const Distribution& dist, std::uint64_t total_chars);

struct MixerConfig {
  std::uint64_t seed = 0;
  bool shuffle = false;
  std::optional<std::uint64_t> max_doc_chars;
  std::uint64_t shard_bytes = 256ull << 20;  // output shard size for mixes
  unsigned threads = 1;                      // scanning parallelism only
  std::uint64_t checkpoint_every = 0;        // docs between state snapshots
  std::uint64_t stop_after_docs = 0;         // stop early, leaving a snapshot
  std::optional<std::filesystem::path> resume;

  void validate() const;
};

struct LanguageTotals {
  std::string lang;
  double rate = 0;
  double target_chars = 0;
  bool capped = false;
  std::uint64_t corpus_chars = 0;
  std::uint64_t corpus_docs = 0;
  std::uint64_t max_doc_chars = 0;
  std::uint64_t emitted_chars = 0;
  std::uint64_t emitted_docs = 0;
  double epochs = 0;
  bool wrapped = false;
};

struct OutputFile {
  std::string name;
  std::uint64_t bytes = 0;
  std::uint64_t docs = 0;
  std::uint32_t crc32 = 0;
};

struct MixManifest {
  std::string kind;  // "mix" or "vocab"
  std::vector<std::pair<std::string, std::string>> config;
  std::string args;
  std::vector<LanguageTotals> languages;
  std::vector<OutputFile> outputs;
  std::vector<std::string> warnings;
  std::uint64_t total_chars = 0;
  std::uint64_t total_docs = 0;
};

std::string format_manifest(const MixManifest& m);

struct MixResult {
  bool complete = false;
  MixManifest manifest;  // written only when complete
  MixerState state;
};

// Mixes shards into <out_dir>/mix-NNNNN.jsonl plus <out_dir>/manifest.json,
// checkpointing to <out_dir>/mix.state.json. `echo` is the provenance
// string recorded in the manifest.
MixResult run_mix(const ShardSet& shards, const AllocationPlan& plan, const MixerConfig& cfg,
                  const std::filesystem::path& out_dir, const std::string& echo);

// Writes a plain-text corpus (one document per line) of about target_chars
// characters to `out`, plus <out>.manifest.json and <out>.state.json.
MixResult sample_vocab_corpus(const ShardSet& shards, const Distribution& dist,
                              std::uint64_t target_chars, const MixerConfig& cfg,
                              const std::filesystem::path& out, const std::string& echo);

// In-memory variant used by analysis and tests: returns the sampled docs.
std::vector<DocumentRecord> sample_vocab_documents(
    const std::map<std::string, std::vector<DocumentRecord>>& docs, const Distribution& dist,
    std::uint64_t target_chars, const SourceOptions& opts = {});

// Streaming variant over shard-backed sources.
void sample_vocab_shards(const ShardSet& shards, const Distribution& dist,
                         std::uint64_t target_chars, const SourceOptions& opts, unsigned threads,
                         const std::function<void(const DocumentRecord&)>& visit);

std::uint32_t crc32_of_file(const std::filesystem::path& path, std::uint64_t* bytes,
                            std::uint64_t* lines);

}  // namespace unimix
