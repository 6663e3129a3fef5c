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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "unimix/records.hpp"

namespace unimix {

struct LanguageStats {
  std::string lang;
  std::uint64_t char_count = 0;
  std::uint64_t doc_count = 0;

  bool operator==(const LanguageStats&) const = default;
};

// Per-language character and document counts. Merging is a commutative
// monoid with the empty value as identity.
class CorpusStats {
 public:
  CorpusStats() = default;

  void add(const std::string& lang, std::uint64_t chars, std::uint64_t docs);
  void merge(const CorpusStats& other);

  // Descending char_count, ties by lang ascending.
  std::vector<LanguageStats> canonical() const;

  const LanguageStats* find(const std::string& lang) const;
  std::uint64_t char_count(const std::string& lang) const;
  std::uint64_t total_chars() const { return total_chars_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::map<std::string, LanguageStats>& entries() const { return entries_; }

  bool operator==(const CorpusStats&) const = default;

 private:
  std::map<std::string, LanguageStats> entries_;
  std::uint64_t total_chars_ = 0;
};

CorpusStats merge_stats(const CorpusStats& a, const CorpusStats& b);

struct FilterConfig {
  double confidence_threshold = 0.95;
  // lang -> terms. Matching is a case-folded substring test.
  std::map<std::string, std::vector<std::string>> blocklists;
  double soft_pass_rate = 0.001;
  double prune_threshold = 0.10;
  std::uint64_t seed = 0;

  // Throws InvalidArgument.
  void validate() const;
};

enum class FilterDecision { kKeep, kDropLangId, kDropBlocklist, kKeepSoftPass };

const char* to_string(FilterDecision d);

// Pure function of (doc, cfg). Soft-pass draws are keyed by
// (cfg.seed, doc.stable_key()).
FilterDecision filter_document(const DocumentRecord& doc, const FilterConfig& cfg);

struct LanguageFilterCounts {
  std::uint64_t docs_seen = 0;
  std::uint64_t docs_dropped_langid = 0;
  std::uint64_t docs_dropped_blocklist = 0;
  std::uint64_t docs_soft_passed = 0;
  std::uint64_t chars_seen = 0;
  std::uint64_t chars_dropped = 0;

  std::uint64_t docs_retained() const {
    return docs_seen - docs_dropped_langid - docs_dropped_blocklist;
  }

  bool operator==(const LanguageFilterCounts&) const = default;
};

struct FilterReport {
  std::map<std::string, LanguageFilterCounts> languages;
  std::map<std::string, std::vector<std::string>> pruned_terms;
  // Languages with blocklists but no documents; pruning rate is undefined.
  std::vector<std::string> prune_skipped;

  void record(const std::string& lang, FilterDecision d, std::uint64_t chars);
  void merge(const FilterReport& other);
  LanguageFilterCounts totals() const;

  bool operator==(const FilterReport&) const = default;
};

struct PruneResult {
  std::map<std::string, std::vector<std::string>> blocklists;
  std::map<std::string, std::vector<std::string>> pruned_terms;
  std::vector<std::string> skipped;
};

// Per-term document match counts over the unfiltered documents of each
// language, accumulated incrementally so it can run over shards.
class BlocklistCensus {
 public:
  explicit BlocklistCensus(const FilterConfig& cfg);

  void observe(const DocumentRecord& doc);
  void merge(const BlocklistCensus& other);

  // Removes every term whose match rate exceeds cfg.prune_threshold.
  PruneResult prune() const;

 private:
  struct LangCensus {
    std::uint64_t docs = 0;
    std::vector<std::uint64_t> matches;  // parallel to folded_terms_[lang]
  };
  const FilterConfig* cfg_;
  std::map<std::string, std::vector<std::string>> folded_terms_;
  std::map<std::string, LangCensus> census_;
};

PruneResult prune_blocklist(std::span<const DocumentRecord> docs,
                            const FilterConfig& cfg);

struct IngestResult {
  CorpusStats stats;
  FilterReport report;
};

// Filters and counts in-memory documents.
IngestResult ingest_documents(std::span<const DocumentRecord> docs,
                              const FilterConfig& cfg);

// Filters and counts shard files, optionally in parallel. The result does
// not depend on shard order or thread count. Any shard failure throws
// IoError naming the shard; no partial result is returned.
IngestResult ingest_shards(std::span<const std::filesystem::path> shards,
                           const FilterConfig& cfg, unsigned threads = 1);

// Runs the blocklist census over shard files and returns the pruned lists.
PruneResult prune_blocklist_shards(std::span<const std::filesystem::path> shards,
                                   const FilterConfig& cfg, unsigned threads = 1);

// Expands directories into the *.jsonl / *.jsonl.gz / *.json / *.gz files
// they contain; returns a path-sorted list.
std::vector<std::filesystem::path> expand_inputs(
    std::span<const std::filesystem::path> inputs);

}  // namespace unimix
