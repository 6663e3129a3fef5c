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

#include "unimix/corpus_stats.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "unimix/error.hpp"
#include "unimix/hash.hpp"
#include "unimix/text.hpp"

namespace unimix {

namespace fs = std::filesystem;

void CorpusStats::add(const std::string& lang, std::uint64_t chars,
                      std::uint64_t docs) {
  auto& e = entries_[lang];
  e.lang = lang;
  e.char_count += chars;
  e.doc_count += docs;
  total_chars_ += chars;
}

void CorpusStats::merge(const CorpusStats& other) {
  for (const auto& [lang, e] : other.entries_) add(lang, e.char_count, e.doc_count);
}

std::vector<LanguageStats> CorpusStats::canonical() const {
  std::vector<LanguageStats> out;
  out.reserve(entries_.size());
  for (const auto& [_, e] : entries_) out.push_back(e);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.char_count > b.char_count;
  });
  return out;
}

const LanguageStats* CorpusStats::find(const std::string& lang) const {
  auto it = entries_.find(lang);
  return it == entries_.end() ? nullptr : &it->second;
}

std::uint64_t CorpusStats::char_count(const std::string& lang) const {
  const auto* e = find(lang);
  return e ? e->char_count : 0;
}

CorpusStats merge_stats(const CorpusStats& a, const CorpusStats& b) {
  CorpusStats out = a;
  out.merge(b);
  return out;
}

void FilterConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(confidence_threshold)) {
    throw InvalidArgument("confidence threshold must lie in [0, 1]");
  }
  if (!in_unit(soft_pass_rate)) throw InvalidArgument("soft-pass rate must lie in [0, 1]");
  if (!(prune_threshold > 0.0 && prune_threshold <= 1.0)) {
    throw InvalidArgument("prune threshold must lie in (0, 1]");
  }
}

const char* to_string(FilterDecision d) {
  switch (d) {
    case FilterDecision::kKeep: return "keep";
    case FilterDecision::kDropLangId: return "drop_langid";
    case FilterDecision::kDropBlocklist: return "drop_blocklist";
    case FilterDecision::kKeepSoftPass: return "keep_soft_pass";
  }
  return "?";
}

namespace {

bool any_term_matches(const std::string& folded_text,
                      const std::vector<std::string>& folded_terms) {
  for (const auto& t : folded_terms) {
    if (!t.empty() && folded_text.find(t) != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string> fold_all(const std::vector<std::string>& terms) {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(text::fold_case(t));
  return out;
}

// Blocklists folded once per ingestion rather than per document.
class Filter {
 public:
  explicit Filter(const FilterConfig& cfg) : cfg_(cfg) {
    for (const auto& [lang, terms] : cfg.blocklists) folded_[lang] = fold_all(terms);
  }

  FilterDecision operator()(const DocumentRecord& doc) const {
    if (doc.langid_confidence < cfg_.confidence_threshold) {
      return FilterDecision::kDropLangId;
    }
    auto it = folded_.find(doc.lang);
    if (it == folded_.end() || it->second.empty()) return FilterDecision::kKeep;
    if (!any_term_matches(text::fold_case(doc.text), it->second)) {
      return FilterDecision::kKeep;
    }
    return keyed_uniform(cfg_.seed, doc.stable_key()) < cfg_.soft_pass_rate
               ? FilterDecision::kKeepSoftPass
               : FilterDecision::kDropBlocklist;
  }

 private:
  const FilterConfig& cfg_;
  std::map<std::string, std::vector<std::string>> folded_;
};

void account(const DocumentRecord& doc, FilterDecision d, IngestResult& out) {
  const std::uint64_t chars = text::char_count(doc.text);
  out.report.record(doc.lang, d, chars);
  if (d == FilterDecision::kKeep || d == FilterDecision::kKeepSoftPass) {
    out.stats.add(doc.lang, chars, 1);
  }
}

// Runs `work(shard_index)` over all shards on up to `threads` workers and
// rethrows the failure of the lowest-indexed failing shard.
template <typename Work>
void for_each_shard(std::size_t n, unsigned threads, Work&& work) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

FilterDecision filter_document(const DocumentRecord& doc, const FilterConfig& cfg) {
  return Filter(cfg)(doc);
}

void FilterReport::record(const std::string& lang, FilterDecision d,
                          std::uint64_t chars) {
  auto& c = languages[lang];
  ++c.docs_seen;
  c.chars_seen += chars;
  switch (d) {
    case FilterDecision::kDropLangId:
      ++c.docs_dropped_langid;
      c.chars_dropped += chars;
      break;
    case FilterDecision::kDropBlocklist:
      ++c.docs_dropped_blocklist;
      c.chars_dropped += chars;
      break;
    case FilterDecision::kKeepSoftPass:
      ++c.docs_soft_passed;
      break;
    case FilterDecision::kKeep:
      break;
  }
}

void FilterReport::merge(const FilterReport& other) {
  for (const auto& [lang, o] : other.languages) {
    auto& c = languages[lang];
    c.docs_seen += o.docs_seen;
    c.docs_dropped_langid += o.docs_dropped_langid;
    c.docs_dropped_blocklist += o.docs_dropped_blocklist;
    c.docs_soft_passed += o.docs_soft_passed;
    c.chars_seen += o.chars_seen;
    c.chars_dropped += o.chars_dropped;
  }
}

LanguageFilterCounts FilterReport::totals() const {
  LanguageFilterCounts t;
  for (const auto& [_, c] : languages) {
    t.docs_seen += c.docs_seen;
    t.docs_dropped_langid += c.docs_dropped_langid;
    t.docs_dropped_blocklist += c.docs_dropped_blocklist;
    t.docs_soft_passed += c.docs_soft_passed;
    t.chars_seen += c.chars_seen;
    t.chars_dropped += c.chars_dropped;
  }
  return t;
}

BlocklistCensus::BlocklistCensus(const FilterConfig& cfg) : cfg_(&cfg) {
  for (const auto& [lang, terms] : cfg.blocklists) {
    folded_terms_[lang] = fold_all(terms);
    census_[lang].matches.assign(terms.size(), 0);
  }
}

void BlocklistCensus::observe(const DocumentRecord& doc) {
  auto it = folded_terms_.find(doc.lang);
  if (it == folded_terms_.end()) return;
  auto& lc = census_[doc.lang];
  ++lc.docs;
  const std::string folded = text::fold_case(doc.text);
  for (std::size_t i = 0; i < it->second.size(); ++i) {
    const auto& t = it->second[i];
    if (!t.empty() && folded.find(t) != std::string::npos) ++lc.matches[i];
  }
}

void BlocklistCensus::merge(const BlocklistCensus& other) {
  for (const auto& [lang, o] : other.census_) {
    auto& lc = census_[lang];
    lc.docs += o.docs;
    lc.matches.resize(o.matches.size(), 0);
    for (std::size_t i = 0; i < o.matches.size(); ++i) lc.matches[i] += o.matches[i];
  }
}

PruneResult BlocklistCensus::prune() const {
  PruneResult out;
  for (const auto& [lang, terms] : cfg_->blocklists) {
    const auto& lc = census_.at(lang);
    if (lc.docs == 0) {
      out.blocklists[lang] = terms;
      if (!terms.empty()) out.skipped.push_back(lang);
      continue;
    }
    auto& kept = out.blocklists[lang];
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double rate = static_cast<double>(lc.matches[i]) / static_cast<double>(lc.docs);
      if (rate > cfg_->prune_threshold) {
        out.pruned_terms[lang].push_back(terms[i]);
      } else {
        kept.push_back(terms[i]);
      }
    }
  }
  return out;
}

PruneResult prune_blocklist(std::span<const DocumentRecord> docs,
                            const FilterConfig& cfg) {
  cfg.validate();
  BlocklistCensus census(cfg);
  for (const auto& d : docs) census.observe(d);
  return census.prune();
}

IngestResult ingest_documents(std::span<const DocumentRecord> docs,
                              const FilterConfig& cfg) {
  cfg.validate();
  Filter filter(cfg);
  IngestResult out;
  for (const auto& d : docs) account(d, filter(d), out);
  return out;
}

IngestResult ingest_shards(std::span<const fs::path> shards, const FilterConfig& cfg,
                           unsigned threads) {
  cfg.validate();
  Filter filter(cfg);
  std::vector<IngestResult> partial(shards.size());
  for_each_shard(shards.size(), threads, [&](std::size_t i) {
    RecordReader reader(shards[i]);
    DocumentRecord doc;
    while (reader.next(doc)) account(doc, filter(doc), partial[i]);
  });
  IngestResult out;
  for (const auto& p : partial) {
    out.stats.merge(p.stats);
    out.report.merge(p.report);
  }
  return out;
}

PruneResult prune_blocklist_shards(std::span<const fs::path> shards,
                                   const FilterConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<BlocklistCensus> partial(shards.size(), BlocklistCensus(cfg));
  for_each_shard(shards.size(), threads, [&](std::size_t i) {
    RecordReader reader(shards[i]);
    DocumentRecord doc;
    while (reader.next(doc)) partial[i].observe(doc);
  });
  BlocklistCensus total(cfg);
  for (const auto& p : partial) total.merge(p);
  return total.prune();
}

std::vector<fs::path> expand_inputs(std::span<const fs::path> inputs) {
  auto is_shard = [](const fs::path& p) {
    const std::string name = p.filename().string();
    auto ends = [&](std::string_view s) {
      return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0;
    };
    return ends(".jsonl") || ends(".jsonl.gz") || ends(".json") || ends(".json.gz") ||
           ends(".ndjson") || ends(".ndjson.gz");
  };
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && is_shard(e.path())) out.push_back(e.path());
      }
    } else if (fs::exists(in, ec)) {
      out.push_back(in);
    } else {
      throw IoError(in.string(), "no such file or directory");
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace unimix
