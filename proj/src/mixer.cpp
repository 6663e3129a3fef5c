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

#include "unimix/mixer.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

#include "unimix/error.hpp"
#include "unimix/formats.hpp"
#include "unimix/hash.hpp"
#include "unimix/text.hpp"

namespace unimix {

namespace fs = std::filesystem;

namespace {

// Fisher-Yates over [0, n) driven by a splitmix64 stream keyed by
// (seed, lang, pass); identical on every platform.
std::vector<std::uint64_t> permutation(std::uint64_t n, std::uint64_t seed,
                                       std::string_view lang, std::uint64_t pass) {
  std::vector<std::uint64_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::uint64_t s = splitmix64(seed) ^ fnv1a64(lang) ^ splitmix64(pass ^ 0x5bd1e995ULL);
  for (std::uint64_t i = n; i > 1; --i) {
    s = splitmix64(s);
    const auto j = static_cast<std::uint64_t>((static_cast<unsigned __int128>(s) * i) >> 64);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

void truncate_doc(DocumentRecord& doc, const SourceOptions& opts) {
  if (opts.max_doc_chars) doc.text = std::string(text::truncate_scalars(doc.text, *opts.max_doc_chars));
}

// Shared pass bookkeeping for both source kinds.
class CyclingSource : public DocumentSource {
 public:
  CyclingSource(std::string lang, SourceOptions opts)
      : lang_(std::move(lang)), opts_(std::move(opts)) {}

  SourceCursor cursor() const override { return cursor_; }
  std::uint64_t total_chars() const override { return total_chars_; }
  std::uint64_t doc_count() const override { return doc_count_; }
  std::uint64_t max_doc_chars() const override { return max_doc_chars_; }

 protected:
  void require_docs() const {
    if (doc_count_ == 0) throw ConfigError("language '" + lang_ + "' has no documents");
  }

  // Index of the document at the cursor within one pass.
  std::uint64_t current_index() {
    if (!opts_.shuffle) return cursor_.position;
    if (perm_pass_ != cursor_.pass || perm_.size() != doc_count_) {
      perm_ = permutation(doc_count_, opts_.seed, lang_, cursor_.pass);
      perm_pass_ = cursor_.pass;
    }
    return perm_[cursor_.position];
  }

  // Returns true when the advance completed a pass.
  bool advance() {
    if (++cursor_.position < doc_count_) return false;
    ++cursor_.pass;
    cursor_.position = 0;
    cursor_.shard = 0;
    cursor_.offset = 0;
    cursor_.line = 0;
    return true;
  }

  void observe(std::uint64_t chars) {
    total_chars_ += chars;
    max_doc_chars_ = std::max(max_doc_chars_, chars);
    ++doc_count_;
  }

  std::string lang_;
  SourceOptions opts_;
  SourceCursor cursor_;
  std::uint64_t total_chars_ = 0;
  std::uint64_t doc_count_ = 0;
  std::uint64_t max_doc_chars_ = 0;

 private:
  std::vector<std::uint64_t> perm_;
  std::uint64_t perm_pass_ = ~0ULL;
};

class MemorySource final : public CyclingSource {
 public:
  MemorySource(std::string lang, std::vector<DocumentRecord> docs, SourceOptions opts)
      : CyclingSource(std::move(lang), std::move(opts)), docs_(std::move(docs)) {
    for (auto& d : docs_) {
      truncate_doc(d, opts_);
      observe(text::char_count(d.text));
    }
  }

  DocumentRecord next() override {
    require_docs();
    DocumentRecord d = docs_[current_index()];
    advance();
    return d;
  }

  void restore(const SourceCursor& c) override {
    if (doc_count_ > 0 && c.position >= doc_count_) throw FormatError("cursor past end of '" + lang_ + "'");
    cursor_ = c;
  }

 private:
  std::vector<DocumentRecord> docs_;
};

class ShardSource final : public CyclingSource {
 public:
  ShardSource(std::string lang, std::vector<fs::path> shards, SourceOptions opts)
      : CyclingSource(std::move(lang), std::move(opts)), shards_(std::move(shards)) {
    for (std::size_t s = 0; s < shards_.size(); ++s) {
      RecordReader reader(shards_[s]);
      DocumentRecord d;
      while (true) {
        const std::uint64_t offset = reader.offset();
        const std::uint64_t line = reader.line_number();
        if (!reader.next(d)) break;
        truncate_doc(d, opts_);
        observe(text::char_count(d.text));
        if (opts_.shuffle) index_.push_back({s, offset, line});
      }
    }
  }

  DocumentRecord next() override {
    require_docs();
    DocumentRecord d;
    if (opts_.shuffle) {
      const Location& loc = index_[current_index()];
      RecordReader& r = reader_for(loc.shard);
      r.seek(loc.offset, loc.line);
      if (!r.next(d)) throw IoError(shards_[loc.shard].string(), "record vanished since scan", loc.line + 1);
    } else {
      while (true) {
        if (cursor_.shard >= shards_.size()) {
          throw IoError(shards_.back().string(), "fewer records than at scan time");
        }
        if (!sequential_) {
          sequential_.emplace(shards_[cursor_.shard]);
          sequential_->seek(cursor_.offset, cursor_.line);
        }
        if (sequential_->next(d)) {
          cursor_.offset = sequential_->offset();
          cursor_.line = sequential_->line_number();
          break;
        }
        ++cursor_.shard;
        cursor_.offset = 0;
        cursor_.line = 0;
        sequential_.reset();
      }
    }
    truncate_doc(d, opts_);
    if (advance()) sequential_.reset();
    return d;
  }

  void restore(const SourceCursor& c) override {
    if (c.position >= doc_count_ || c.shard >= shards_.size()) {
      throw FormatError("cursor past end of '" + lang_ + "'");
    }
    cursor_ = c;
    sequential_.reset();
  }

 private:
  struct Location {
    std::size_t shard;
    std::uint64_t offset;
    std::uint64_t line;
  };

  RecordReader& reader_for(std::size_t shard) {
    auto it = readers_.find(shard);
    if (it == readers_.end()) it = readers_.emplace(shard, RecordReader(shards_[shard])).first;
    return it->second;
  }

  std::vector<fs::path> shards_;
  std::vector<Location> index_;
  std::optional<RecordReader> sequential_;
  std::map<std::size_t, RecordReader> readers_;
};

}  // namespace

std::unique_ptr<DocumentSource> make_memory_source(std::string lang,
                                                   std::vector<DocumentRecord> docs,
                                                   const SourceOptions& opts) {
  return std::make_unique<MemorySource>(std::move(lang), std::move(docs), opts);
}

std::unique_ptr<DocumentSource> make_shard_source(std::string lang, std::vector<fs::path> shards,
                                                  const SourceOptions& opts) {
  std::sort(shards.begin(), shards.end());
  return std::make_unique<ShardSource>(std::move(lang), std::move(shards), opts);
}

void ShardSet::add(const std::string& lang, fs::path p) { shards[lang].push_back(std::move(p)); }

void ShardSet::canonicalize() {
  for (auto& [_, list] : shards) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

ShardSet ShardSet::parse(std::string_view contents, const fs::path& base) {
  ShardSet set;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool schema = false;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!schema) {
      if (line != "# unimix-shards v1") throw FormatError("missing schema header '# unimix-shards v1'");
      schema = true;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 'lang<TAB>path'");
    }
    fs::path p(cols[1]);
    if (p.is_relative()) p = base / p;
    set.add(std::string(cols[0]), p.lexically_normal());
  }
  if (!schema) throw FormatError("empty shard manifest");
  set.canonicalize();
  return set;
}

ShardSet ShardSet::load(const fs::path& manifest) {
  try {
    return parse(read_file(manifest), manifest.parent_path());
  } catch (const FormatError& e) {
    throw IoError(manifest.string(), e.what(), 0, ErrorCode::kFormat);
  }
}

std::string serialize_state(const MixerState& state, std::uint64_t fingerprint) {
  nlohmann::ordered_json j;
  j["schema"] = "unimix-mix-state v1";
  j["fingerprint"] = fingerprint;
  j["complete"] = state.complete;
  j["total_emitted_chars"] = state.total_emitted_chars;
  j["total_emitted_docs"] = state.total_emitted_docs;
  j["output"] = {{"shard", state.output.shard},
                 {"bytes", state.output.bytes},
                 {"docs", state.output.docs}};
  auto langs = nlohmann::ordered_json::array();
  for (const auto& l : state.langs) {
    nlohmann::ordered_json o;
    o["emitted_chars"] = l.emitted_chars;
    o["emitted_docs"] = l.emitted_docs;
    o["exhausted"] = l.exhausted;
    o["cursor"] = {l.cursor.pass, l.cursor.position, l.cursor.shard, l.cursor.offset,
                   l.cursor.line};
    langs.push_back(std::move(o));
  }
  j["languages"] = std::move(langs);
  return j.dump(1) + "\n";
}

MixerState parse_state(std::string_view contents, std::uint64_t expected_fingerprint) {
  MixerState s;
  try {
    const auto j = nlohmann::json::parse(contents);
    if (j.at("schema") != "unimix-mix-state v1") throw FormatError("unknown state schema");
    if (j.at("fingerprint").get<std::uint64_t>() != expected_fingerprint) {
      throw ConfigError("state snapshot belongs to a different mix configuration");
    }
    s.complete = j.at("complete").get<bool>();
    s.total_emitted_chars = j.at("total_emitted_chars").get<std::uint64_t>();
    s.total_emitted_docs = j.at("total_emitted_docs").get<std::uint64_t>();
    const auto& out = j.at("output");
    s.output = {out.at("shard").get<std::uint64_t>(), out.at("bytes").get<std::uint64_t>(),
                out.at("docs").get<std::uint64_t>()};
    for (const auto& o : j.at("languages")) {
      LanguageState l;
      l.emitted_chars = o.at("emitted_chars").get<std::uint64_t>();
      l.emitted_docs = o.at("emitted_docs").get<std::uint64_t>();
      l.exhausted = o.at("exhausted").get<bool>();
      const auto& c = o.at("cursor");
      if (!c.is_array() || c.size() != 5) throw FormatError("bad cursor");
      l.cursor = {c[0].get<std::uint64_t>(), c[1].get<std::uint64_t>(), c[2].get<std::uint64_t>(),
                  c[3].get<std::uint64_t>(), c[4].get<std::uint64_t>()};
      s.langs.push_back(l);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad state snapshot: ") + e.what());
  }
  return s;
}

std::optional<std::size_t> next_language(const MixerState& state,
                                         std::span<const MixTarget> targets) {
  std::optional<std::size_t> best;
  double best_deficit = 0;
  const auto total = static_cast<double>(state.total_emitted_chars);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& l = state.langs[i];
    if (l.exhausted) continue;
    const double deficit = targets[i].rate * total - static_cast<double>(l.emitted_chars);
    if (!best || deficit > best_deficit) {
      best = i;
      best_deficit = deficit;
    }
  }
  return best;
}

Mixer::Mixer(std::vector<MixTarget> targets,
             std::map<std::string, std::unique_ptr<DocumentSource>> sources)
    : targets_(std::move(targets)) {
  std::sort(targets_.begin(), targets_.end(),
            [](const auto& a, const auto& b) { return a.lang < b.lang; });
  for (std::size_t i = 1; i < targets_.size(); ++i) {
    if (targets_[i].lang == targets_[i - 1].lang) {
      throw InvalidArgument("duplicate target language '" + targets_[i].lang + "'");
    }
  }
  for (const auto& t : targets_) {
    auto it = sources.find(t.lang);
    if (it == sources.end() || !it->second) {
      throw ConfigError("no documents for language '" + t.lang + "'");
    }
    if (t.target_chars > 0 && it->second->total_chars() == 0) {
      throw ConfigError("language '" + t.lang + "' has a positive allocation but no characters");
    }
    sources_.push_back(std::move(it->second));
    LanguageState ls;
    ls.exhausted = !(t.target_chars > 0);
    state_.langs.push_back(ls);
  }
}

void Mixer::restore(const MixerState& state) {
  if (state.langs.size() != targets_.size()) throw FormatError("state does not match targets");
  for (std::size_t i = 0; i < targets_.size(); ++i) sources_[i]->restore(state.langs[i].cursor);
  state_ = state;
}

bool Mixer::step(const Emit& emit) {
  const auto i = next_language(state_, targets_);
  if (!i) {
    state_.complete = true;
    return false;
  }
  DocumentRecord doc = sources_[*i]->next();
  const std::uint64_t chars = text::char_count(doc.text);
  auto& l = state_.langs[*i];
  l.emitted_chars += chars;
  ++l.emitted_docs;
  l.cursor = sources_[*i]->cursor();
  if (static_cast<double>(l.emitted_chars) >= targets_[*i].target_chars) l.exhausted = true;
  state_.total_emitted_chars += chars;
  ++state_.total_emitted_docs;
  if (emit) emit(*i, doc, chars);
  return true;
}

std::vector<MixTarget> plan_targets(const AllocationPlan& plan,
                                    const std::map<std::string, std::uint64_t>& corpus_chars,
                                    std::vector<std::string>* warnings) {
  std::vector<MixTarget> out;
  for (const auto& a : plan.entries) {
    if (!(a.allocated_chars > 0)) continue;
    auto it = corpus_chars.find(a.lang);
    const std::uint64_t actual = it == corpus_chars.end() ? 0 : it->second;
    if (actual == 0) {
      throw ConfigError("plan allocates " + format_double(a.allocated_chars) +
                        " chars to '" + a.lang + "' but its shards are empty or missing");
    }
    const double planned = static_cast<double>(a.char_count);
    if (warnings && std::abs(static_cast<double>(actual) - planned) > 0.01 * planned) {
      warnings->push_back("'" + a.lang + "': shards hold " + std::to_string(actual) +
                          " chars but the plan assumed " + std::to_string(a.char_count));
    }
    MixTarget t;
    t.lang = a.lang;
    t.rate = a.rate;
    t.target_chars = a.allocated_chars;
    t.capped = a.capped;
    if (plan.policy.is_unimax()) {
      t.target_chars = std::min(t.target_chars, plan.policy.max_epochs() * static_cast<double>(actual));
    }
    out.push_back(std::move(t));
  }
  if (out.empty()) throw EmptyCorpus("plan allocates nothing");
  return out;
}

std::vector<MixTarget> vocab_targets(const Distribution& dist, std::uint64_t total_chars) {
  if (total_chars == 0) throw InvalidArgument("target chars must be positive");
  if (std::abs(dist.sum() - 1.0) > kSumTolerance) throw InvalidArgument("distribution does not sum to 1");
  std::vector<MixTarget> out;
  for (const auto& [lang, p] : dist.probs()) {
    if (!(p > 0)) continue;
    out.push_back({lang, p, p * static_cast<double>(total_chars), false});
  }
  if (out.empty()) throw EmptyCorpus();
  return out;
}

void MixerConfig::validate() const {
  if (max_doc_chars && *max_doc_chars == 0) throw InvalidArgument("truncation length must be positive");
}

std::uint32_t crc32_of_file(const fs::path& path, std::uint64_t* bytes, std::uint64_t* lines) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open");
  uLong crc = crc32(0L, Z_NULL, 0);
  std::uint64_t n = 0;
  std::uint64_t nl = 0;
  std::vector<char> buf(1 << 16);
  while (f) {
    f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(f.gcount());
    if (got == 0) break;
    crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(got));
    n += got;
    nl += static_cast<std::uint64_t>(std::count(buf.data(), buf.data() + got, '\n'));
  }
  if (bytes) *bytes = n;
  if (lines) *lines = nl;
  return static_cast<std::uint32_t>(crc);
}

std::string format_manifest(const MixManifest& m) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["schema"] = "unimix-mix-manifest v1";
  j["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
  j["kind"] = m.kind;
  j["args"] = m.args;
  ojson cfg = ojson::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  j["config"] = cfg;
  j["total_chars"] = m.total_chars;
  j["total_docs"] = m.total_docs;
  auto langs = ojson::array();
  for (const auto& l : m.languages) {
    ojson o;
    o["lang"] = l.lang;
    o["rate"] = l.rate;
    o["target_chars"] = l.target_chars;
    o["capped"] = l.capped;
    o["corpus_chars"] = l.corpus_chars;
    o["corpus_docs"] = l.corpus_docs;
    o["max_doc_chars"] = l.max_doc_chars;
    o["emitted_chars"] = l.emitted_chars;
    o["emitted_docs"] = l.emitted_docs;
    o["epochs"] = l.epochs;
    o["wrapped"] = l.wrapped;
    langs.push_back(std::move(o));
  }
  j["languages"] = std::move(langs);
  auto outs = ojson::array();
  for (const auto& f : m.outputs) {
    char hex[9];
    std::snprintf(hex, sizeof hex, "%08x", f.crc32);
    outs.push_back({{"file", f.name}, {"bytes", f.bytes}, {"docs", f.docs}, {"crc32", hex}});
  }
  j["outputs"] = std::move(outs);
  j["warnings"] = m.warnings;
  return j.dump(2) + "\n";
}

namespace {

// Appends lines to numbered output shards, rolling over at `shard_bytes`
// (0 = single file). Construction truncates back to `pos` and removes later
// shards so a resumed run continues from exactly the snapshot.
class ShardWriter {
 public:
  ShardWriter(std::function<fs::path(std::uint64_t)> name_of, std::uint64_t shard_bytes,
              OutputPosition pos)
      : name_of_(std::move(name_of)), shard_bytes_(shard_bytes), pos_(pos) {
    const fs::path current = name_of_(pos_.shard);
    std::error_code ec;
    const bool exists = fs::exists(current, ec);
    if (exists) {
      if (fs::file_size(current) < pos_.bytes) {
        throw IoError(current.string(), "output shorter than the state snapshot records");
      }
      fs::resize_file(current, pos_.bytes);
    } else if (pos_.bytes > 0) {
      throw IoError(current.string(), "output recorded in the state snapshot is missing");
    }
    for (std::uint64_t s = pos_.shard + 1; shard_bytes_ > 0; ++s) {
      if (!fs::remove(name_of_(s), ec)) break;
    }
    open();
  }

  void write(std::string_view line) {
    if (shard_bytes_ > 0 && pos_.docs > 0 && pos_.bytes >= shard_bytes_) {
      out_.close();
      ++pos_.shard;
      pos_.bytes = 0;
      pos_.docs = 0;
      fs::remove(name_of_(pos_.shard));
      open();
    }
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!out_) throw IoError(name_of_(pos_.shard).string(), "write failed");
    pos_.bytes += line.size();
    ++pos_.docs;
  }

  void flush() {
    out_.flush();
    if (!out_) throw IoError(name_of_(pos_.shard).string(), "flush failed");
  }

  const OutputPosition& position() const { return pos_; }

 private:
  void open() {
    const fs::path p = name_of_(pos_.shard);
    out_.open(p, std::ios::binary | std::ios::app);
    if (!out_) throw IoError(p.string(), "cannot open for writing");
  }

  std::function<fs::path(std::uint64_t)> name_of_;
  std::uint64_t shard_bytes_;
  OutputPosition pos_;
  std::ofstream out_;
};

struct RunSpec {
  std::string kind;
  std::vector<MixTarget> targets;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> warnings;
  std::function<fs::path(std::uint64_t)> name_of;
  std::uint64_t shard_bytes = 0;
  fs::path state_path;
  fs::path manifest_path;
  bool jsonl = true;
};

std::map<std::string, std::unique_ptr<DocumentSource>> open_sources(
    const ShardSet& shards, const std::vector<std::string>& langs, const SourceOptions& opts,
    unsigned threads) {
  std::vector<std::unique_ptr<DocumentSource>> built(langs.size());
  std::vector<std::exception_ptr> errors(langs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < langs.size(); i = next++) {
      try {
        auto it = shards.shards.find(langs[i]);
        if (it == shards.shards.end() || it->second.empty()) {
          throw ConfigError("no shards listed for language '" + langs[i] + "'");
        }
        built[i] = make_shard_source(langs[i], it->second, opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(langs.size())));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::map<std::string, std::unique_ptr<DocumentSource>> out;
  for (std::size_t i = 0; i < langs.size(); ++i) out[langs[i]] = std::move(built[i]);
  return out;
}

std::uint64_t fingerprint_of(const RunSpec& spec, const ShardSet& shards) {
  std::string key = spec.kind;
  for (const auto& [k, v] : spec.config) key += "|" + k + "=" + v;
  for (const auto& t : spec.targets) {
    key += "|" + t.lang + ":" + format_double(t.rate) + ":" + format_double(t.target_chars);
    auto it = shards.shards.find(t.lang);
    if (it != shards.shards.end()) {
      for (const auto& p : it->second) key += "," + p.string();
    }
  }
  return fnv1a64(key);
}

MixResult execute(RunSpec spec, const ShardSet& shards, const MixerConfig& cfg,
                  std::map<std::string, std::unique_ptr<DocumentSource>> sources,
                  const std::string& echo) {
  const std::uint64_t fingerprint = fingerprint_of(spec, shards);
  std::vector<std::uint64_t> corpus_docs;
  std::vector<std::uint64_t> corpus_chars;
  std::vector<std::uint64_t> max_doc;
  Mixer mixer(spec.targets, std::move(sources));
  for (std::size_t i = 0; i < mixer.targets().size(); ++i) {
    corpus_docs.push_back(mixer.source(i).doc_count());
    corpus_chars.push_back(mixer.source(i).total_chars());
    max_doc.push_back(mixer.source(i).max_doc_chars());
  }
  if (cfg.resume) mixer.restore(parse_state(read_file(*cfg.resume), fingerprint));

  ShardWriter writer(spec.name_of, spec.shard_bytes, mixer.state().output);
  auto checkpoint = [&] {
    writer.flush();
    mixer.mutable_state().output = writer.position();
    write_file_atomic(spec.state_path, serialize_state(mixer.state(), fingerprint));
  };

  std::string line;
  const Mixer::Emit emit = [&](std::size_t, const DocumentRecord& doc, std::uint64_t) {
    if (spec.jsonl) {
      line = serialize_record(doc);
    } else {
      // one document per line
      line = doc.text;
      std::replace(line.begin(), line.end(), '\n', ' ');
      std::replace(line.begin(), line.end(), '\r', ' ');
    }
    line += '\n';
    writer.write(line);
  };

  MixResult result;
  while (!mixer.state().complete) {
    if (!mixer.step(emit)) break;
    const std::uint64_t done = mixer.state().total_emitted_docs;
    if (cfg.stop_after_docs > 0 && done >= cfg.stop_after_docs) {
      checkpoint();
      result.state = mixer.state();
      return result;
    }
    if (cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0) checkpoint();
  }
  mixer.mutable_state().complete = true;
  checkpoint();

  MixManifest& m = result.manifest;
  m.kind = spec.kind;
  m.config = spec.config;
  m.args = echo;
  m.warnings = spec.warnings;
  const auto& st = mixer.state();
  m.total_chars = st.total_emitted_chars;
  m.total_docs = st.total_emitted_docs;
  for (std::size_t i = 0; i < mixer.targets().size(); ++i) {
    const auto& t = mixer.targets()[i];
    const auto& l = st.langs[i];
    LanguageTotals lt;
    lt.lang = t.lang;
    lt.rate = t.rate;
    lt.target_chars = t.target_chars;
    lt.capped = t.capped;
    lt.corpus_chars = corpus_chars[i];
    lt.corpus_docs = corpus_docs[i];
    lt.max_doc_chars = max_doc[i];
    lt.emitted_chars = l.emitted_chars;
    lt.emitted_docs = l.emitted_docs;
    lt.epochs = corpus_chars[i] ? static_cast<double>(l.emitted_chars) / static_cast<double>(corpus_chars[i]) : 0.0;
    lt.wrapped = l.emitted_docs > corpus_docs[i];
    m.languages.push_back(std::move(lt));
  }
  for (std::uint64_t s = 0; s <= st.output.shard; ++s) {
    OutputFile f;
    const fs::path p = spec.name_of(s);
    f.name = p.filename().string();
    f.crc32 = crc32_of_file(p, &f.bytes, &f.docs);
    if (!spec.jsonl) f.docs = st.total_emitted_docs;
    m.outputs.push_back(std::move(f));
  }
  write_file_atomic(spec.manifest_path, format_manifest(m));
  result.complete = true;
  result.state = st;
  return result;
}

std::vector<std::pair<std::string, std::string>> common_config(const MixerConfig& cfg) {
  return {{"seed", std::to_string(cfg.seed)},
          {"shuffle", cfg.shuffle ? "true" : "false"},
          {"max_doc_chars", cfg.max_doc_chars ? std::to_string(*cfg.max_doc_chars) : "none"}};
}

}  // namespace

MixResult run_mix(const ShardSet& shards, const AllocationPlan& plan, const MixerConfig& cfg,
                  const fs::path& out_dir, const std::string& echo) {
  cfg.validate();
  const SourceOptions opts{cfg.seed, cfg.shuffle, cfg.max_doc_chars};
  std::vector<std::string> langs;
  for (const auto& a : plan.entries) {
    if (a.allocated_chars > 0) langs.push_back(a.lang);
  }
  std::sort(langs.begin(), langs.end());
  auto sources = open_sources(shards, langs, opts, cfg.threads);

  RunSpec spec;
  spec.kind = "mix";
  std::map<std::string, std::uint64_t> chars;
  for (const auto& [lang, src] : sources) chars[lang] = src->total_chars();
  spec.targets = plan_targets(plan, chars, &spec.warnings);
  for (const auto& [lang, _] : shards.shards) {
    const auto* a = plan.find(lang);
    if (!a || !(a->allocated_chars > 0)) {
      spec.warnings.push_back("'" + lang + "': shards listed but the plan allocates nothing");
    }
  }
  spec.config = {{"policy", plan.policy.describe()},
                 {"budget_chars", format_double(plan.budget_chars)},
                 {"unspent_chars", format_double(plan.unspent_chars)}};
  for (auto& kv : common_config(cfg)) spec.config.push_back(std::move(kv));
  spec.config.emplace_back("shard_bytes", std::to_string(cfg.shard_bytes));
  spec.shard_bytes = cfg.shard_bytes;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), "cannot create directory: " + ec.message());
  spec.name_of = [out_dir](std::uint64_t s) {
    char name[32];
    std::snprintf(name, sizeof name, "mix-%05llu.jsonl", static_cast<unsigned long long>(s));
    return out_dir / name;
  };
  spec.state_path = out_dir / "mix.state.json";
  spec.manifest_path = out_dir / "manifest.json";
  spec.jsonl = true;
  return execute(std::move(spec), shards, cfg, std::move(sources), echo);
}

MixResult sample_vocab_corpus(const ShardSet& shards, const Distribution& dist,
                              std::uint64_t target_chars, const MixerConfig& cfg,
                              const fs::path& out, const std::string& echo) {
  cfg.validate();
  const SourceOptions opts{cfg.seed, cfg.shuffle, cfg.max_doc_chars};
  RunSpec spec;
  spec.kind = "vocab";
  spec.targets = vocab_targets(dist, target_chars);
  std::vector<std::string> langs;
  for (const auto& t : spec.targets) langs.push_back(t.lang);
  auto sources = open_sources(shards, langs, opts, cfg.threads);
  for (const auto& t : spec.targets) {
    if (sources.at(t.lang)->total_chars() == 0) {
      throw ConfigError("language '" + t.lang + "' has positive probability but no characters");
    }
  }
  spec.config = {{"target_chars", std::to_string(target_chars)}};
  for (auto& kv : common_config(cfg)) spec.config.push_back(std::move(kv));
  spec.shard_bytes = 0;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  spec.name_of = [out](std::uint64_t) { return out; };
  spec.state_path = fs::path(out.string() + ".state.json");
  spec.manifest_path = fs::path(out.string() + ".manifest.json");
  spec.jsonl = false;
  return execute(std::move(spec), shards, cfg, std::move(sources), echo);
}

std::vector<DocumentRecord> sample_vocab_documents(
    const std::map<std::string, std::vector<DocumentRecord>>& docs, const Distribution& dist,
    std::uint64_t target_chars, const SourceOptions& opts) {
  auto targets = vocab_targets(dist, target_chars);
  std::map<std::string, std::unique_ptr<DocumentSource>> sources;
  for (const auto& t : targets) {
    auto it = docs.find(t.lang);
    if (it == docs.end()) throw ConfigError("no documents for language '" + t.lang + "'");
    sources[t.lang] = make_memory_source(t.lang, it->second, opts);
  }
  Mixer mixer(std::move(targets), std::move(sources));
  std::vector<DocumentRecord> out;
  while (mixer.step([&](std::size_t, const DocumentRecord& d, std::uint64_t) { out.push_back(d); })) {
  }
  return out;
}

void sample_vocab_shards(const ShardSet& shards, const Distribution& dist,
                         std::uint64_t target_chars, const SourceOptions& opts, unsigned threads,
                         const std::function<void(const DocumentRecord&)>& visit) {
  auto targets = vocab_targets(dist, target_chars);
  std::vector<std::string> langs;
  for (const auto& t : targets) langs.push_back(t.lang);
  Mixer mixer(std::move(targets), open_sources(shards, langs, opts, threads));
  while (mixer.step([&](std::size_t, const DocumentRecord& d, std::uint64_t) { visit(d); })) {
  }
}

}  // namespace unimix
