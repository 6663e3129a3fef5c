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

// Runs the command-line tool as a subprocess.

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Dir {
  fs::path path;
  Dir() {
    path = fs::temp_directory_path() / ("unimix-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~Dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void put(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string get(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Exit status of `unimix <args>`, with output captured to <dir>/log.
int run(const Dir& dir, const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" UNIMIX_CLI "' " + args + " >'" + (dir / "log") + "' 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string log_of(const Dir& dir) { return get(dir / "log"); }

// File contents without the echoed arguments, which name each run's --out.
std::string body(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("# args:", 0) == 0 || line.find("\"args\":") != std::string::npos) continue;
    out += line + "\n";
  }
  return out;
}

void write_corpus(const Dir& dir) {
  fs::create_directories(dir.path / "in");
  std::string manifest = "# unimix-shards v1\n";
  const char* langs[] = {"de", "en", "sw"};
  for (int l = 0; l < 3; ++l) {
    const int docs = 60 / (l + 1);
    for (int s = 0; s < 2; ++s) {
      std::string text;
      for (int i = 0; i < docs; ++i) {
        text += "{\"text\":\"doc " + std::to_string(s * 100 + i) + (i % 11 == 0 ? " spam" : "") +
                "\",\"lang\":\"" + langs[l] + "\",\"confidence\":" + (i % 7 == 0 ? "0.9" : "0.99") +
                ",\"source_id\":\"" + std::to_string(s) + "-" + std::to_string(i) + "\"}\n";
      }
      const std::string name = std::string(langs[l]) + std::to_string(s) + ".jsonl";
      put(dir / ("in/" + name), text);
      manifest += std::string(langs[l]) + "\tin/" + name + "\n";
    }
  }
  put(dir / "block.tsv", "en\tspam\nsw\tspam\n");
  put(dir / "shards.tsv", manifest);
}

}  // namespace

TEST_CASE("cli: version and usage errors") {
  Dir dir;
  CHECK(run(dir, "--version") == 0);
  CHECK(log_of(dir).find("0.3.0") != std::string::npos);
  CHECK(run(dir, "plan --bogus") == 1);
  CHECK(run(dir, "plan --stats x --out y") == 1);  // no policy
  CHECK(run(dir, "plan --stats '" UNIMIX_DATA "/table_stats.tsv' --out '" + (dir / "p") +
                     "' --temperature 3 --uniform") == 1);
  CHECK(run(dir, "plan --stats '" UNIMIX_DATA "/table_stats.tsv' --out '" + (dir / "p") +
                     "' --unimax-epochs 1") == 1);  // no budget
  CHECK(run(dir, "plan --stats '" UNIMIX_DATA "/table_stats.tsv' --out '" + (dir / "p") +
                     "' --temperature -1") == 1);
}

TEST_CASE("cli: runtime failures exit 2") {
  Dir dir;
  CHECK(run(dir, "plan --stats '" + (dir / "missing.tsv") + "' --out '" + (dir / "p") + "' --uniform") == 2);
  put(dir / "bad.tsv", "# unimix-stats v1\nlang\tchar_count\n");
  CHECK(run(dir, "plan --stats '" + (dir / "bad.tsv") + "' --out '" + (dir / "p") + "' --uniform") == 2);
  CHECK(log_of(dir).find("bad.tsv") != std::string::npos);
}

TEST_CASE("cli: table plans at the published budgets") {
  Dir dir;
  REQUIRE(run(dir, "plan --stats '" UNIMIX_DATA "/table_stats.tsv' --out '" + (dir / "u.tsv") +
                       "' --unimax-epochs 1 --steps 250000 --batch 1024 --chunk-tokens 568") == 0);
  const std::string plan = get(dir / "u.tsv");
  CHECK(plan.rfind("# unimix-plan v1\n", 0) == 0);
  CHECK(plan.find("# args: plan --stats") != std::string::npos);
  CHECK(plan.find("@budget_chars\t5.81632e+11") != std::string::npos);
  REQUIRE(run(dir, "plan --stats '" UNIMIX_DATA "/table_stats.tsv' --out '" + (dir / "t.tsv") +
                       "' --preset mt5") == 0);
  REQUIRE(run(dir, "analyze --plan '" + (dir / "u.tsv") + "' --plan '" + (dir / "t.tsv") +
                       "' --speakers '" UNIMIX_DATA "/speakers_approx.tsv' --out '" + (dir / "an") + "'") == 0);
  CHECK(fs::exists(dir.path / "an/representation_u.csv"));
  CHECK(fs::exists(dir.path / "an/curves_epochs.csv"));
  REQUIRE(run(dir, "compare --stats '" UNIMIX_DATA "/table_stats.tsv' --policy tau=1 --policy preset=mt5 "
                   "--policy unimax=1 --budget-chars 4653056000000 --out '" + (dir / "cmp.csv") + "'") == 0);
  CHECK(get(dir / "cmp.csv").find("en") != std::string::npos);
}

TEST_CASE("cli: stats are identical across thread counts") {
  Dir dir;
  write_corpus(dir);
  const std::string common = "stats --in '" + (dir / "in") + "' --blocklist '" + (dir / "block.tsv") + "' --no-prune";
  REQUIRE(run(dir, common + " --out '" + (dir / "one.tsv") + "' --threads 1") == 0);
  REQUIRE(run(dir, common + " --out '" + (dir / "four.tsv") + "' --threads 4") == 0);
  REQUIRE(run(dir, common + " --out '" + (dir / "env.tsv") + "'", "UNIMIX_THREADS=3") == 0);
  const std::string one = get(dir / "one.tsv");
  CHECK(one.rfind("# unimix-stats v1\n", 0) == 0);
  CHECK(body(one) == body(get(dir / "four.tsv")));
  CHECK(body(one) == body(get(dir / "env.tsv")));
  CHECK(body(get(dir / "one.tsv.report.json")) == body(get(dir / "four.tsv.report.json")));
  CHECK(run(dir, common + " --out '" + (dir / "x.tsv") + "' --confidence 1.5") == 1);
}

TEST_CASE("cli: mix is deterministic and resumes byte-identically") {
  Dir dir;
  write_corpus(dir);
  REQUIRE(run(dir, "stats --in '" + (dir / "in") + "' --out '" + (dir / "s.tsv") + "'") == 0);
  REQUIRE(run(dir, "plan --stats '" + (dir / "s.tsv") + "' --out '" + (dir / "p.tsv") +
                       "' --unimax-epochs 2 --budget-chars 3000") == 0);
  const std::string mix = "mix --plan '" + (dir / "p.tsv") + "' --shards '" + (dir / "shards.tsv") +
                          "' --seed 11 --shuffle --shard-bytes 700 --out ";
  REQUIRE(run(dir, mix + "'" + (dir / "a") + "'") == 0);
  REQUIRE(run(dir, mix + "'" + (dir / "b") + "' --threads 3") == 0);
  REQUIRE(run(dir, mix + "'" + (dir / "c") + "' --checkpoint-every 5 --stop-after 40") == 0);
  CHECK(log_of(dir).find("--resume") != std::string::npos);
  REQUIRE(run(dir, mix + "'" + (dir / "c") + "' --resume '" + (dir / "c/mix.state.json") + "'") == 0);
  int shards = 0;
  for (const auto& e : fs::directory_iterator(dir.path / "a")) {
    const std::string name = e.path().filename().string();
    const std::string a = body(get(e.path().string()));
    shards += name.rfind("mix-", 0) == 0;
    CHECK_MESSAGE(a == body(get(dir / ("b/" + name))), name);
    CHECK_MESSAGE(a == body(get(dir / ("c/" + name))), name);
  }
  CHECK(shards > 1);
  CHECK(run(dir, "mix --plan '" + (dir / "p.tsv") + "' --shards '" + (dir / "shards.tsv") +
                     "' --seed 12 --shuffle --shard-bytes 700 --out '" + (dir / "c") + "' --resume '" +
                     (dir / "c/mix.state.json") + "'") == 1);

  REQUIRE(run(dir, "vocab-corpus --plan '" + (dir / "p.tsv") + "' --shards '" + (dir / "shards.tsv") +
                       "' --target-chars 5e2 --out '" + (dir / "v.txt") + "'") == 0);
  CHECK(get(dir / "v.txt").find("doc") != std::string::npos);
}

TEST_CASE("cli: options from a config file") {
  Dir dir;
  put(dir / "run.toml", "[plan]\nstats = \"" UNIMIX_DATA "/table_stats.tsv\"\nout = \"" + (dir / "cfg.tsv") +
                            "\"\nunimax-epochs = 1\nbudget-chars = \"4653056000000\"\n");
  REQUIRE(run(dir, "--config '" + (dir / "run.toml") + "' plan") == 0);
  REQUIRE(run(dir, "plan --stats '" UNIMIX_DATA "/table_stats.tsv' --out '" + (dir / "direct.tsv") +
                       "' --unimax-epochs 1 --budget-chars 4653056000000") == 0);
  CHECK(body(get(dir / "cfg.tsv")) == body(get(dir / "direct.tsv")));
}
