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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "unimix/corpus_stats.hpp"

namespace unimix {

inline constexpr double kInfiniteTemperature = std::numeric_limits<double>::infinity();
inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kShareTolerance = 1e-6;

// Named presets for commonly used model temperatures.
struct TemperaturePreset {
  const char* name;
  double tau;
};
inline constexpr TemperaturePreset kTemperaturePresets[] = {
    {"mbert", 1.43}, {"xlm", 2.0}, {"xlm-r", 3.33}, {"mt5", 3.33}, {"xlm-e", 1.43},
};
std::optional<double> temperature_preset(const std::string& name);

struct TokenSchedule {
  std::uint64_t steps = 0;
  std::uint64_t batch_sequences = 0;
  std::uint64_t tokens_per_sequence = 0;
  std::uint64_t chars_per_token = 4;
};

// A budget either given directly in characters or derived from a training
// schedule: steps * batch * tokens_per_sequence * chars_per_token.
struct BudgetSpec {
  std::variant<std::uint64_t, TokenSchedule> value;

  static BudgetSpec chars(std::uint64_t c) { return {c}; }
  static BudgetSpec schedule(TokenSchedule s) { return {s}; }
};

// Throws InvalidArgument on zero components or overflow.
std::uint64_t budget_chars(const BudgetSpec& spec);

class SamplingPolicy {
 public:
  enum class Kind { kTemperature, kUniMax, kProportional, kUniform };

  static SamplingPolicy temperature(double tau);
  static SamplingPolicy unimax(double max_epochs);
  static SamplingPolicy proportional() { return SamplingPolicy(Kind::kProportional, 1.0, 0); }
  static SamplingPolicy uniform() {
    return SamplingPolicy(Kind::kUniform, kInfiniteTemperature, 0);
  }

  Kind kind() const { return kind_; }
  // Effective temperature for temperature-family policies.
  double tau() const { return tau_; }
  double max_epochs() const { return max_epochs_; }
  bool is_unimax() const { return kind_ == Kind::kUniMax; }

  // "temperature(tau=3.33)", "unimax(N=1)", "proportional", "uniform".
  std::string describe() const;

  bool operator==(const SamplingPolicy&) const = default;

 private:
  SamplingPolicy(Kind k, double tau, double n) : kind_(k), tau_(tau), max_epochs_(n) {}
  Kind kind_;
  double tau_;
  double max_epochs_;
};

// Normalized per-language probabilities.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::map<std::string, double> probs);

  double operator[](const std::string& lang) const;
  const std::map<std::string, double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double sum() const;
  // Shannon entropy in nats.
  double entropy() const;

  // Normalizes non-negative weights; throws EmptyCorpus if they sum to 0.
  static Distribution normalize(const std::map<std::string, double>& weights);

 private:
  std::map<std::string, double> probs_;
};

Distribution proportions(const CorpusStats& stats);

// q_l proportional to c_l^(1/tau), computed in log space. tau == 1 returns
// proportions(stats) exactly; tau == infinity is uniform over languages with
// c_l > 0.
Distribution temperature_distribution(const CorpusStats& stats, double tau);

struct Allocation {
  std::string lang;
  std::uint64_t char_count = 0;
  double allocated_chars = 0;  // U_l
  double rate = 0;             // U_l / sum U
  double epochs = 0;           // U_l / c_l
  bool capped = false;
};

struct AllocationPlan {
  SamplingPolicy policy = SamplingPolicy::proportional();
  double budget_chars = 0;
  double unspent_chars = 0;
  std::vector<Allocation> entries;  // descending char_count, ties by lang
  std::vector<std::string> warnings;

  const Allocation* find(const std::string& lang) const;
  Distribution distribution() const;
  CorpusStats corpus() const;
  double max_epochs() const;
};

// Water-filling allocation: visit languages by ascending char count (ties by
// lang), give each min(remaining / languages_left, N * c_l).
AllocationPlan unimax_allocate(const CorpusStats& stats, double budget, double max_epochs);

struct EpochPoint {
  std::string lang;
  std::size_t rank = 0;  // 1-based, descending char count
  std::uint64_t char_count = 0;
  double rate = 0;
  double epochs = 0;
};

struct EpochReport {
  double budget_chars = 0;
  std::vector<EpochPoint> points;
};

EpochReport epochs_for(const CorpusStats& stats, const Distribution& dist, double budget);

AllocationPlan plan_from_policy(const CorpusStats& stats, const SamplingPolicy& policy,
                                double budget);

}  // namespace unimix
