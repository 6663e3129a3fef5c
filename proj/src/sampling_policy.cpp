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

#include "unimix/sampling_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unimix/error.hpp"
#include "unimix/records.hpp"

namespace unimix {

std::optional<double> temperature_preset(const std::string& name) {
  for (const auto& p : kTemperaturePresets) {
    if (name == p.name) return p.tau;
  }
  return std::nullopt;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw InvalidArgument("budget overflows 64 bits");
  return r;
}

}  // namespace

std::uint64_t budget_chars(const BudgetSpec& spec) {
  if (const auto* chars = std::get_if<std::uint64_t>(&spec.value)) {
    if (*chars == 0) throw InvalidArgument("character budget must be positive");
    return *chars;
  }
  const auto& s = std::get<TokenSchedule>(spec.value);
  if (s.steps == 0 || s.batch_sequences == 0 || s.tokens_per_sequence == 0 ||
      s.chars_per_token == 0) {
    throw InvalidArgument("budget schedule components must all be positive");
  }
  return checked_mul(checked_mul(checked_mul(s.steps, s.batch_sequences),
                                 s.tokens_per_sequence),
                     s.chars_per_token);
}

SamplingPolicy SamplingPolicy::temperature(double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("temperature must be positive");
  if (std::isinf(tau)) return uniform();
  if (tau == 1.0) return proportional();
  return SamplingPolicy(Kind::kTemperature, tau, 0);
}

SamplingPolicy SamplingPolicy::unimax(double max_epochs) {
  if (!(max_epochs > 0.0) || std::isinf(max_epochs)) {
    throw InvalidArgument("max epochs N must be a positive finite number");
  }
  return SamplingPolicy(Kind::kUniMax, 0, max_epochs);
}

std::string SamplingPolicy::describe() const {
  switch (kind_) {
    case Kind::kTemperature: return "temperature(tau=" + format_double(tau_) + ")";
    case Kind::kUniMax: return "unimax(N=" + format_double(max_epochs_) + ")";
    case Kind::kProportional: return "proportional";
    case Kind::kUniform: return "uniform";
  }
  return "?";
}

Distribution::Distribution(std::map<std::string, double> probs) : probs_(std::move(probs)) {
  for (const auto& [lang, p] : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("probability of '" + lang + "' is not a finite non-negative number");
    }
  }
}

double Distribution::operator[](const std::string& lang) const {
  auto it = probs_.find(lang);
  return it == probs_.end() ? 0.0 : it->second;
}

double Distribution::sum() const {
  double s = 0;
  for (const auto& [_, p] : probs_) s += p;
  return s;
}

double Distribution::entropy() const {
  double h = 0;
  for (const auto& [_, p] : probs_) {
    if (p > 0) h -= p * std::log(p);
  }
  return h;
}

Distribution Distribution::normalize(const std::map<std::string, double>& weights) {
  double total = 0;
  for (const auto& [lang, w] : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("negative weight for '" + lang + "'");
    total += w;
  }
  if (!(total > 0.0)) throw EmptyCorpus();
  std::map<std::string, double> probs;
  for (const auto& [lang, w] : weights) probs[lang] = w / total;
  return Distribution(std::move(probs));
}

Distribution proportions(const CorpusStats& stats) {
  if (stats.total_chars() == 0) throw EmptyCorpus();
  const double total = static_cast<double>(stats.total_chars());
  std::map<std::string, double> probs;
  for (const auto& [lang, e] : stats.entries()) {
    probs[lang] = static_cast<double>(e.char_count) / total;
  }
  return Distribution(std::move(probs));
}

Distribution temperature_distribution(const CorpusStats& stats, double tau) {
  if (!(tau > 0.0)) {
    throw InvalidArgument("temperature must be positive (tau=0 is not supported)");
  }
  if (stats.total_chars() == 0) throw EmptyCorpus();
  if (tau == 1.0) return proportions(stats);

  std::map<std::string, double> probs;
  if (std::isinf(tau)) {
    std::size_t support = 0;
    for (const auto& [_, e] : stats.entries()) support += e.char_count > 0;
    for (const auto& [lang, e] : stats.entries()) {
      probs[lang] = e.char_count > 0 ? 1.0 / static_cast<double>(support) : 0.0;
    }
    return Distribution(std::move(probs));
  }

  // log q_l = log(c_l) / tau - logsumexp.
  const double inv = 1.0 / tau;
  double max_log = -HUGE_VAL;
  for (const auto& [_, e] : stats.entries()) {
    if (e.char_count > 0) max_log = std::max(max_log, std::log(static_cast<double>(e.char_count)) * inv);
  }
  double z = 0;
  for (const auto& [_, e] : stats.entries()) {
    if (e.char_count > 0) z += std::exp(std::log(static_cast<double>(e.char_count)) * inv - max_log);
  }
  const double log_z = max_log + std::log(z);
  for (const auto& [lang, e] : stats.entries()) {
    probs[lang] = e.char_count > 0
                      ? std::exp(std::log(static_cast<double>(e.char_count)) * inv - log_z)
                      : 0.0;
  }
  return Distribution(std::move(probs));
}

const Allocation* AllocationPlan::find(const std::string& lang) const {
  for (const auto& a : entries) {
    if (a.lang == lang) return &a;
  }
  return nullptr;
}

Distribution AllocationPlan::distribution() const {
  std::map<std::string, double> probs;
  for (const auto& a : entries) probs[a.lang] = a.rate;
  return Distribution(std::move(probs));
}

CorpusStats AllocationPlan::corpus() const {
  CorpusStats s;
  for (const auto& a : entries) s.add(a.lang, a.char_count, 0);
  return s;
}

double AllocationPlan::max_epochs() const {
  double m = 0;
  for (const auto& a : entries) m = std::max(m, a.epochs);
  return m;
}

namespace {

void check_budget(double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw InvalidArgument("character budget must be positive and finite");
  }
}

// Fills rate and epochs from allocated_chars and orders canonically.
void finish(AllocationPlan& plan) {
  double total = 0;
  for (const auto& a : plan.entries) total += a.allocated_chars;
  if (!(total > 0.0)) throw EmptyCorpus();
  for (auto& a : plan.entries) {
    a.rate = a.allocated_chars / total;
    a.epochs = a.char_count > 0 ? a.allocated_chars / static_cast<double>(a.char_count) : 0.0;
  }
  std::sort(plan.entries.begin(), plan.entries.end(), [](const auto& a, const auto& b) {
    return a.char_count != b.char_count ? a.char_count > b.char_count : a.lang < b.lang;
  });
}

}  // namespace

AllocationPlan unimax_allocate(const CorpusStats& stats, double budget, double max_epochs) {
  check_budget(budget);
  const SamplingPolicy policy = SamplingPolicy::unimax(max_epochs);
  if (stats.total_chars() == 0) throw EmptyCorpus();

  std::vector<LanguageStats> order = stats.canonical();
  std::reverse(order.begin(), order.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.char_count != b.char_count ? a.char_count < b.char_count : a.lang < b.lang;
  });

  AllocationPlan plan;
  plan.policy = policy;
  plan.budget_chars = budget;
  double remaining = budget;
  const std::size_t n = order.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = order[i];
    const double share = remaining / static_cast<double>(n - i);
    const double cap = static_cast<double>(l.char_count) * max_epochs;
    Allocation a;
    a.lang = l.lang;
    a.char_count = l.char_count;
    if (share > cap) {
      a.allocated_chars = cap;
      a.capped = true;
    } else {
      a.allocated_chars = share;
    }
    remaining -= a.allocated_chars;
    plan.entries.push_back(std::move(a));
  }
  // Rounding residue from the sequential subtraction is not unspent budget.
  plan.unspent_chars = remaining > budget * 1e-12 ? remaining : 0.0;
  if (plan.unspent_chars > 0.0) {
    plan.warnings.push_back("budget exceeds N epochs of the whole corpus; " +
                            format_double(plan.unspent_chars) + " chars left unspent");
  }
  finish(plan);
  return plan;
}

EpochReport epochs_for(const CorpusStats& stats, const Distribution& dist, double budget) {
  check_budget(budget);
  for (const auto& [lang, q] : dist.probs()) {
    if (q > 0 && stats.char_count(lang) == 0) {
      throw InvalidArgument("sampling an empty language: '" + lang + "'");
    }
  }
  EpochReport report;
  report.budget_chars = budget;
  std::size_t rank = 0;
  for (const auto& e : stats.canonical()) {
    EpochPoint p;
    p.lang = e.lang;
    p.rank = ++rank;
    p.char_count = e.char_count;
    p.rate = dist[e.lang];
    p.epochs = e.char_count > 0 ? p.rate * budget / static_cast<double>(e.char_count) : 0.0;
    report.points.push_back(std::move(p));
  }
  return report;
}

AllocationPlan plan_from_policy(const CorpusStats& stats, const SamplingPolicy& policy,
                                double budget) {
  if (policy.is_unimax()) return unimax_allocate(stats, budget, policy.max_epochs());
  check_budget(budget);
  const Distribution q = temperature_distribution(stats, policy.tau());
  AllocationPlan plan;
  plan.policy = policy;
  plan.budget_chars = budget;
  for (const auto& [lang, e] : stats.entries()) {
    Allocation a;
    a.lang = lang;
    a.char_count = e.char_count;
    a.allocated_chars = q[lang] * budget;
    plan.entries.push_back(std::move(a));
  }
  finish(plan);
  // Keep the exact temperature probabilities rather than the re-normalized U.
  for (auto& a : plan.entries) a.rate = q[a.lang];
  return plan;
}

}  // namespace unimix
