// Copyright 2026 The Pacesim Authors.
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

// Liquid welfare of a realized trace, the exact ex-ante optimum on a finite
// value model, sequence-rule collapse and the half-optimum bound check.

#ifndef PACESIM_WELFARE_H_
#define PACESIM_WELFARE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pacesim/auction.h"
#include "pacesim/market.h"

namespace pacesim {

struct LiquidWelfareReport {
  std::vector<double> liquid_value;  // min{B_k, sum_t x v}
  std::vector<double> value;         // sum_t x v
  std::vector<double> spend;         // sum_t z
  double total = 0.0;
  double total_spend = 0.0;
};

LiquidWelfareReport LiquidWelfare(const Trace& trace,
                                  std::span<const double> budgets);

// Per-scenario allocation profile: allocation[s][k].
struct ExAnteRule {
  std::vector<std::vector<double>> allocation;
};

// sum_k min{B_k, T * sum_s q_s y_k(s) v_k(s)}.
double ExAnteLiquidWelfare(const ExAnteRule& rule, const ValueModel& model,
                           std::span<const double> budgets, std::int64_t T);

// Rule that gives every scenario the same profile.
ExAnteRule ConstantRule(const ValueModel& model, std::vector<double> profile);

struct ExAnteSolution {
  ExAnteRule rule;
  double optimum = 0.0;
  std::size_t pivots = 0;
};

// Exact optimum of the linearized ex-ante program. Throws CapacityError when
// n * |support| exceeds the solver's variable budget or a polymatroid has
// more agents than the subset enumeration supports.
ExAnteSolution SolveExAnteOptimum(const ValueModel& model,
                                  const FeasibleSet& feasible,
                                  std::span<const double> budgets,
                                  std::int64_t T);

// Allocation for round t given the scenario history s_1..s_t (the last entry
// is the current round's scenario).
using SequenceRule =
    std::function<std::vector<double>(std::span<const std::size_t> history)>;

struct CollapsedRule {
  ExAnteRule rule;
  bool exact = false;
  std::size_t samples = 0;  // Monte Carlo sequences when not exact
  std::vector<std::vector<double>> standard_error;  // same shape as rule
  double sequence_welfare = 0.0;   // sum_k min{B_k, E[sum_t y v]}
  double collapsed_welfare = 0.0;  // ExAnteLiquidWelfare of the result
};

// Averages a sequence rule over time: y~_k(s) = (1/T) sum_t E[y_{k,t} | s_t = s].
// Enumerates all |S|^T histories when that is at most the enumeration cap,
// else samples `samples` sequences.
CollapsedRule CollapseSequenceRule(const SequenceRule& rule,
                                   const ValueModel& model,
                                   std::span<const double> budgets,
                                   std::int64_t T, std::uint64_t seed = 0,
                                   std::size_t samples = 100000);

struct WelfareBoundCheck {
  std::size_t replications = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double lower = 0.0;  // mean - z99 * stderr
  double optimum = 0.0;
  double bound = 0.0;  // optimum / 2 - C n vbar sqrt(T log(vbar n T))
  double margin = 0.0;
  double ratio = 0.0;  // mean / optimum
  bool pass = false;
};

// Throws StatisticsError with fewer than `min_replications` samples.
WelfareBoundCheck VerifyWelfareBound(std::span<const double> welfare,
                                     double optimum, std::size_t n,
                                     double vbar, std::int64_t T,
                                     std::size_t min_replications);
WelfareBoundCheck VerifyWelfareBound(std::span<const double> welfare,
                                     double optimum, std::size_t n,
                                     double vbar, std::int64_t T);

// C n vbar sqrt(T log(vbar n T)), with the log clamped at zero.
double WelfareSlack(std::size_t n, double vbar, std::int64_t T);

// E[W - P] >= 0 checked on paired per-replication samples at 99%.
struct SpendCheck {
  double mean_gap = 0.0;
  double standard_error = 0.0;
  bool pass = false;
};
SpendCheck VerifySpendBelowWelfare(std::span<const double> welfare,
                                   std::span<const double> spend);

// Two agents, values (2, 1) surely, single-slot second price, budgets
// (T / (1 + mu_cap), T); agent 1 scripted to bid 2, agent 2 to bid 0.
SimulationConfig CounterexampleScenario(double mu_cap, std::int64_t T);

// The same market with both agents running the pacing algorithm.
SimulationConfig CounterexamplePacedScenario(double mu_cap, std::int64_t T);

// Comparison allocation for the counterexample: every item to agent 2.
ExAnteRule CounterexampleReferenceRule();

}  // namespace pacesim

#endif  // PACESIM_WELFARE_H_
