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

// Standalone checkers for the martingale tail bound, projected SGD with a
// moving comparator, the integrated-Lipschitz inequality, the GSP core
// inequality and the per-agent R_k diagnostic. Monte Carlo checks pass when
// the estimate is within three standard errors of the analytic bound; sure
// inequalities use an absolute tolerance of 1e-9.

#ifndef PACESIM_VERIFY_H_
#define PACESIM_VERIFY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pacesim/auction.h"
#include "pacesim/market.h"
#include "pacesim/parallel.h"
#include "pacesim/rng.h"
#include "pacesim/welfare.h"

namespace pacesim {

struct CheckResult {
  std::string checker;
  std::size_t trials = 0;
  double statistic = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// ---- concentration ----

// What a selector may look at before round `round` (one-based) is played.
struct MartingaleHistory {
  std::int64_t round = 1;
  double statistic = 0.0;  // sum_{s < round} X_s Y_s + (1 - X_s) rho
  double y_sum = 0.0;      // sum_{s < round} Y_s
};

struct MartingaleSetup {
  std::string name;
  double rho = 0.0;
  double vbar = 0.0;
  std::int64_t horizon = 0;
  std::function<double(RandomStream&)> draw;  // Y_t in [0, vbar]
  std::function<double(const MartingaleHistory&)> selector;  // X_t in [0, 1]
  double theta = 0.0;

  // X = 0: the statistic is rho T surely.
  static MartingaleSetup Degenerate(std::int64_t horizon);
  // Y uniform on [0, 2 rho], X = 1, vbar = 2 rho, theta = rho sqrt(T).
  static MartingaleSetup Uniform(std::int64_t horizon);
  // As Uniform, but X_t = 1 only while the running Y sum is below its mean.
  static MartingaleSetup Adversarial(std::int64_t horizon);
  // Y uniform on [rho, 3 rho]: E[Y] = 2 rho breaks the hypothesis.
  static MartingaleSetup AboveMean(std::int64_t horizon);
};

struct ConcentrationResult {
  std::size_t trials = 0;
  double frequency = 0.0;  // of statistic >= rho T + theta
  double bound = 0.0;      // exp(-2 theta^2 / (T vbar^2))
  double standard_error = 0.0;
  bool pass = false;
};

// Throws PreconditionError when a draw leaves [0, vbar] or X leaves [0, 1].
ConcentrationResult ConcentrationCheck(const MartingaleSetup& setup,
                                       std::size_t trials, std::uint64_t seed,
                                       Execution exec = Execution::kParallel);

// ---- projected SGD with a moving comparator ----

// f_t(x) = (x - u_t)^2 / 2 on [lo, hi]; gradients carry uniform noise on
// [-noise, noise]. u_t = center + amplitude sin(2 pi cycles t / T).
struct SgdProblem {
  double lo = 0.0;
  double hi = 1.0;
  std::int64_t horizon = 0;
  double noise = 0.0;
  double center = 0.5;
  double amplitude = 0.0;
  double cycles = 0.0;
  double start = 0.0;

  double diameter() const { return hi - lo; }
  double gradient_bound() const { return diameter() + noise; }
  double comparator(std::int64_t t) const;  // one-based
  // sum_t |u_{t+1} - u_t| + 1.
  double path_bound() const;
  // D sqrt(P / (G^2 T)).
  double tuned_learning_rate() const;

  static SgdProblem Static(std::int64_t horizon);
  static SgdProblem Drifting(std::int64_t horizon);
};

struct SgdResult {
  std::size_t trials = 0;
  double learning_rate = 0.0;
  double regret = 0.0;  // mean over trials
  double standard_error = 0.0;
  double bound = 0.0;   // C (D^2 P / eps + eps G^2 T)
  bool pass = false;
};

// With eps = 0 the bound is evaluated at the tuned rate, so the frozen
// iterate is compared against what learning would guarantee.
SgdResult SgdRegretCheck(const SgdProblem& problem, double learning_rate,
                         std::size_t trials, std::uint64_t seed,
                         Execution exec = Execution::kParallel);

// ---- integrated Lipschitz inequality ----

// Linear interpolation through (knots[i], values[i]); knots ascending from
// 0, values[0] = 0.
struct PiecewiseLinear {
  std::vector<double> knots;
  std::vector<double> values;

  double operator()(double x) const;
  // Exact int_0^x f for x in [0, knots.back()].
  double Integral(double x) const;
};

// Throws PreconditionError unless f(0) = 0, f is non-decreasing and every
// slope is at most lambda.
void ValidateLipschitzIncreasing(const PiecewiseLinear& f, double lambda);

// |f(x)| <= sqrt(2 lambda int_0^x f) after validating f.
bool LipintHolds(const PiecewiseLinear& f, double lambda, double x);

// Random monotone piecewise-linear functions. The negative control declares
// a quarter of the true Lipschitz constant and skips validation.
CheckResult LipintFuzz(std::size_t trials, std::uint64_t seed, bool negative,
                       Execution exec = Execution::kParallel);

// ---- GSP core inequality ----

// For bids sorted in decreasing order and every subset S of bidders:
//   sum_{i not in S} b_{i+1} a_i + sum_{i in S} b_i a_i >= sum_{i in S} b_i a_{sigma(i)}
// with sigma(i) = 1 + |{j in S : j < i}|. Returns the smallest slack.
// Throws CapacityError above kMaxGspCoreAgents bidders or slots.
double GspCoreSlack(std::span<const double> click_rates,
                    std::span<const double> bids, bool zero_prices = false);

CheckResult GspCoreFuzz(std::size_t trials, std::uint64_t seed, bool negative,
                        Execution exec = Execution::kParallel);

// ---- MBB and core on the three formats ----

// Per format: random profiles (n <= 6, m <= 4), MBB on random bid raises and
// the core inequality against each sampled coalition's best deviation. The
// negative control charges nothing, which breaks the core.
CheckResult MbbCoreFuzz(std::size_t trials_per_format, std::uint64_t seed,
                        bool negative, Execution exec = Execution::kParallel);

// ---- R_k diagnostic ----

// Caps every agent's expected per-round value under the rule at rho_k by
// scaling its allocations down (the feasible set is downward closed).
ExAnteRule TrimRuleToRates(const ExAnteRule& rule, const ValueModel& model,
                           std::span<const double> budgets, std::int64_t T);

// R_k = sum_t [mu_t = 0] y_k(v_t) v_{k,t} + [mu_t != 0] rho_k; rounds after
// the stop count as mu != 0. Throws LookupError when a round's value profile
// is not in the model's support.
double RkDiagnostic(const Trace& trace, const ExAnteRule& rule,
                    const ValueModel& model, std::size_t agent);

// rho_k T + vbar sqrt(T log(vbar n T)).
double RkBound(double rho, double vbar, std::size_t n, std::int64_t T);

}  // namespace pacesim

#endif  // PACESIM_VERIFY_H_
