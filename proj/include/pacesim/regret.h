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

// Single-agent analysis against a known environment. One round's
// environment is a finite distribution over (own value, competing bids);
// with smoothing width eta > 0 every competing bid is shifted by independent
// uniform [0, eta] noise, which makes the expected spend Z(mu) continuous.
//
//   Z(mu) = E[payment],  V(mu) = E[v x]   at bid v / (1 + mu)
//   H(mu) = rho mu - int_0^mu Z
//   W(mu) = V if Z < rho else V rho / Z
//
// Expectations are exact: plain enumeration without smoothing, and with
// smoothing a Poisson-binomial rank distribution per atom plus Gauss-Legendre
// integration over polynomial pieces for the next-highest-bid price.

#ifndef PACESIM_REGRET_H_
#define PACESIM_REGRET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pacesim/auction.h"
#include "pacesim/market.h"
#include "pacesim/pacing.h"
#include "pacesim/parallel.h"

namespace pacesim {

struct EnvironmentAtom {
  double prob = 0.0;
  double value = 0.0;
  std::vector<double> competing_bids;
};

class EnvironmentStep {
 public:
  // Every atom must list the same number of competing bids. Throws
  // ConfigError on bad probabilities, negative entries or eta < 0.
  EnvironmentStep(AuctionFormat format, FeasibleSet feasible,
                  std::vector<EnvironmentAtom> atoms, double smoothing = 0.0);

  const Mechanism& mechanism() const { return mechanism_; }
  const std::vector<EnvironmentAtom>& atoms() const { return atoms_; }
  std::size_t num_competitors() const { return competitors_; }
  double smoothing() const { return smoothing_; }
  double value_cap() const { return value_cap_; }

  // Atom index for a uniform draw.
  std::size_t SampleAtom(double u) const;

  // Multipliers at which some atom's bid crosses a competing bid or the end
  // of its noise interval; Z and V are smooth between consecutive kinks.
  std::vector<double> Kinks(double mu_cap) const;

 private:
  Mechanism mechanism_;
  std::vector<EnvironmentAtom> atoms_;
  std::vector<double> cumulative_;
  std::size_t competitors_ = 0;
  double smoothing_ = 0.0;
  double value_cap_ = 1.0;
};

struct CurvePoint {
  double spend = 0.0;  // Z
  double value = 0.0;  // V
};

// Requires mu >= 0.
CurvePoint ExpectedCurves(const EnvironmentStep& env, double mu);

// mu* with |Z(mu*) - rho| <= tol, or 0 when Z(0) < rho. Throws
// PreconditionError when mu_cap < vbar / rho and RequiresSmoothingError when
// a jump in Z straddles rho.
double PerfectMultiplier(const EnvironmentStep& env, double rho, double mu_cap,
                         double tol);
double PerfectMultiplier(const EnvironmentStep& env, double rho, double mu_cap);

double ArtificialObjective(const EnvironmentStep& env, double rho, double mu);

// H(mu) - H(mu_ref) = rho (mu - mu_ref) - int_{mu_ref}^{mu} Z.
double ObjectiveGap(const EnvironmentStep& env, double rho, double mu,
                    double mu_ref);

// H at every point of an ascending grid, integrating piece by piece.
std::vector<double> ArtificialObjectiveOnGrid(const EnvironmentStep& env,
                                              double rho,
                                              std::span<const double> grid);

double WCurve(double value, double spend, double rho);
double WCurve(const EnvironmentStep& env, double rho, double mu);

// Measured regularity constants over a set of environments: the Lipschitz
// constant of Z on a uniform grid over [0, mu_cap], the floor min Z(0), and
// the weaker floor min Z(0) vbar / V(0) over environments with V(0) > 0.
struct SmoothnessEstimate {
  double lipschitz = 0.0;
  double floor = 0.0;
  double weak_floor = 0.0;
};
SmoothnessEstimate MeasureSmoothness(std::span<const EnvironmentStep> envs,
                                     double mu_cap, std::size_t grid_points);

// Environment per round: steps[round_env[t]] governs round t (zero-based).
struct EnvironmentSchedule {
  std::vector<EnvironmentStep> steps;
  std::vector<std::size_t> round_env;

  std::size_t rounds() const { return round_env.size(); }
  const EnvironmentStep& at(std::size_t t) const {
    return steps[round_env[t]];
  }
  double value_cap() const;
  // Number of t with round_env[t + 1] != round_env[t].
  std::size_t switches() const;

  static EnvironmentSchedule Stationary(EnvironmentStep step,
                                        std::size_t rounds);
  // Cycles through `steps`, switching every `segment` rounds.
  static EnvironmentSchedule Switching(std::vector<EnvironmentStep> steps,
                                       std::size_t rounds,
                                       std::size_t segment);
};

struct PerfectPacingSequence {
  std::vector<double> multipliers;  // per round
  std::vector<double> residuals;    // |Z_t(mu*_t) - rho|
  double path_length = 0.0;
};

PerfectPacingSequence ComputePerfectPacing(
    const EnvironmentSchedule& schedule, double rho, double mu_cap,
    Execution exec = Execution::kParallel);

// Agent 0 runs the pacing algorithm; agents 1.. are the sampled competing
// bids (status kNone, unlimited budgets).
Trace SimulateAgainstEnvironment(const EnvironmentSchedule& schedule,
                                 const AgentConfig& config, std::uint64_t seed,
                                 std::uint64_t replication);

struct RegretReport {
  std::size_t rounds = 0;
  std::size_t stopped_rounds = 0;
  double value_regret = 0.0;  // sum V(mu*) - sum V(mu), V = 0 once stopped
  double sgd_regret = 0.0;    // sum over bidding rounds of H(mu) - H(mu*)
  double benchmark_value = 0.0;
  double path_length = 0.0;
  double reg1_bound = 0.0;     // C ((P + 1) mu_cap^2 + (rho + vbar)^2) sqrt T
  double regret_bound = 0.0;   // C ((vbar / delta) sqrt(2 lambda T REG1) + vbar mu_cap sqrt T / rho)
  double weak_regret_bound = 0.0;  // same with the weaker floor
  SmoothnessEstimate smoothness;
  double delta = 0.0;  // min(rho, floor)
  double weak_delta = 0.0;
};

// Throws ConfigError when the trace and schedule lengths differ.
RegretReport DynamicRegret(const Trace& trace,
                           const EnvironmentSchedule& schedule, double rho,
                           double mu_cap,
                           Execution exec = Execution::kParallel);

// Bound terms only; shared by DynamicRegret and reporting code.
void FillRegretBounds(RegretReport& report, double rho, double mu_cap,
                      double vbar);

struct StochasticValueEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replications = 0;
};

// Total value of bidding v / (1 + mu), clamped to the remaining budget,
// for T rounds or until the budget runs out.
StochasticValueEstimate StochasticValue(const EnvironmentStep& env, double mu,
                                        double budget, std::int64_t T,
                                        std::size_t replications,
                                        std::uint64_t seed,
                                        Execution exec = Execution::kParallel);

// Least-squares slope of log(y) on log(x), with y floored at `floor`.
double FitGrowthExponent(std::span<const double> x, std::span<const double> y,
                         double floor = 1.0);

}  // namespace pacesim

#endif  // PACESIM_REGRET_H_
