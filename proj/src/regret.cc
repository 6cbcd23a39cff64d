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

#include "pacesim/regret.h"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "pacesim/constants.h"
#include "pacesim/errors.h"
#include "pacesim/rng.h"

namespace pacesim {

namespace {

// Gauss-Legendre with 20 nodes integrates polynomials of degree <= 39
// exactly; the price integrand has degree at most the competitor count.
constexpr std::size_t kMaxSmoothedCompetitors = 39;

}  // namespace

EnvironmentStep::EnvironmentStep(AuctionFormat format, FeasibleSet feasible,
                                 std::vector<EnvironmentAtom> atoms,
                                 double smoothing)
    : mechanism_(format, feasible,
                 1 + (atoms.empty() ? 0 : atoms.front().competing_bids.size())),
      atoms_(std::move(atoms)),
      smoothing_(smoothing) {
  if (atoms_.empty()) throw ConfigError("environment has no atoms");
  if (!(smoothing_ >= 0.0) || !std::isfinite(smoothing_)) {
    throw ConfigError("smoothing width must be a non-negative number");
  }
  competitors_ = atoms_.front().competing_bids.size();
  if (smoothing_ > 0.0 && competitors_ > kMaxSmoothedCompetitors) {
    throw ConfigError("smoothed environments support at most " +
                      std::to_string(kMaxSmoothedCompetitors) +
                      " competing bids");
  }
  double total = 0.0;
  for (const EnvironmentAtom& a : atoms_) {
    if (!(a.prob >= 0.0 && a.prob <= 1.0)) {
      throw ConfigError("atom probability outside [0, 1]");
    }
    if (!(a.value >= 0.0) || !std::isfinite(a.value)) {
      throw ConfigError("atom value must be finite and non-negative");
    }
    if (a.competing_bids.size() != competitors_) {
      throw ConfigError("atoms list different numbers of competing bids");
    }
    for (double c : a.competing_bids) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw ConfigError("competing bids must be finite and non-negative");
      }
    }
    value_cap_ = std::max(value_cap_, a.value);
    total += a.prob;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw ConfigError("environment probabilities sum to " +
                      std::to_string(total) + ", expected 1");
  }
}

std::size_t EnvironmentStep::SampleAtom(double u) const {
  const double target = u * cumulative_.back();
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()),
                  atoms_.size() - 1);
}

std::vector<double> EnvironmentStep::Kinks(double mu_cap) const {
  std::vector<double> kinks;
  for (const EnvironmentAtom& a : atoms_) {
    if (a.value <= 0.0) continue;
    for (double c : a.competing_bids) {
      for (double x : {c, c + smoothing_}) {
        if (x <= 0.0) continue;
        const double mu = a.value / x - 1.0;
        if (mu > 0.0 && mu < mu_cap) kinks.push_back(mu);
      }
    }
  }
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());
  return kinks;
}

namespace {

struct AtomOutcome {
  double spend = 0.0;
  double allocation = 0.0;
};

// Coefficients of prod_j (low_j + above_j z): out[r] is the probability that
// exactly r competitors sit above the bid and every other one is "low".
void RankPolynomial(std::span<const double> above, std::span<const double> low,
                    std::vector<double>& out) {
  out.assign(above.size() + 1, 0.0);
  out[0] = 1.0;
  for (std::size_t j = 0; j < above.size(); ++j) {
    for (std::size_t r = j + 1; r > 0; --r) {
      out[r] = out[r] * low[j] + out[r - 1] * above[j];
    }
    out[0] *= low[j];
  }
}

double ExpectedSlotRate(const FeasibleSet& fs, std::span<const double> ranks) {
  double x = 0.0;
  for (std::size_t r = 0; r < ranks.size(); ++r) x += fs.SlotRate(r + 1) * ranks[r];
  return x;
}

AtomOutcome SmoothedAtom(const Mechanism& mech,
                         std::span<const double> competing, double eta,
                         double bid) {
  AtomOutcome out;
  if (bid <= 0.0) return out;
  const FeasibleSet& fs = mech.feasible();
  const std::size_t J = competing.size();
  std::vector<double> above(J), not_above(J), ranks;
  for (std::size_t j = 0; j < J; ++j) {
    above[j] = std::clamp((competing[j] + eta - bid) / eta, 0.0, 1.0);
    not_above[j] = 1.0 - above[j];
  }
  RankPolynomial(above, not_above, ranks);
  out.allocation = ExpectedSlotRate(fs, ranks);
  if (mech.format() == AuctionFormat::kFirstPrice) {
    out.spend = bid * out.allocation;
    return out;
  }
  // Next-highest-bid price: E[x M] = int_0^b (E[x] - E[x; nothing in (m, b)]) dm.
  std::vector<double> cuts = {0.0, bid};
  for (double c : competing) {
    for (double x : {c, c + eta}) {
      if (x > 0.0 && x < bid) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> low(J);
  auto integrand = [&](double m) {
    for (std::size_t j = 0; j < J; ++j) {
      low[j] = std::clamp((m - competing[j]) / eta, 0.0, 1.0);
    }
    RankPolynomial(above, low, ranks);
    return out.allocation - ExpectedSlotRate(fs, ranks);
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    out.spend += boost::math::quadrature::gauss<double, 20>::integrate(
        integrand, cuts[i], cuts[i + 1]);
  }
  return out;
}

}  // namespace

CurvePoint ExpectedCurves(const EnvironmentStep& env, double mu) {
  if (!(mu >= 0.0)) throw PreconditionError("multiplier must be non-negative");
  CurvePoint p;
  const Mechanism& mech = env.mechanism();
  if (env.smoothing() > 0.0) {
    for (const EnvironmentAtom& a : env.atoms()) {
      if (a.prob == 0.0) continue;
      const double bid = a.value / (1.0 + mu);
      const AtomOutcome o = SmoothedAtom(mech, a.competing_bids, env.smoothing(), bid);
      p.spend += a.prob * o.spend;
      p.value += a.prob * a.value * o.allocation;
    }
    return p;
  }
  thread_local AuctionOutcome outcome;
  thread_local std::vector<std::size_t> order;
  thread_local std::vector<double> bids;
  for (const EnvironmentAtom& a : env.atoms()) {
    if (a.prob == 0.0) continue;
    bids.assign(1, a.value / (1.0 + mu));
    bids.insert(bids.end(), a.competing_bids.begin(), a.competing_bids.end());
    AllocateInto(mech, bids, outcome, order);
    p.spend += a.prob * outcome.payments[0];
    p.value += a.prob * a.value * outcome.allocations[0];
  }
  return p;
}

double PerfectMultiplier(const EnvironmentStep& env, double rho, double mu_cap,
                         double tol) {
  if (!(rho > 0.0)) throw PreconditionError("target rate must be positive");
  const double need = env.value_cap() / rho;
  if (mu_cap < need * (1.0 - 1e-12)) {
    throw PreconditionError("mu_cap must be at least vbar / rho");
  }
  auto Z = [&](double mu) { return ExpectedCurves(env, mu).spend; };
  const double z0 = Z(0.0);
  if (z0 < rho || std::abs(z0 - rho) <= tol) return 0.0;
  double lo = 0.0;
  double hi = mu_cap;
  for (int i = 0; i < kBisectionMaxIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double z = Z(mid);
    if (std::abs(z - rho) <= tol) return mid;
    if (z > rho) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (!(lo < mid || mid < hi)) break;
  }
  throw RequiresSmoothingError(
      "expected spend jumps across the target rate near mu = " +
      std::to_string(lo) + "; add smoothing");
}

double PerfectMultiplier(const EnvironmentStep& env, double rho,
                         double mu_cap) {
  return PerfectMultiplier(env, rho, mu_cap, kBisectionTolerance);
}

namespace {

// Signed int_a^b Z, split at the kinks so each piece is smooth.
double IntegrateSpend(const EnvironmentStep& env, double a, double b) {
  if (a == b) return 0.0;
  if (a > b) return -IntegrateSpend(env, b, a);
  std::vector<double> cuts = {a};
  for (double k : env.Kinks(b)) {
    if (k > a && k < b) cuts.push_back(k);
  }
  cuts.push_back(b);
  auto Z = [&](double mu) { return ExpectedCurves(env, mu).spend; };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        Z, cuts[i], cuts[i + 1], 10, 1e-11);
  }
  return total;
}

}  // namespace

double ArtificialObjective(const EnvironmentStep& env, double rho, double mu) {
  if (!(mu >= 0.0)) throw PreconditionError("multiplier must be non-negative");
  return rho * mu - IntegrateSpend(env, 0.0, mu);
}

double ObjectiveGap(const EnvironmentStep& env, double rho, double mu,
                    double mu_ref) {
  return rho * (mu - mu_ref) - IntegrateSpend(env, mu_ref, mu);
}

std::vector<double> ArtificialObjectiveOnGrid(const EnvironmentStep& env,
                                              double rho,
                                              std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  double prev = 0.0;
  double integral = 0.0;
  for (double mu : grid) {
    if (mu < prev) throw PreconditionError("grid must be ascending from 0");
    integral += IntegrateSpend(env, prev, mu);
    out.push_back(rho * mu - integral);
    prev = mu;
  }
  return out;
}

double WCurve(double value, double spend, double rho) {
  if (spend < rho || spend <= 0.0) return value;
  return value * rho / spend;
}

double WCurve(const EnvironmentStep& env, double rho, double mu) {
  const CurvePoint p = ExpectedCurves(env, mu);
  return WCurve(p.value, p.spend, rho);
}

SmoothnessEstimate MeasureSmoothness(std::span<const EnvironmentStep> envs,
                                     double mu_cap, std::size_t grid_points) {
  if (grid_points < 2) throw PreconditionError("grid needs two points");
  SmoothnessEstimate s;
  s.floor = std::numeric_limits<double>::infinity();
  s.weak_floor = std::numeric_limits<double>::infinity();
  for (const EnvironmentStep& env : envs) {
    const CurvePoint at0 = ExpectedCurves(env, 0.0);
    s.floor = std::min(s.floor, at0.spend);
    if (at0.value > 0.0) {
      s.weak_floor =
          std::min(s.weak_floor, at0.spend * env.value_cap() / at0.value);
    }
    double prev = at0.spend;
    const double h = mu_cap / static_cast<double>(grid_points - 1);
    for (std::size_t i = 1; i < grid_points; ++i) {
      const double z = ExpectedCurves(env, h * static_cast<double>(i)).spend;
      s.lipschitz = std::max(s.lipschitz, std::abs(prev - z) / h);
      prev = z;
    }
  }
  if (envs.empty()) s.floor = 0.0;
  return s;
}

double EnvironmentSchedule::value_cap() const {
  double v = 1.0;
  for (const EnvironmentStep& s : steps) v = std::max(v, s.value_cap());
  return v;
}

std::size_t EnvironmentSchedule::switches() const {
  std::size_t n = 0;
  for (std::size_t t = 1; t < round_env.size(); ++t) {
    if (round_env[t] != round_env[t - 1]) ++n;
  }
  return n;
}

EnvironmentSchedule EnvironmentSchedule::Stationary(EnvironmentStep step,
                                                    std::size_t rounds) {
  EnvironmentSchedule s;
  s.steps.push_back(std::move(step));
  s.round_env.assign(rounds, 0);
  return s;
}

EnvironmentSchedule EnvironmentSchedule::Switching(
    std::vector<EnvironmentStep> steps, std::size_t rounds,
    std::size_t segment) {
  if (steps.empty()) throw ConfigError("switching schedule needs steps");
  if (segment == 0) throw ConfigError("segment length must be positive");
  EnvironmentSchedule s;
  s.steps = std::move(steps);
  s.round_env.resize(rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    s.round_env[t] = (t / segment) % s.steps.size();
  }
  return s;
}

PerfectPacingSequence ComputePerfectPacing(const EnvironmentSchedule& schedule,
                                           double rho, double mu_cap,
                                           Execution exec) {
  const auto per_step = ParallelMap(
      schedule.steps.size(),
      [&](std::size_t i) {
        const double mu = PerfectMultiplier(schedule.steps[i], rho, mu_cap);
        const double z = ExpectedCurves(schedule.steps[i], mu).spend;
        return std::pair<double, double>(mu, std::abs(z - rho));
      },
      exec);
  PerfectPacingSequence seq;
  seq.multipliers.resize(schedule.rounds());
  seq.residuals.resize(schedule.rounds());
  for (std::size_t t = 0; t < schedule.rounds(); ++t) {
    const auto& [mu, residual] = per_step[schedule.round_env[t]];
    seq.multipliers[t] = mu;
    // Rounds where mu* = 0 because Z(0) < rho carry no residual.
    seq.residuals[t] = mu == 0.0 && ExpectedCurves(schedule.at(t), 0.0).spend < rho
                           ? 0.0
                           : residual;
    if (t > 0) seq.path_length += std::abs(mu - seq.multipliers[t - 1]);
  }
  return seq;
}

Trace SimulateAgainstEnvironment(const EnvironmentSchedule& schedule,
                                 const AgentConfig& config, std::uint64_t seed,
                                 std::uint64_t replication) {
  config.Validate();
  const std::size_t rounds = schedule.rounds();
  if (static_cast<std::size_t>(config.horizon) != rounds) {
    throw ConfigError("agent horizon differs from the environment length");
  }
  if (schedule.steps.empty()) throw ConfigError("schedule has no steps");
  const std::size_t J = schedule.steps.front().num_competitors();
  for (const EnvironmentStep& s : schedule.steps) {
    if (s.num_competitors() != J) {
      throw ConfigError("environment steps list different competitor counts");
    }
  }
  const std::size_t n = J + 1;
  Trace trace(rounds, n);
  trace.budgets.assign(n, std::numeric_limits<double>::infinity());
  trace.budgets[0] = config.budget;
  GradientPacer agent(config);
  std::vector<double> bids(n);
  AuctionOutcome outcome;
  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < rounds; ++t) {
    const EnvironmentStep& env = schedule.at(t);
    RandomStream stream = RandomStream::For(seed, replication, t + 1);
    const EnvironmentAtom& atom = env.atoms()[env.SampleAtom(stream.Uniform())];
    const std::size_t i0 = trace.at(t, 0);
    trace.values[i0] = atom.value;
    trace.remaining[i0] = agent.remaining_budget();
    if (agent.stopped()) {
      trace.status[i0] = MultiplierStatus::kStopped;
    } else {
      trace.status[i0] = MultiplierStatus::kActive;
      trace.multipliers[i0] = agent.state().multiplier;
    }
    bids[0] = agent.Bid(atom.value);
    for (std::size_t j = 0; j < J; ++j) {
      bids[j + 1] = atom.competing_bids[j] + env.smoothing() * stream.Uniform();
      const std::size_t i = trace.at(t, j + 1);
      trace.values[i] = bids[j + 1];
      trace.remaining[i] = std::numeric_limits<double>::infinity();
    }
    AllocateInto(env.mechanism(), bids, outcome, order);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = trace.at(t, k);
      trace.bids[i] = bids[k];
      trace.allocations[i] = outcome.allocations[k];
      trace.payments[i] = outcome.payments[k];
    }
    agent.Observe(outcome.payments[0]);
  }
  return trace;
}

void FillRegretBounds(RegretReport& r, double rho, double mu_cap,
                      double vbar) {
  const double T = static_cast<double>(r.rounds);
  const double root_t = std::sqrt(T);
  const double reg1 = ((r.path_length + 1.0) * mu_cap * mu_cap +
                       (rho + vbar) * (rho + vbar)) *
                      root_t;
  r.reg1_bound = kRegretBoundConstant * reg1;
  r.delta = std::min(rho, r.smoothness.floor);
  r.weak_delta = std::min(rho, r.smoothness.weak_floor);
  auto bound = [&](double delta) {
    if (!(delta > 0.0)) return std::numeric_limits<double>::infinity();
    return kRegretBoundConstant *
           ((vbar / delta) * std::sqrt(2.0 * r.smoothness.lipschitz * T * reg1) +
            vbar * mu_cap * root_t / rho);
  };
  r.regret_bound = bound(r.delta);
  r.weak_regret_bound = bound(r.weak_delta);
}

RegretReport DynamicRegret(const Trace& trace,
                           const EnvironmentSchedule& schedule, double rho,
                           double mu_cap, Execution exec) {
  if (trace.num_rounds != schedule.rounds()) {
    throw ConfigError("trace has " + std::to_string(trace.num_rounds) +
                      " rounds, environment has " +
                      std::to_string(schedule.rounds()));
  }
  const PerfectPacingSequence perfect =
      ComputePerfectPacing(schedule, rho, mu_cap, exec);
  std::vector<double> benchmark(schedule.steps.size());
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    const double mu = PerfectMultiplier(schedule.steps[i], rho, mu_cap);
    benchmark[i] = ExpectedCurves(schedule.steps[i], mu).value;
  }
  struct RoundTerms {
    double value = 0.0;
    double gap = 0.0;
    bool stopped = false;
  };
  const auto terms = ParallelMap(
      trace.num_rounds,
      [&](std::size_t t) {
        RoundTerms r;
        const std::size_t i = trace.at(t, 0);
        if (trace.status[i] != MultiplierStatus::kActive) {
          r.stopped = true;
          return r;
        }
        const EnvironmentStep& env = schedule.at(t);
        const double mu = trace.multipliers[i];
        r.value = ExpectedCurves(env, mu).value;
        r.gap = ObjectiveGap(env, rho, mu, perfect.multipliers[t]);
        return r;
      },
      exec);
  RegretReport report;
  report.rounds = trace.num_rounds;
  std::vector<double> star(trace.num_rounds), got(trace.num_rounds),
      gaps(trace.num_rounds);
  for (std::size_t t = 0; t < trace.num_rounds; ++t) {
    star[t] = benchmark[schedule.round_env[t]];
    got[t] = terms[t].value;
    gaps[t] = terms[t].gap;
    if (terms[t].stopped) ++report.stopped_rounds;
  }
  report.benchmark_value = PairwiseSum(star);
  report.value_regret = report.benchmark_value - PairwiseSum(got);
  report.sgd_regret = PairwiseSum(gaps);
  report.path_length = perfect.path_length;
  report.smoothness = MeasureSmoothness(schedule.steps, mu_cap, 2001);
  FillRegretBounds(report, rho, mu_cap, schedule.value_cap());
  return report;
}

StochasticValueEstimate StochasticValue(const EnvironmentStep& env, double mu,
                                        double budget, std::int64_t T,
                                        std::size_t replications,
                                        std::uint64_t seed, Execution exec) {
  if (!(mu >= 0.0)) throw PreconditionError("multiplier must be non-negative");
  if (!(budget >= 0.0)) throw PreconditionError("budget must be non-negative");
  if (replications == 0) throw StatisticsError("need at least one replication");
  const std::size_t rounds = T > 0 ? static_cast<std::size_t>(T) : 0;
  const std::size_t J = env.num_competitors();
  const auto totals = ParallelMap(
      replications,
      [&](std::size_t r) {
        double remaining = budget;
        double value = 0.0;
        std::vector<double> bids(J + 1);
        AuctionOutcome outcome;
        std::vector<std::size_t> order;
        for (std::size_t t = 0; t < rounds; ++t) {
          if (!(remaining > 0.0) || remaining < kStopBudgetFraction * budget) break;
          RandomStream stream = RandomStream::For(seed, r, t + 1);
          const EnvironmentAtom& atom =
              env.atoms()[env.SampleAtom(stream.Uniform())];
          bids[0] = std::min(atom.value / (1.0 + mu), remaining);
          for (std::size_t j = 0; j < J; ++j) {
            bids[j + 1] =
                atom.competing_bids[j] + env.smoothing() * stream.Uniform();
          }
          AllocateInto(env.mechanism(), bids, outcome, order);
          value += atom.value * outcome.allocations[0];
          remaining -= outcome.payments[0];
        }
        return value;
      },
      exec);
  const SampleStats st = Summarize(totals);
  return {st.mean, st.stderr_mean, st.count};
}

double FitGrowthExponent(std::span<const double> x, std::span<const double> y,
                         double floor) {
  if (x.size() != y.size() || x.size() < 2) {
    throw PreconditionError("exponent fit needs two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw PreconditionError("fit abscissae must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(y[i], floor));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw PreconditionError("fit abscissae must differ");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace pacesim
