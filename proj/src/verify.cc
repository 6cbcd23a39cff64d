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

#include "pacesim/verify.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "pacesim/constants.h"
#include "pacesim/errors.h"

namespace pacesim {

namespace {

double Variance(double p) { return std::max(0.0, p * (1.0 - p)); }

bool Exceeds(double lhs, double rhs) {
  return lhs < rhs - kTolerance * std::max(1.0, std::abs(rhs));
}

}  // namespace

MartingaleSetup MartingaleSetup::Degenerate(std::int64_t horizon) {
  MartingaleSetup s;
  s.name = "degenerate";
  s.rho = 0.5;
  s.vbar = 1.0;
  s.horizon = horizon;
  s.draw = [](RandomStream& rng) { return rng.Uniform(); };
  s.selector = [](const MartingaleHistory&) { return 0.0; };
  s.theta = s.rho * std::sqrt(static_cast<double>(horizon));
  return s;
}

MartingaleSetup MartingaleSetup::Uniform(std::int64_t horizon) {
  MartingaleSetup s;
  s.name = "uniform";
  s.rho = 0.5;
  s.vbar = 2 * s.rho;
  s.horizon = horizon;
  s.draw = [vbar = s.vbar](RandomStream& rng) { return rng.Uniform(0.0, vbar); };
  s.selector = [](const MartingaleHistory&) { return 1.0; };
  s.theta = s.rho * std::sqrt(static_cast<double>(horizon));
  return s;
}

MartingaleSetup MartingaleSetup::Adversarial(std::int64_t horizon) {
  MartingaleSetup s = Uniform(horizon);
  s.name = "adversarial";
  s.selector = [rho = s.rho](const MartingaleHistory& h) {
    return h.y_sum < rho * static_cast<double>(h.round - 1) ? 1.0 : 0.0;
  };
  return s;
}

MartingaleSetup MartingaleSetup::AboveMean(std::int64_t horizon) {
  MartingaleSetup s = Uniform(horizon);
  s.name = "above-mean";
  s.vbar = 3 * s.rho;
  s.draw = [rho = s.rho](RandomStream& rng) { return rng.Uniform(rho, 3 * rho); };
  return s;
}

ConcentrationResult ConcentrationCheck(const MartingaleSetup& setup,
                                       std::size_t trials, std::uint64_t seed,
                                       Execution exec) {
  if (trials == 0) throw StatisticsError("concentration check needs trials");
  if (setup.horizon <= 0) throw PreconditionError("horizon must be positive");
  const double target =
      setup.rho * static_cast<double>(setup.horizon) + setup.theta;
  const auto hits = ParallelMap(
      trials,
      [&](std::size_t trial) {
        RandomStream rng = RandomStream::For(seed, trial, 0);
        MartingaleHistory h;
        for (; h.round <= setup.horizon; ++h.round) {
          const double x = setup.selector(h);
          const double y = setup.draw(rng);
          if (!(x >= 0.0 && x <= 1.0)) {
            throw PreconditionError("selector left [0, 1]");
          }
          if (!(y >= 0.0 && y <= setup.vbar)) {
            throw PreconditionError("draw left [0, vbar]");
          }
          h.statistic += x * y + (1.0 - x) * setup.rho;
          h.y_sum += y;
        }
        return h.statistic >= target ? 1.0 : 0.0;
      },
      exec);
  ConcentrationResult r;
  r.trials = trials;
  r.frequency = PairwiseSum(hits) / static_cast<double>(trials);
  r.bound = std::exp(-2.0 * setup.theta * setup.theta /
                     (static_cast<double>(setup.horizon) * setup.vbar *
                      setup.vbar));
  r.standard_error =
      std::sqrt(Variance(r.bound) / static_cast<double>(trials));
  r.pass = r.frequency <= r.bound + kMonteCarloSigmas * r.standard_error;
  return r;
}

double SgdProblem::comparator(std::int64_t t) const {
  if (horizon <= 0) return center;
  return center + amplitude * std::sin(2.0 * std::numbers::pi * cycles *
                                       static_cast<double>(t) /
                                       static_cast<double>(horizon));
}

double SgdProblem::path_bound() const {
  double p = 1.0;
  for (std::int64_t t = 1; t < horizon; ++t) {
    p += std::abs(comparator(t + 1) - comparator(t));
  }
  return p;
}

double SgdProblem::tuned_learning_rate() const {
  const double g = gradient_bound();
  return diameter() *
         std::sqrt(path_bound() / (g * g * static_cast<double>(horizon)));
}

SgdProblem SgdProblem::Static(std::int64_t horizon) {
  SgdProblem p;
  p.horizon = horizon;
  p.noise = 0.5;
  p.center = 0.3;
  return p;
}

SgdProblem SgdProblem::Drifting(std::int64_t horizon) {
  SgdProblem p;
  p.horizon = horizon;
  p.noise = 0.5;
  p.amplitude = 0.4;
  p.cycles = 2.0;
  return p;
}

SgdResult SgdRegretCheck(const SgdProblem& problem, double learning_rate,
                         std::size_t trials, std::uint64_t seed,
                         Execution exec) {
  if (trials == 0) throw StatisticsError("SGD check needs trials");
  if (!(learning_rate >= 0.0)) {
    throw PreconditionError("learning rate must be non-negative");
  }
  if (!(problem.hi > problem.lo) || problem.horizon <= 0) {
    throw PreconditionError("SGD problem needs a proper interval and horizon");
  }
  const auto regrets = ParallelMap(
      trials,
      [&](std::size_t trial) {
        RandomStream rng = RandomStream::For(seed, trial, 0);
        double x = std::clamp(problem.start, problem.lo, problem.hi);
        double regret = 0.0;
        for (std::int64_t t = 1; t <= problem.horizon; ++t) {
          const double u = problem.comparator(t);
          regret += 0.5 * (x - u) * (x - u);
          const double g = (x - u) + problem.noise * rng.Uniform(-1.0, 1.0);
          x = std::clamp(x - learning_rate * g, problem.lo, problem.hi);
        }
        return regret;
      },
      exec);
  const SampleStats st = Summarize(regrets);
  SgdResult r;
  r.trials = trials;
  r.learning_rate = learning_rate;
  r.regret = st.mean;
  r.standard_error = st.stderr_mean;
  const double eps =
      learning_rate > 0.0 ? learning_rate : problem.tuned_learning_rate();
  const double d = problem.diameter();
  const double g = problem.gradient_bound();
  r.bound = kSgdBoundConstant *
            (d * d * problem.path_bound() / eps +
             eps * g * g * static_cast<double>(problem.horizon));
  r.pass = r.regret <= r.bound + kMonteCarloSigmas * r.standard_error;
  return r;
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= knots.front()) return values.front();
  if (x >= knots.back()) return values.back();
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
  const double w = (x - knots[i]) / (knots[i + 1] - knots[i]);
  return values[i] + w * (values[i + 1] - values[i]);
}

double PiecewiseLinear::Integral(double x) const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size() && knots[i] < x; ++i) {
    const double right = std::min(x, knots[i + 1]);
    total += 0.5 * (values[i] + (*this)(right)) * (right - knots[i]);
  }
  return total;
}

void ValidateLipschitzIncreasing(const PiecewiseLinear& f, double lambda) {
  if (f.knots.empty() || f.knots.size() != f.values.size()) {
    throw PreconditionError("knots and values must be non-empty and aligned");
  }
  if (f.knots.front() != 0.0 || f.values.front() != 0.0) {
    throw PreconditionError("function must start at f(0) = 0");
  }
  if (!(lambda >= 0.0)) throw PreconditionError("lambda must be non-negative");
  for (std::size_t i = 0; i + 1 < f.knots.size(); ++i) {
    const double dx = f.knots[i + 1] - f.knots[i];
    const double dy = f.values[i + 1] - f.values[i];
    if (!(dx > 0.0)) throw PreconditionError("knots must be increasing");
    if (dy < 0.0) throw PreconditionError("function must be non-decreasing");
    if (dy > lambda * dx * (1.0 + kTolerance)) {
      throw PreconditionError("slope exceeds lambda on piece " +
                              std::to_string(i));
    }
  }
}

namespace {

bool LipintInequality(const PiecewiseLinear& f, double lambda, double x) {
  const double lhs = std::abs(f(x));
  const double rhs = std::sqrt(2.0 * lambda * std::max(0.0, f.Integral(x)));
  return lhs <= rhs + kTolerance * std::max(1.0, lhs);
}

}  // namespace

bool LipintHolds(const PiecewiseLinear& f, double lambda, double x) {
  ValidateLipschitzIncreasing(f, lambda);
  if (x < 0.0 || x > f.knots.back()) {
    throw PreconditionError("x outside the function's domain");
  }
  return LipintInequality(f, lambda, x);
}

CheckResult LipintFuzz(std::size_t trials, std::uint64_t seed, bool negative,
                       Execution exec) {
  const auto violations = ParallelMap(
      trials,
      [&](std::size_t trial) {
        RandomStream rng = RandomStream::For(seed, trial, 0);
        const double lambda = rng.Uniform(0.1, 5.0);
        PiecewiseLinear f{{0.0}, {0.0}};
        const std::size_t pieces = 1 + rng() % 6;
        for (std::size_t i = 0; i < pieces; ++i) {
          const double dx = rng.Uniform(0.01, 1.0);
          const auto kind = rng() % 4;
          const double slope = kind == 0   ? 0.0
                               : kind == 1 ? lambda
                                           : rng.Uniform(0.0, lambda);
          f.knots.push_back(f.knots.back() + dx);
          f.values.push_back(f.values.back() + slope * dx);
        }
        const double x = rng.Uniform(0.0, f.knots.back());
        const bool ok = negative ? LipintInequality(f, 0.25 * lambda, x)
                                 : LipintHolds(f, lambda, x);
        return ok ? 0.0 : 1.0;
      },
      exec);
  CheckResult r;
  r.checker = negative ? "lipint-negative" : "lipint";
  r.trials = trials;
  r.statistic = PairwiseSum(violations);
  r.bound = 0.0;
  r.pass = r.statistic == 0.0;
  return r;
}

double GspCoreSlack(std::span<const double> click_rates,
                    std::span<const double> bids, bool zero_prices) {
  const std::size_t n = bids.size();
  if (n > kMaxGspCoreAgents || click_rates.size() > kMaxGspCoreAgents) {
    throw CapacityError("exhaustive GSP core check supports at most " +
                        std::to_string(kMaxGspCoreAgents) +
                        " bidders and slots");
  }
  std::vector<double> b(bids.begin(), bids.end());
  std::sort(b.begin(), b.end(), std::greater<>());
  b.push_back(0.0);
  auto alpha = [&](std::size_t i) {  // one-based
    return i <= click_rates.size() ? click_rates[i - 1] : 0.0;
  };
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double lhs = 0.0, rhs = 0.0;
    std::size_t sigma = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if (mask & (1u << (i - 1))) {
        ++sigma;
        lhs += b[i - 1] * alpha(i);
        rhs += b[i - 1] * alpha(sigma);
      } else if (!zero_prices) {
        lhs += b[i] * alpha(i);
      }
    }
    worst = std::min(worst, lhs - rhs);
  }
  return worst;
}

CheckResult GspCoreFuzz(std::size_t trials, std::uint64_t seed, bool negative,
                        Execution exec) {
  const auto violations = ParallelMap(
      trials,
      [&](std::size_t trial) {
        RandomStream rng = RandomStream::For(seed, trial, 0);
        const std::size_t n = 1 + rng() % 5;
        const std::size_t m = 1 + rng() % 5;
        std::vector<double> a(m), b(n);
        for (double& x : a) x = rng.Uniform();
        std::sort(a.begin(), a.end(), std::greater<>());
        for (double& x : b) {
          x = rng() % 3 == 0 ? static_cast<double>(rng() % 3) : rng.Uniform(0.0, 2.0);
        }
        return GspCoreSlack(a, b, negative) < -kTolerance ? 1.0 : 0.0;
      },
      exec);
  CheckResult r;
  r.checker = negative ? "gsp-core-negative" : "gsp-core";
  r.trials = trials;
  r.statistic = PairwiseSum(violations);
  r.pass = r.statistic == 0.0;
  return r;
}

CheckResult MbbCoreFuzz(std::size_t trials_per_format, std::uint64_t seed,
                        bool negative, Execution exec) {
  constexpr AuctionFormat kFormats[] = {AuctionFormat::kFirstPrice,
                                        AuctionFormat::kSecondPrice,
                                        AuctionFormat::kGsp};
  const auto violations = ParallelMap(
      3 * trials_per_format,
      [&](std::size_t i) {
        const AuctionFormat format = kFormats[i % 3];
        RandomStream rng = RandomStream::For(seed, i, 0);
        const std::size_t n = 1 + rng() % 6;
        FeasibleSet fs = FeasibleSet::SingleSlot();
        if (format == AuctionFormat::kGsp ||
            (format == AuctionFormat::kFirstPrice && rng() % 2 == 0)) {
          std::vector<double> a(1 + rng() % 4);
          for (double& x : a) x = rng.Uniform();
          std::sort(a.begin(), a.end(), std::greater<>());
          if (rng() % 2 == 0) a[0] = 1.0;
          fs = FeasibleSet::Polymatroid(a);
        }
        const Mechanism mech(format, fs, n);
        std::vector<double> bids(n);
        for (double& x : bids) {
          x = rng() % 3 == 0 ? 0.5 * static_cast<double>(rng() % 4)
                             : rng.Uniform(0.0, 2.0);
        }
        double bad = 0.0;
        const std::size_t k = rng() % n;
        double lo = rng.Uniform(0.0, 2.0), hi = rng.Uniform(0.0, 2.0);
        if (lo > hi) std::swap(lo, hi);
        if (!negative && !CheckMbb(mech, k, lo, hi, bids)) bad += 1.0;

        const AuctionOutcome out = Allocate(mech, bids);
        std::vector<std::size_t> coalition;
        const std::uint32_t mask =
            static_cast<std::uint32_t>(rng() % (1u << n));
        for (std::size_t j = 0; j < n; ++j) {
          if (mask & (1u << j)) coalition.push_back(j);
        }
        const std::vector<double> dev =
            BestCoalitionDeviation(mech, bids, coalition);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const bool in = (mask & (1u << j)) != 0;
          if (in) {
            lhs += bids[j] * out.allocations[j];
            rhs += bids[j] * dev[j];
          } else if (!negative) {
            lhs += out.payments[j];
          }
        }
        if (Exceeds(lhs, rhs)) bad += 1.0;
        return bad;
      },
      exec);
  CheckResult r;
  r.checker = negative ? "mbb-core-negative" : "mbb-core";
  r.trials = 3 * trials_per_format;
  r.statistic = PairwiseSum(violations);
  r.pass = r.statistic == 0.0;
  return r;
}

ExAnteRule TrimRuleToRates(const ExAnteRule& rule, const ValueModel& model,
                           std::span<const double> budgets, std::int64_t T) {
  ExAnteRule out = rule;
  const std::size_t n = model.num_agents();
  for (std::size_t k = 0; k < n; ++k) {
    double e = 0.0;
    for (std::size_t s = 0; s < model.size(); ++s) {
      e += model.point(s).prob * rule.allocation[s][k] *
           model.point(s).values[k];
    }
    const double rho = budgets[k] / static_cast<double>(T);
    if (e > rho) {
      for (std::size_t s = 0; s < model.size(); ++s) {
        out.allocation[s][k] *= rho / e;
      }
    }
  }
  return out;
}

double RkDiagnostic(const Trace& trace, const ExAnteRule& rule,
                    const ValueModel& model, std::size_t agent) {
  const std::size_t n = trace.num_agents;
  if (agent >= n) throw PreconditionError("agent index out of range");
  if (trace.num_rounds == 0) return 0.0;
  const double rho =
      trace.budgets[agent] / static_cast<double>(trace.num_rounds);
  std::vector<double> terms(trace.num_rounds);
  for (std::size_t t = 0; t < trace.num_rounds; ++t) {
    const std::size_t i = trace.at(t, agent);
    const bool unpaced = trace.status[i] == MultiplierStatus::kActive &&
                         trace.multipliers[i] == 0.0;
    if (!unpaced) {
      terms[t] = rho;
      continue;
    }
    const std::span<const double> profile(&trace.values[trace.at(t, 0)], n);
    const auto s = model.Find(profile);
    if (!s) {
      throw LookupError("round " + std::to_string(t + 1) +
                        ": value profile is outside the rule's support");
    }
    terms[t] = rule.allocation[*s][agent] * trace.values[i];
  }
  return PairwiseSum(terms);
}

double RkBound(double rho, double vbar, std::size_t n, std::int64_t T) {
  const double t = static_cast<double>(T);
  return rho * t +
         vbar * std::sqrt(t * std::max(0.0, std::log(vbar * static_cast<double>(n) * t)));
}

}  // namespace pacesim
