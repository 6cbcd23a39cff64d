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

#include "pacesim/welfare.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "pacesim/constants.h"
#include "pacesim/errors.h"
#include "pacesim/lp.h"
#include "pacesim/parallel.h"
#include "pacesim/rng.h"

namespace pacesim {

LiquidWelfareReport LiquidWelfare(const Trace& trace,
                                  std::span<const double> budgets) {
  if (budgets.size() != trace.num_agents) {
    throw PreconditionError("budget list does not match the trace");
  }
  LiquidWelfareReport r;
  const std::size_t n = trace.num_agents;
  r.liquid_value.assign(n, 0.0);
  r.value.assign(n, 0.0);
  r.spend.assign(n, 0.0);
  for (std::size_t t = 0; t < trace.num_rounds; ++t) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = trace.at(t, k);
      r.value[k] += trace.allocations[i] * trace.values[i];
      r.spend[k] += trace.payments[i];
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    r.liquid_value[k] = std::min(budgets[k], r.value[k]);
    r.total += r.liquid_value[k];
    r.total_spend += r.spend[k];
  }
  return r;
}

namespace {

void CheckBudgets(const ValueModel& model, std::span<const double> budgets) {
  if (budgets.size() != model.num_agents()) {
    throw ConfigError("budget list has " + std::to_string(budgets.size()) +
                      " entries, value model has " +
                      std::to_string(model.num_agents()) + " agents");
  }
  for (double b : budgets) {
    if (!(b >= 0.0)) throw ConfigError("budgets must be non-negative");
  }
}

}  // namespace

double ExAnteLiquidWelfare(const ExAnteRule& rule, const ValueModel& model,
                           std::span<const double> budgets, std::int64_t T) {
  CheckBudgets(model, budgets);
  if (rule.allocation.size() != model.size()) {
    throw PreconditionError("rule does not cover the value model support");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < model.num_agents(); ++k) {
    double expected = 0.0;
    for (std::size_t s = 0; s < model.size(); ++s) {
      expected += model.point(s).prob * rule.allocation[s].at(k) *
                  model.point(s).values[k];
    }
    total += std::min(budgets[k], static_cast<double>(T) * expected);
  }
  return total;
}

ExAnteRule ConstantRule(const ValueModel& model, std::vector<double> profile) {
  ExAnteRule r;
  r.allocation.assign(model.size(), std::move(profile));
  return r;
}

ExAnteSolution SolveExAnteOptimum(const ValueModel& model,
                                  const FeasibleSet& feasible,
                                  std::span<const double> budgets,
                                  std::int64_t T) {
  CheckBudgets(model, budgets);
  const std::size_t n = model.num_agents();
  const std::size_t S = model.size();
  if (n * S > kMaxLpVariables) {
    throw CapacityError("ex-ante program needs " + std::to_string(n * S) +
                        " allocation variables, limit is " +
                        std::to_string(kMaxLpVariables));
  }
  if (!feasible.is_single_slot() && n > kMaxPolymatroidAgents) {
    throw CapacityError("polymatroid ex-ante program supports at most " +
                        std::to_string(kMaxPolymatroidAgents) + " agents, got " +
                        std::to_string(n));
  }
  ExAnteSolution out;
  out.rule.allocation.assign(S, std::vector<double>(n, 0.0));
  if (T <= 0) return out;
  const double horizon = static_cast<double>(T);

  auto y = [n](std::size_t k, std::size_t s) { return s * n + k; };
  const std::size_t w0 = n * S;
  LinearProgram lp(n * S + n);
  std::vector<std::size_t> vars;
  std::vector<double> coeffs;
  for (std::size_t k = 0; k < n; ++k) {
    lp.SetObjective(w0 + k, 1.0);
    if (std::isfinite(budgets[k])) {
      const std::size_t v[] = {w0 + k};
      const double c[] = {1.0};
      lp.AddRow(v, c, budgets[k]);
    }
    vars.assign(1, w0 + k);
    coeffs.assign(1, 1.0);
    for (std::size_t s = 0; s < S; ++s) {
      const double gain = horizon * model.point(s).prob * model.point(s).values[k];
      if (gain == 0.0) continue;
      vars.push_back(y(k, s));
      coeffs.push_back(-gain);
    }
    lp.AddRow(vars, coeffs, 0.0);
  }

  // Feasibility rows per scenario. For a polymatroid, subsets larger than
  // min(m, n) are implied by the full-set row because y >= 0.
  std::vector<std::pair<std::uint32_t, double>> subsets;
  if (!feasible.is_single_slot()) {
    const std::size_t m = feasible.click_rates().size();
    const std::size_t limit = std::min(m, n);
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t l = 1; l <= n; ++l) {
      prefix[l] = prefix[l - 1] + feasible.SlotRate(l);
    }
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
      if (size <= limit || size == n) subsets.emplace_back(mask, prefix[size]);
    }
  }
  for (std::size_t s = 0; s < S; ++s) {
    if (feasible.is_single_slot()) {
      vars.clear();
      coeffs.assign(n, 1.0);
      for (std::size_t k = 0; k < n; ++k) vars.push_back(y(k, s));
      lp.AddRow(vars, coeffs, 1.0);
      continue;
    }
    for (const auto& [mask, cap] : subsets) {
      vars.clear();
      coeffs.clear();
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (1u << k)) {
          vars.push_back(y(k, s));
          coeffs.push_back(1.0);
        }
      }
      lp.AddRow(vars, coeffs, cap);
    }
  }

  const LpSolution sol = SolveLp(lp);
  if (sol.status != LpSolution::Status::kOptimal) {
    throw InvariantViolation("ex-ante program reported unbounded");
  }
  out.pivots = sol.pivots;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t k = 0; k < n; ++k) {
      out.rule.allocation[s][k] = std::clamp(sol.x[y(k, s)], 0.0, 1.0);
    }
  }
  out.optimum = ExAnteLiquidWelfare(out.rule, model, budgets, T);
  return out;
}

namespace {

struct CollapseAccumulator {
  std::vector<std::vector<double>> averaged;  // [s][k]
  std::vector<double> expected_value;         // [k]
};

void CheckProfile(const std::vector<double>& y, std::size_t n) {
  if (y.size() != n) {
    throw PreconditionError("sequence rule returned a profile of length " +
                            std::to_string(y.size()) + ", expected " +
                            std::to_string(n));
  }
}

void Enumerate(const SequenceRule& rule, const ValueModel& model,
               std::size_t T, std::vector<std::size_t>& history,
               double prefix_prob, CollapseAccumulator& acc) {
  const std::size_t n = model.num_agents();
  const double inv_t = 1.0 / static_cast<double>(T);
  for (std::size_t s = 0; s < model.size(); ++s) {
    const double q = model.point(s).prob;
    if (q == 0.0) continue;
    history.push_back(s);
    const std::vector<double> y = rule(history);
    CheckProfile(y, n);
    for (std::size_t k = 0; k < n; ++k) {
      acc.averaged[s][k] += prefix_prob * y[k] * inv_t;
      acc.expected_value[k] += prefix_prob * q * y[k] * model.point(s).values[k];
    }
    if (history.size() < T) {
      Enumerate(rule, model, T, history, prefix_prob * q, acc);
    }
    history.pop_back();
  }
}

}  // namespace

CollapsedRule CollapseSequenceRule(const SequenceRule& rule,
                                   const ValueModel& model,
                                   std::span<const double> budgets,
                                   std::int64_t T, std::uint64_t seed,
                                   std::size_t samples) {
  CheckBudgets(model, budgets);
  const std::size_t n = model.num_agents();
  const std::size_t S = model.size();
  CollapsedRule out;
  out.rule.allocation.assign(S, std::vector<double>(n, 0.0));
  out.standard_error.assign(S, std::vector<double>(n, 0.0));
  if (T <= 0) {
    out.exact = true;
    return out;
  }
  const std::size_t rounds = static_cast<std::size_t>(T);

  double sequences = 1.0;
  for (std::size_t t = 0; t < rounds && sequences <= kMaxEnumeratedSequences;
       ++t) {
    sequences *= static_cast<double>(S);
  }
  std::vector<double> expected_value(n, 0.0);
  if (sequences <= static_cast<double>(kMaxEnumeratedSequences)) {
    CollapseAccumulator acc{out.rule.allocation, expected_value};
    std::vector<std::size_t> history;
    history.reserve(rounds);
    Enumerate(rule, model, rounds, history, 1.0, acc);
    out.rule.allocation = std::move(acc.averaged);
    expected_value = std::move(acc.expected_value);
    out.exact = true;
  } else {
    if (samples < 2) throw StatisticsError("Monte Carlo collapse needs >= 2 samples");
    const std::size_t width = S * n + n;
    const auto per_sample = ParallelMap(samples, [&](std::size_t i) {
      RandomStream stream = RandomStream::For(seed, i, 0);
      std::vector<double> stat(width, 0.0);
      std::vector<std::size_t> history;
      history.reserve(rounds);
      for (std::size_t t = 0; t < rounds; ++t) {
        const std::size_t s = model.Sample(stream.Uniform());
        history.push_back(s);
        const std::vector<double> y = rule(history);
        CheckProfile(y, n);
        const double scale =
            1.0 / (static_cast<double>(rounds) * model.point(s).prob);
        for (std::size_t k = 0; k < n; ++k) {
          stat[s * n + k] += y[k] * scale;
          stat[S * n + k] += y[k] * model.point(s).values[k];
        }
      }
      return stat;
    });
    std::vector<double> column(samples);
    for (std::size_t j = 0; j < width; ++j) {
      for (std::size_t i = 0; i < samples; ++i) column[i] = per_sample[i][j];
      const SampleStats st = Summarize(column);
      if (j < S * n) {
        out.rule.allocation[j / n][j % n] = st.mean;
        out.standard_error[j / n][j % n] = st.stderr_mean;
      } else {
        expected_value[j - S * n] = st.mean;
      }
    }
    out.samples = samples;
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.sequence_welfare += std::min(budgets[k], expected_value[k]);
  }
  out.collapsed_welfare = ExAnteLiquidWelfare(out.rule, model, budgets, T);
  return out;
}

double WelfareSlack(std::size_t n, double vbar, std::int64_t T) {
  const double nt = static_cast<double>(n) * static_cast<double>(T);
  const double log_term = std::max(0.0, std::log(vbar * nt));
  return kWelfareBoundConstant * static_cast<double>(n) * vbar *
         std::sqrt(static_cast<double>(T) * log_term);
}

WelfareBoundCheck VerifyWelfareBound(std::span<const double> welfare,
                                     double optimum, std::size_t n,
                                     double vbar, std::int64_t T,
                                     std::size_t min_replications) {
  if (welfare.size() < min_replications || welfare.size() < 2) {
    throw StatisticsError("welfare bound needs at least " +
                          std::to_string(std::max<std::size_t>(
                              min_replications, 2)) +
                          " replications, got " +
                          std::to_string(welfare.size()));
  }
  WelfareBoundCheck c;
  const SampleStats st = Summarize(welfare);
  c.replications = st.count;
  c.mean = st.mean;
  c.standard_error = st.stderr_mean;
  c.lower = st.mean - kZ99 * st.stderr_mean;
  c.optimum = optimum;
  c.bound = optimum / 2.0 - WelfareSlack(n, vbar, T);
  c.margin = c.lower - c.bound;
  c.ratio = optimum > 0.0 ? st.mean / optimum : 1.0;
  c.pass = c.margin >= 0.0;
  return c;
}

WelfareBoundCheck VerifyWelfareBound(std::span<const double> welfare,
                                     double optimum, std::size_t n,
                                     double vbar, std::int64_t T) {
  return VerifyWelfareBound(welfare, optimum, n, vbar, T,
                            kMinWelfareReplications);
}

SpendCheck VerifySpendBelowWelfare(std::span<const double> welfare,
                                   std::span<const double> spend) {
  if (welfare.size() != spend.size() || welfare.size() < 2) {
    throw StatisticsError("paired spend check needs matching samples");
  }
  std::vector<double> gap(welfare.size());
  for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = welfare[i] - spend[i];
  const SampleStats st = Summarize(gap);
  SpendCheck c;
  c.mean_gap = st.mean;
  c.standard_error = st.stderr_mean;
  c.pass = st.mean + kZ99 * st.stderr_mean >= 0.0;
  return c;
}

namespace {

SimulationConfig CounterexampleMarket(double mu_cap, std::int64_t T) {
  if (!(mu_cap >= 0.0)) throw ConfigError("mu_cap must be non-negative");
  if (T <= 0) throw ConfigError("horizon must be positive");
  return SimulationConfig{
      Mechanism(AuctionFormat::kSecondPrice, FeasibleSet::SingleSlot(), 2),
      {},
      ValueModel({{1.0, {2.0, 1.0}, ""}}),
      T,
      0};
}

}  // namespace

SimulationConfig CounterexampleScenario(double mu_cap, std::int64_t T) {
  SimulationConfig cfg = CounterexampleMarket(mu_cap, T);
  const double horizon = static_cast<double>(T);
  cfg.agents = {
      ParticipantSpec::Scripted({Script::Kind::kFixed, 2.0},
                                horizon / (1.0 + mu_cap)),
      ParticipantSpec::Scripted({Script::Kind::kFixed, 0.0}, horizon)};
  return cfg;
}

SimulationConfig CounterexamplePacedScenario(double mu_cap, std::int64_t T) {
  SimulationConfig cfg = CounterexampleMarket(mu_cap, T);
  const double horizon = static_cast<double>(T);
  cfg.agents = {
      ParticipantSpec::Pacing(
          DefaultAgentConfig(horizon / (1.0 + mu_cap), T, 2.0)),
      ParticipantSpec::Pacing(DefaultAgentConfig(horizon, T, 2.0))};
  return cfg;
}

ExAnteRule CounterexampleReferenceRule() {
  ExAnteRule r;
  r.allocation = {{0.0, 1.0}};
  return r;
}

}  // namespace pacesim
