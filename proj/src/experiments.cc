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

#include "pacesim/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pacesim/constants.h"
#include "pacesim/errors.h"

namespace pacesim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ReplicationStats {
  std::vector<double> value, spend, liquid;
  double total = 0.0;
  double total_spend = 0.0;
  InvariantTally tally;
};

void TallyInvariants(const Trace& trace, const SimulationConfig& cfg,
                     InvariantTally& tally) {
  tally.epoch_min_slack = kInf;
  if (cfg.horizon <= 0) return;
  for (std::size_t k = 0; k < cfg.agents.size(); ++k) {
    if (!cfg.agents[k].is_pacing()) continue;
    const AgentConfig& agent = cfg.agents[k].pacing;
    const EpochLemmaReport e = VerifyEpochLemma(trace, k);
    tally.epochs_checked += e.checked;
    tally.epoch_failures += e.failures;
    tally.epoch_min_slack = std::min(tally.epoch_min_slack, e.min_slack);
    const StoppingBoundCheck s = CheckStoppingBound(trace, k, agent);
    if (s.applies) {
      ++tally.stopping_checked;
      if (!s.pass) ++tally.stopping_failures;
    }
    if (!CheckPacingConformance(trace, k, agent).ok()) {
      ++tally.conformance_failures;
    }
  }
}

void Merge(InvariantTally& into, const InvariantTally& from) {
  into.epochs_checked += from.epochs_checked;
  into.epoch_failures += from.epoch_failures;
  into.epoch_min_slack = std::min(into.epoch_min_slack, from.epoch_min_slack);
  into.stopping_checked += from.stopping_checked;
  into.stopping_failures += from.stopping_failures;
  into.conformance_failures += from.conformance_failures;
}

// Summary plus the raw per-replication samples the welfare check needs.
struct RunData {
  RunSummary summary;
  std::vector<double> welfare;
  std::vector<double> spend;
};

RunData RunScenarioData(const Scenario& scenario, std::size_t replications,
                        const TraceSink& on_trace, Execution exec) {
  const SimulationConfig cfg = scenario.simulation();
  const std::vector<double> budgets = cfg.budgets();
  const std::size_t n = cfg.agents.size();
  const auto reps = RunReplications(
      cfg, replications,
      [&](const Trace& trace, std::size_t r) {
        if (on_trace) on_trace(r, trace);
        const LiquidWelfareReport lw = LiquidWelfare(trace, budgets);
        ReplicationStats s;
        s.value = lw.value;
        s.spend = lw.spend;
        s.liquid = lw.liquid_value;
        s.total = lw.total;
        s.total_spend = lw.total_spend;
        TallyInvariants(trace, cfg, s.tally);
        return s;
      },
      exec);

  RunData out;
  RunSummary& sum = out.summary;
  sum.scenario = scenario.name;
  sum.replications = replications;
  sum.horizon = cfg.horizon;
  sum.invariants.epoch_min_slack = kInf;
  sum.agents.resize(n);
  std::vector<double> column(replications);
  for (std::size_t k = 0; k < n; ++k) {
    AgentSummary& a = sum.agents[k];
    a.budget = budgets[k];
    auto mean = [&](auto field) {
      for (std::size_t r = 0; r < replications; ++r) column[r] = field(reps[r]);
      return replications ? PairwiseSum(column) / static_cast<double>(replications) : 0.0;
    };
    a.mean_value = mean([&](const ReplicationStats& s) { return s.value[k]; });
    a.mean_spend = mean([&](const ReplicationStats& s) { return s.spend[k]; });
    a.mean_liquid_value = mean([&](const ReplicationStats& s) { return s.liquid[k]; });
  }
  for (const ReplicationStats& s : reps) {
    out.welfare.push_back(s.total);
    out.spend.push_back(s.total_spend);
    Merge(sum.invariants, s.tally);
  }
  if (!out.welfare.empty()) {
    const SampleStats st = Summarize(out.welfare);
    sum.welfare_mean = st.mean;
    sum.welfare_standard_error = st.stderr_mean;
  }
  if (scenario.reference_rule) {
    const double ref = ExAnteLiquidWelfare(*scenario.reference_rule,
                                           cfg.value_model, budgets, cfg.horizon);
    sum.reference_welfare = ref;
    sum.reference_ratio = ref > 0.0 ? sum.welfare_mean / ref : 0.0;
  }
  return out;
}

}  // namespace

RunSummary RunScenario(const Scenario& scenario, std::size_t replications,
                       const TraceSink& on_trace, Execution exec) {
  return RunScenarioData(scenario, replications, on_trace, exec).summary;
}

WelfareReport RunWelfare(const Scenario& scenario, std::size_t replications,
                         Execution exec) {
  const SimulationConfig cfg = scenario.simulation();
  const std::vector<double> budgets = cfg.budgets();
  WelfareReport rep;
  // Solve first: a capacity failure should not cost a full simulation.
  rep.optimum = SolveExAnteOptimum(cfg.value_model, cfg.mechanism.feasible(),
                                   budgets, cfg.horizon);
  RunData data = RunScenarioData(scenario, replications, {}, exec);
  rep.run = std::move(data.summary);
  rep.bound = VerifyWelfareBound(data.welfare, rep.optimum.optimum,
                                 cfg.agents.size(), cfg.value_model.value_cap(),
                                 cfg.horizon);
  rep.spend = VerifySpendBelowWelfare(data.welfare, data.spend);
  return rep;
}

RegretExperiment RunRegret(const Scenario& scenario, Execution exec) {
  // Without a regret section: one stationary run at the scenario horizon.
  RegretSettings fallback;
  fallback.horizons = {scenario.horizon};
  fallback.replications = scenario.replications;
  const RegretSettings& rs = scenario.regret ? *scenario.regret : fallback;
  RegretExperiment out;
  out.scenario = scenario.name;
  const std::int64_t largest =
      *std::max_element(rs.horizons.begin(), rs.horizons.end());
  std::vector<double> xs, ys;
  for (std::int64_t T : rs.horizons) {
    const EnvironmentSchedule sched = ScenarioEnvironment(scenario, T);
    const AgentConfig cfg = scenario.AtHorizon(T).agents.front().pacing;
    const double rho = cfg.target_rate();
    struct Rep {
      RegretReport report;
      std::vector<double> path;
    };
    const auto reps = ParallelMap(
        rs.replications,
        [&](std::size_t r) {
          const Trace trace = SimulateAgainstEnvironment(sched, cfg, scenario.seed, r);
          Rep rep{DynamicRegret(trace, sched, rho, cfg.mu_cap, Execution::kSerial), {}};
          if (r == 0 && T == largest) {
            rep.path.resize(trace.num_rounds);
            for (std::size_t t = 0; t < trace.num_rounds; ++t) {
              rep.path[t] = trace.multipliers[trace.at(t, 0)];
            }
          }
          return rep;
        },
        exec);
    RegretPoint p;
    p.horizon = T;
    p.replications = rs.replications;
    std::vector<double> v(reps.size()), s(reps.size()), stopped(reps.size());
    for (std::size_t r = 0; r < reps.size(); ++r) {
      v[r] = reps[r].report.value_regret;
      s[r] = reps[r].report.sgd_regret;
      stopped[r] = static_cast<double>(reps[r].report.stopped_rounds);
    }
    const SampleStats vs = Summarize(v), ss = Summarize(s);
    p.value_regret = vs.mean;
    p.value_regret_se = vs.stderr_mean;
    p.sgd_regret = ss.mean;
    p.sgd_regret_se = ss.stderr_mean;
    p.mean_stopped_rounds = PairwiseSum(stopped) / static_cast<double>(reps.size());
    p.bounds = reps.front().report;
    p.sgd_within_bound = p.sgd_regret <= p.bounds.reg1_bound;
    out.points.push_back(p);
    xs.push_back(static_cast<double>(T));
    ys.push_back(p.value_regret);
    if (T == largest) {
      out.switches = sched.switches();
      out.path_length = p.bounds.path_length;
      out.mu_cap = cfg.mu_cap;
      out.learner_path = reps.front().path;
      out.perfect_path =
          ComputePerfectPacing(sched, rho, cfg.mu_cap, exec).multipliers;
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() >= 2 && xs.size() == ys.size()) {
    std::vector<double> hx, hy;
    for (const RegretPoint& p : out.points) {
      hx.push_back(static_cast<double>(p.horizon));
      hy.push_back(p.value_regret);
    }
    out.exponent = FitGrowthExponent(hx, hy);
  }
  return out;
}

std::vector<CurveRow> CurveDump(const Scenario& scenario, std::size_t points) {
  if (points < 2) throw PreconditionError("curve dump needs two points");
  const EnvironmentSchedule sched = ScenarioEnvironment(scenario, 1);
  const AgentConfig cfg = scenario.simulation().agents.front().pacing;
  const double rho = cfg.target_rate();
  const EnvironmentStep& env = sched.steps.front();
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = cfg.mu_cap * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  const std::vector<double> h = ArtificialObjectiveOnGrid(env, rho, grid);
  std::vector<CurveRow> rows;
  for (std::size_t i = 0; i < points; ++i) {
    const CurvePoint c = ExpectedCurves(env, grid[i]);
    rows.push_back({grid[i], c.spend, c.value, h[i], WCurve(c.value, c.spend, rho)});
  }
  return rows;
}

CounterexampleReport RunCounterexample(double mu_cap, std::int64_t horizon,
                                       bool paced) {
  const SimulationConfig cfg = paced ? CounterexamplePacedScenario(mu_cap, horizon)
                                     : CounterexampleScenario(mu_cap, horizon);
  const std::vector<double> budgets = cfg.budgets();
  const Trace trace = RunSimulation(cfg, 0);
  CounterexampleReport r;
  r.mu_cap = mu_cap;
  r.horizon = horizon;
  r.paced = paced;
  r.realized_welfare = LiquidWelfare(trace, budgets).total;
  r.reference_welfare = ExAnteLiquidWelfare(CounterexampleReferenceRule(),
                                            cfg.value_model, budgets, horizon);
  r.optimum = SolveExAnteOptimum(cfg.value_model, cfg.mechanism.feasible(),
                                 budgets, horizon)
                  .optimum;
  r.ratio = r.realized_welfare / r.reference_welfare;
  r.ratio_to_optimum = r.realized_welfare / r.optimum;
  return r;
}

namespace {

std::size_t TrialsOr(const VerifyOptions& o, std::size_t fallback) {
  return o.trials > 0 ? o.trials : fallback;
}

std::vector<CheckResult> ConcentrationSuite(const VerifyOptions& o) {
  constexpr std::int64_t kHorizon = 100;
  std::vector<MartingaleSetup> setups;
  if (o.negative) {
    setups = {MartingaleSetup::AboveMean(kHorizon)};
  } else {
    setups = {MartingaleSetup::Degenerate(kHorizon),
              MartingaleSetup::Uniform(kHorizon),
              MartingaleSetup::Adversarial(kHorizon)};
  }
  std::vector<CheckResult> out;
  for (const MartingaleSetup& s : setups) {
    const ConcentrationResult r = ConcentrationCheck(s, TrialsOr(o, 100000), o.seed);
    out.push_back({"concentration/" + s.name, r.trials, r.frequency, r.bound, r.pass});
  }
  return out;
}

std::vector<CheckResult> SgdSuite(const VerifyOptions& o) {
  constexpr std::int64_t kHorizon = 100000;
  const std::size_t trials = TrialsOr(o, 100);
  std::vector<CheckResult> out;
  auto add = [&](const std::string& name, const SgdProblem& p, double eps) {
    const SgdResult r = SgdRegretCheck(p, eps, trials, o.seed);
    out.push_back({"sgd/" + name, r.trials, r.regret, r.bound, r.pass});
  };
  const SgdProblem drift = SgdProblem::Drifting(kHorizon);
  if (o.negative) {
    add("frozen", drift, 0.0);
  } else {
    const SgdProblem fixed = SgdProblem::Static(kHorizon);
    add("static", fixed, fixed.tuned_learning_rate());
    add("drifting", drift, drift.tuned_learning_rate());
  }
  return out;
}

std::vector<SimulationConfig> PacedScenarios(const VerifyOptions& o) {
  std::vector<SimulationConfig> out;
  for (const auto& path : o.scenarios) {
    const Scenario s = LoadScenario(path);
    if (s.horizon <= 0) continue;
    bool any = false;
    for (const AgentEntry& a : s.agents) any = any || a.pacing;
    if (any) out.push_back(s.simulation());
  }
  if (out.empty()) throw ConfigError("no scenarios with pacing agents to check");
  return out;
}

std::vector<CheckResult> EpochSuite(const VerifyOptions& o) {
  const std::size_t reps = TrialsOr(o, 20);
  std::size_t checked = 0, failures = 0;
  for (const SimulationConfig& cfg : PacedScenarios(o)) {
    const auto tallies = RunReplications(cfg, reps, [&](Trace trace, std::size_t) {
      std::pair<std::size_t, std::size_t> t{0, 0};
      for (std::size_t k = 0; k < cfg.agents.size(); ++k) {
        if (!cfg.agents[k].is_pacing()) continue;
        if (o.negative) {
          for (std::size_t r = 0; r < trace.num_rounds; ++r) {
            trace.allocations[trace.at(r, k)] = 0.0;
          }
        }
        const EpochLemmaReport e = VerifyEpochLemma(trace, k);
        t.first += e.checked;
        t.second += e.failures;
      }
      return t;
    });
    for (const auto& [c, f] : tallies) {
      checked += c;
      failures += f;
    }
  }
  return {{o.negative ? "epoch-lemma-negative" : "epoch-lemma", checked,
           static_cast<double>(failures), 0.0, failures == 0}};
}

std::vector<CheckResult> StoppingSuite(const VerifyOptions& o) {
  const std::size_t reps = TrialsOr(o, 20);
  std::size_t checked = 0, failures = 0;
  for (const SimulationConfig& cfg : PacedScenarios(o)) {
    const auto tallies = RunReplications(cfg, reps, [&](Trace trace, std::size_t) {
      std::pair<std::size_t, std::size_t> t{0, 0};
      for (std::size_t k = 0; k < cfg.agents.size(); ++k) {
        if (!cfg.agents[k].is_pacing()) continue;
        if (o.negative) {
          // Pretend the budget ran out after the first round.
          for (std::size_t r = 1; r < trace.num_rounds; ++r) {
            trace.status[trace.at(r, k)] = MultiplierStatus::kStopped;
          }
        }
        const StoppingBoundCheck s = CheckStoppingBound(trace, k, cfg.agents[k].pacing);
        if (!s.applies) continue;
        ++t.first;
        if (!s.pass) ++t.second;
      }
      return t;
    });
    for (const auto& [c, f] : tallies) {
      checked += c;
      failures += f;
    }
  }
  return {{o.negative ? "stopping-bound-negative" : "stopping-bound", checked,
           static_cast<double>(failures), 0.0, failures == 0}};
}

std::vector<CheckResult> RkSuite(const VerifyOptions& o) {
  constexpr std::int64_t kHorizon = 1000;
  const std::size_t reps = TrialsOr(o, 1000);
  const SimulationConfig cfg = CounterexamplePacedScenario(9.0, kHorizon);
  const ValueModel& model = cfg.value_model;
  const std::vector<double> budgets = cfg.budgets();
  const std::size_t n = cfg.agents.size();
  ExAnteRule rule;
  if (o.negative) {
    // Untrimmed full allocation, compared against the bound without slack.
    rule.allocation.assign(model.size(), std::vector<double>(n, 1.0));
  } else {
    rule = TrimRuleToRates(
        SolveExAnteOptimum(model, cfg.mechanism.feasible(), budgets, kHorizon).rule,
        model, budgets, kHorizon);
  }
  const double vbar = model.value_cap();
  const auto hits = RunReplications(cfg, reps, [&](const Trace& trace, std::size_t) {
    bool bad = false;
    for (std::size_t k = 0; k < n; ++k) {
      const double rho = budgets[k] / static_cast<double>(kHorizon);
      const double bound = o.negative ? rho * static_cast<double>(kHorizon)
                                      : RkBound(rho, vbar, n, kHorizon);
      bad = bad || RkDiagnostic(trace, rule, model, k) > bound;
    }
    return bad ? 1.0 : 0.0;
  });
  const double fraction = PairwiseSum(hits) / static_cast<double>(reps);
  const double allowed =
      1.0 / std::pow(vbar * static_cast<double>(n) * static_cast<double>(kHorizon), 2);
  return {{o.negative ? "rk-negative" : "rk", reps, fraction, allowed,
           fraction < allowed}};
}

}  // namespace

const std::vector<std::string>& VerifySuiteNames() {
  static const std::vector<std::string> names = {
      "concentration", "sgd",            "lipint", "gsp-core", "mbb-core",
      "epoch-lemma",   "stopping-bound", "rk",     "all"};
  return names;
}

std::vector<CheckResult> RunVerifySuite(const std::string& suite,
                                        const VerifyOptions& o) {
  if (suite == "concentration") return ConcentrationSuite(o);
  if (suite == "sgd") return SgdSuite(o);
  if (suite == "lipint") return {LipintFuzz(TrialsOr(o, 10000), o.seed, o.negative)};
  if (suite == "gsp-core") return {GspCoreFuzz(TrialsOr(o, 10000), o.seed, o.negative)};
  if (suite == "mbb-core") return {MbbCoreFuzz(TrialsOr(o, 10000), o.seed, o.negative)};
  if (suite == "epoch-lemma") return EpochSuite(o);
  if (suite == "stopping-bound") return StoppingSuite(o);
  if (suite == "rk") return RkSuite(o);
  if (suite == "all") {
    std::vector<CheckResult> out;
    for (const std::string& name : VerifySuiteNames()) {
      if (name == "all") continue;
      for (CheckResult& r : RunVerifySuite(name, o)) out.push_back(std::move(r));
    }
    return out;
  }
  throw ConfigError("unknown suite '" + suite + "'");
}

}  // namespace pacesim
