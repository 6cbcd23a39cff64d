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

// Acceptance runner: one line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pacesim/errors.h"
#include "pacesim/experiments.h"
#include "welfare_oracle.h"

namespace pacesim {
namespace {

namespace fs = std::filesystem;

const fs::path kScenarios(PACESIM_SCENARIO_DIR);

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

Outcome Counterexample() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;
  for (double mu : {1.0, 9.0, 99.0}) {
    const CounterexampleReport r = RunCounterexample(mu, 1000, false);
    const double want = 1.0 / (mu + 1.0);
    pass = pass && std::abs(r.ratio - want) <= 1e-12 * want;
    detail += fmt::format("mu={} ratio={:.6g} ", mu, r.ratio);
  }
  const double elapsed = Seconds(start);
  pass = pass && elapsed < 1.0;
  return {pass, detail + fmt::format("in {:.3f}s", elapsed)};
}

// Criteria 2 to 4 share the same runs.
struct WelfareRuns {
  std::vector<WelfareReport> reports;
  std::vector<Scenario> scenarios;
  double seconds = 0.0;
};

const WelfareRuns& Welfare() {
  static const WelfareRuns runs = [] {
    WelfareRuns w;
    const auto start = Clock::now();
    for (const char* name : {"uncontested", "symmetric", "disjoint",
                             "paced-counterexample", "polymatroid-first-price",
                             "gsp"}) {
      w.scenarios.push_back(LoadScenario(kScenarios / (std::string(name) + ".json")));
      w.reports.push_back(RunWelfare(w.scenarios.back(), 200));
    }
    w.seconds = Seconds(start);
    return w;
  }();
  return runs;
}

Outcome WelfareBound() {
  const WelfareRuns& w = Welfare();
  bool pass = w.seconds < 300.0;
  std::set<std::size_t> sizes;
  std::set<AuctionFormat> formats;
  std::string detail;
  for (std::size_t i = 0; i < w.reports.size(); ++i) {
    const WelfareReport& r = w.reports[i];
    const Scenario& s = w.scenarios[i];
    pass = pass && r.bound.pass && r.run.horizon == 10000 && r.run.replications == 200;
    sizes.insert(s.agents.size());
    formats.insert(s.format);
    if (s.name == "uncontested" || s.name == "symmetric") {
      pass = pass && r.bound.ratio >= 0.5;
    }
    detail += fmt::format("{}={:.4f} ", s.name, r.bound.ratio);
  }
  pass = pass && sizes == std::set<std::size_t>{2, 3, 5} && formats.size() == 3;
  return {pass, detail + fmt::format("in {:.1f}s", w.seconds)};
}

Outcome EpochLemma() {
  std::size_t checked = 0, failures = 0;
  double slack = INFINITY;
  for (const WelfareReport& r : Welfare().reports) {
    checked += r.run.invariants.epochs_checked;
    failures += r.run.invariants.epoch_failures;
    slack = std::min(slack, r.run.invariants.epoch_min_slack);
  }
  return {checked > 0 && failures == 0,
          fmt::format("{} epochs, {} violations, min slack {:.3g}", checked,
                      failures, slack)};
}

Outcome StoppingBound() {
  std::size_t checked = 0, failures = 0;
  for (const WelfareReport& r : Welfare().reports) {
    checked += r.run.invariants.stopping_checked;
    failures += r.run.invariants.stopping_failures;
  }
  return {checked > 0 && failures == 0,
          fmt::format("{} traces, {} violations", checked, failures)};
}

Outcome RegretGrowth() {
  const auto start = Clock::now();
  const RegretExperiment e = RunRegret(LoadScenario(kScenarios / "regret-first-price.json"));
  bool pass = e.exponent && *e.exponent <= 0.8 && e.points.size() == 3;
  std::string detail;
  for (const RegretPoint& p : e.points) {
    pass = pass && p.replications == 50 && p.sgd_within_bound;
    detail += fmt::format("T={} regret={:.1f} reg1={:.1f}/{:.0f} ", p.horizon,
                          p.value_regret, p.sgd_regret, p.bounds.reg1_bound);
  }
  const double elapsed = Seconds(start);
  pass = pass && elapsed < 600.0;
  return {pass, detail + fmt::format("exponent={:.3f} in {:.1f}s",
                                     e.exponent.value_or(NAN), elapsed)};
}

Outcome PerfectMultiplierCheck() {
  // Learner value 1 against one uniform first-price opponent: Z = 1/(1+mu)^2.
  const EnvironmentStep env(AuctionFormat::kFirstPrice, FeasibleSet::SingleSlot(),
                            {{1.0, 1.0, {0.0}}}, 1.0);
  const double rho = 0.25;
  const double mu = PerfectMultiplier(env, rho, 4.0);
  const double h = 1e-5;
  const double slope = (ArtificialObjective(env, rho, mu + h) -
                        ArtificialObjective(env, rho, mu - h)) /
                       (2 * h);
  return {std::abs(mu - 1.0) <= 1e-6 && std::abs(slope) <= 1e-6,
          fmt::format("mu*={:.9f} H'={:.2e}", mu, slope)};
}

Outcome CoreFuzz() {
  const auto start = Clock::now();
  const CheckResult mbb = MbbCoreFuzz(10000, 1, false);
  const CheckResult gsp = GspCoreFuzz(10000, 1, false);
  const double elapsed = Seconds(start);
  return {mbb.pass && gsp.pass && elapsed < 60.0,
          fmt::format("mbb/core {} instances {} violations, gsp {} instances {} "
                      "violations in {:.1f}s",
                      mbb.trials, mbb.statistic, gsp.trials, gsp.statistic, elapsed)};
}

Outcome SolverOracle() {
  constexpr double kStep = 0.01;
  bool pass = true;
  std::size_t count = 0;
  double worst = 0.0;
  for (const auto& entry : fs::directory_iterator(kScenarios / "tiny")) {
    const Scenario s = LoadScenario(entry.path());
    const SimulationConfig cfg = s.simulation();
    const std::vector<double> budgets = cfg.budgets();
    const double lp = SolveExAnteOptimum(cfg.value_model, cfg.mechanism.feasible(),
                                         budgets, cfg.horizon)
                          .optimum;
    const double grid = test::GridExAnteOptimum(
        cfg.value_model, cfg.mechanism.feasible(), budgets, cfg.horizon, kStep);
    // One grid step per agent moves welfare by at most T * step * vbar, and
    // the second agent's share moves with the first's.
    const double slack = 2.0 * static_cast<double>(budgets.size()) *
                         static_cast<double>(cfg.horizon) * kStep *
                         cfg.value_model.value_cap();
    pass = pass && grid <= lp + 1e-6 && lp <= grid + 1e-6 + slack;
    worst = std::max(worst, std::abs(lp - grid));
    ++count;
  }
  return {pass && count > 0,
          fmt::format("{} instances, max |lp - grid| = {:.3g}", count, worst)};
}

Outcome Concentration() {
  VerifyOptions o;
  bool pass = true;
  std::string detail;
  for (const CheckResult& r : RunVerifySuite("concentration", o)) {
    pass = pass && r.pass && r.trials == 100000;
    detail += fmt::format("{}={:.4g}/{:.4g} ", r.checker, r.statistic, r.bound);
  }
  o.negative = true;
  const CheckResult neg = RunVerifySuite("concentration", o).front();
  pass = pass && !neg.pass;
  return {pass, detail + fmt::format("control={:.4g}/{:.4g} {}", neg.statistic,
                                     neg.bound, neg.pass ? "passed" : "failed")};
}

Outcome Sgd() {
  VerifyOptions o;
  bool pass = true;
  std::string detail;
  for (const CheckResult& r : RunVerifySuite("sgd", o)) {
    pass = pass && r.pass;
    detail += fmt::format("{}={:.4g}/{:.4g} ", r.checker, r.statistic, r.bound);
  }
  o.negative = true;
  const CheckResult neg = RunVerifySuite("sgd", o).front();
  pass = pass && !neg.pass;
  return {pass, detail + fmt::format("control={:.4g}/{:.4g} {}", neg.statistic,
                                     neg.bound, neg.pass ? "passed" : "failed")};
}

Outcome LipintAndStochasticValue() {
  const CheckResult lip = LipintFuzz(10000, 1, false);
  const EnvironmentStep env(AuctionFormat::kFirstPrice, FeasibleSet::SingleSlot(),
                            {{1.0, 1.0, {0.0}}}, 1.0);
  const double rho = 0.25;
  const std::int64_t T = 2000;
  const double star = PerfectMultiplier(env, rho, 4.0);
  const double bound = static_cast<double>(T) * ExpectedCurves(env, star).value +
                       env.value_cap() / rho;
  std::size_t violations = 0, points = 0;
  for (int i = 0; i <= 40; ++i) {
    const double mu = 0.1 * i;
    const auto y = StochasticValue(env, mu, rho * static_cast<double>(T), T, 200,
                                   static_cast<std::uint64_t>(i + 1));
    if (y.mean > bound + 3 * y.standard_error) ++violations;
    ++points;
  }
  return {lip.pass && lip.trials == 10000 && violations == 0,
          fmt::format("lipint {} violations / {}; stochastic value {} violations "
                      "over {} multipliers",
                      lip.statistic, lip.trials, violations, points)};
}

}  // namespace
}  // namespace pacesim

int main() {
  using namespace pacesim;
  ConfigureWorkersFromEnvironment();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"counterexample ratio", Counterexample},
      {"welfare half bound", WelfareBound},
      {"epoch lemma", EpochLemma},
      {"stopping bound", StoppingBound},
      {"dynamic regret growth", RegretGrowth},
      {"perfect multiplier", PerfectMultiplierCheck},
      {"MBB and core fuzzing", CoreFuzz},
      {"ex-ante solver vs grid", SolverOracle},
      {"concentration", Concentration},
      {"SGD with drift", Sgd},
      {"lipint and stochastic value", LipintAndStochasticValue},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    fmt::print("criterion {:>2} {:<28} {}  {}  [{:.2f}s]\n", i + 1, criteria[i].first,
               o.pass ? "PASS" : "FAIL", o.detail, Seconds(start));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
