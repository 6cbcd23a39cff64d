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

// End-to-end experiments shared by the command-line tool and the acceptance
// runner. Everything here is deterministic in the scenario and seed.

#ifndef PACESIM_EXPERIMENTS_H_
#define PACESIM_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pacesim/parallel.h"
#include "pacesim/regret.h"
#include "pacesim/scenario.h"
#include "pacesim/verify.h"
#include "pacesim/welfare.h"

namespace pacesim {

struct AgentSummary {
  double budget = 0.0;
  double mean_value = 0.0;
  double mean_spend = 0.0;
  double mean_liquid_value = 0.0;
};

// Market-level invariants accumulated over replications.
struct InvariantTally {
  std::size_t epochs_checked = 0;
  std::size_t epoch_failures = 0;
  double epoch_min_slack = 0.0;
  std::size_t stopping_checked = 0;  // traces meeting the hypotheses
  std::size_t stopping_failures = 0;
  std::size_t conformance_failures = 0;
};

struct RunSummary {
  std::string scenario;
  std::size_t replications = 0;
  std::int64_t horizon = 0;
  std::vector<AgentSummary> agents;
  double welfare_mean = 0.0;
  double welfare_standard_error = 0.0;
  std::optional<double> reference_welfare;  // from the scenario's benchmark
  std::optional<double> reference_ratio;
  InvariantTally invariants;
};

// Calls `on_trace(replication, trace)` for every trace when set (used to
// write CSV files); traces are otherwise dropped after summarizing.
using TraceSink = std::function<void(std::size_t, const Trace&)>;

RunSummary RunScenario(const Scenario& scenario, std::size_t replications,
                       const TraceSink& on_trace = {},
                       Execution exec = Execution::kParallel);

struct WelfareReport {
  RunSummary run;
  ExAnteSolution optimum;
  WelfareBoundCheck bound;
  SpendCheck spend;
};

// Throws CapacityError when the ex-ante program is too large.
WelfareReport RunWelfare(const Scenario& scenario, std::size_t replications,
                         Execution exec = Execution::kParallel);

struct RegretPoint {
  std::int64_t horizon = 0;
  std::size_t replications = 0;
  double value_regret = 0.0;  // mean over replications
  double value_regret_se = 0.0;
  double sgd_regret = 0.0;
  double sgd_regret_se = 0.0;
  double mean_stopped_rounds = 0.0;
  RegretReport bounds;  // bound fields from the first replication
  bool sgd_within_bound = false;
};

struct RegretExperiment {
  std::string scenario;
  std::vector<RegretPoint> points;
  std::optional<double> exponent;  // when two or more horizons ran
  std::size_t switches = 0;        // at the largest horizon
  double path_length = 0.0;
  double mu_cap = 0.0;
  // Learner and perfect multipliers of replication 0 at the largest horizon.
  std::vector<double> learner_path;
  std::vector<double> perfect_path;
};

// Throws EnvironmentError when the opponents cannot be replayed.
RegretExperiment RunRegret(const Scenario& scenario,
                           Execution exec = Execution::kParallel);

struct CurveRow {
  double mu, spend, value, objective, w;
};

// Z, V, H, W on a uniform grid over [0, mu_cap] for the scenario's first
// environment step.
std::vector<CurveRow> CurveDump(const Scenario& scenario, std::size_t points);

struct CounterexampleReport {
  double mu_cap = 0.0;
  std::int64_t horizon = 0;
  bool paced = false;
  double realized_welfare = 0.0;
  double reference_welfare = 0.0;  // everything to agent 2
  double optimum = 0.0;            // ex-ante optimum
  double ratio = 0.0;              // realized / reference
  double ratio_to_optimum = 0.0;
};

CounterexampleReport RunCounterexample(double mu_cap, std::int64_t horizon,
                                       bool paced);

struct VerifyOptions {
  bool negative = false;
  std::size_t trials = 0;  // 0: suite default
  std::uint64_t seed = 1;
  // Scenarios feeding the market-level suites.
  std::vector<std::filesystem::path> scenarios;
};

// Suites: concentration, sgd, lipint, gsp-core, mbb-core, epoch-lemma,
// stopping-bound, rk, all. Throws ConfigError for an unknown name.
std::vector<CheckResult> RunVerifySuite(const std::string& suite,
                                        const VerifyOptions& options);

const std::vector<std::string>& VerifySuiteNames();

}  // namespace pacesim

#endif  // PACESIM_EXPERIMENTS_H_
