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

// Scenario files: one JSON document per experiment.
//
//   {
//     "name": "symmetric",
//     "mechanism": {"type": "second_price" | "first_price" | "gsp",
//                   "click_rates": [1.0, 0.5]},
//     "agents": [{"budget": 2500, "learning_rate": 0.01, "mu_cap": 4},
//                {"script": {"kind": "fixed", "bid": 0.3}, "budget": 10}],
//     "value_model": {"support": [{"prob": 1, "values": [1, 1], "label": "a"}]},
//     "horizon": 10000, "seed": 1, "replications": 200,
//     "smoothing": {"eta": 0.05},
//     "benchmark": {"reference_rule": [[0, 1]]},
//     "regret": {"horizons": [1000, 4000], "replications": 50,
//                "switch": {"segment": 500, "value_models": [{"support": [...]}]}}
//   }
//
// learning_rate defaults to 1/sqrt(T) and mu_cap to vbar/rho. Scripted
// agents take "fixed" (needs "bid") or "truthful"; their budget defaults to
// unlimited. Unknown keys are errors. Every error is a ConfigError whose
// message starts with "<source>:<line>:" when the offending value came from
// the file.

#ifndef PACESIM_SCENARIO_H_
#define PACESIM_SCENARIO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pacesim/market.h"
#include "pacesim/regret.h"
#include "pacesim/welfare.h"

namespace pacesim {

struct RegretSettings {
  std::vector<std::int64_t> horizons;
  std::size_t replications = 1;
  std::size_t segment = 0;  // 0: stationary
  std::vector<ValueModel> alternates;
};

// One agent as written in the file; unset fields are derived per horizon.
struct AgentEntry {
  bool pacing = true;
  double budget = 0.0;  // infinity for an unlimited scripted agent
  std::optional<double> learning_rate;
  std::optional<double> mu_cap;
  Script script;
};

struct Scenario {
  std::string name;
  AuctionFormat format = AuctionFormat::kSecondPrice;
  FeasibleSet feasible = FeasibleSet::SingleSlot();
  std::vector<AgentEntry> agents;
  std::vector<ValuePoint> support;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::size_t replications = 1;
  double smoothing = 0.0;  // eta; defaults to 0.05 vbar
  std::optional<ExAnteRule> reference_rule;
  std::optional<RegretSettings> regret;

  SimulationConfig simulation() const { return AtHorizon(horizon); }
  ValueModel value_model() const { return ValueModel(support); }
  double value_cap() const { return value_model().value_cap(); }

  // The simulation at another horizon with the same per-round budgets.
  // Learning rates and caps left unset in the file are re-derived.
  SimulationConfig AtHorizon(std::int64_t T) const;
};

// `overrides` are "dotted.path=value" assignments applied before
// validation; the value is parsed as JSON and falls back to a string.
Scenario ParseScenario(std::string_view text, std::string_view source,
                       std::span<const std::string> overrides = {});

// Throws IoError when the file cannot be read.
Scenario LoadScenario(const std::filesystem::path& path,
                      std::span<const std::string> overrides = {});

// Stationary or switching environment faced by agent 0 at horizon T. Only
// scripted opponents with unlimited budgets can be replayed exactly; any
// other opponent throws EnvironmentError.
EnvironmentSchedule ScenarioEnvironment(const Scenario& scenario,
                                        std::int64_t T);

}  // namespace pacesim

#endif  // PACESIM_SCENARIO_H_
