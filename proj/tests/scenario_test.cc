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

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "pacesim/errors.h"
#include "pacesim/experiments.h"
#include "pacesim/scenario.h"

namespace pacesim {
namespace {

namespace fs = std::filesystem;

constexpr const char* kTwoAgents = R"({
  "name": "t",
  "mechanism": {"type": "second_price"},
  "agents": [{"budget": 30},
             {"script": {"kind": "fixed", "bid": 0.4}}],
  "value_model": {"support": [
    {"prob": 0.5, "values": [1, 0]},
    {"prob": 0.5, "values": [0.5, 0]}]},
  "horizon": 100,
  "seed": 3,
  "replications": 4
})";

std::string ErrorOf(std::string_view text, std::vector<std::string> sets = {}) {
  try {
    ParseScenario(text, "s.json", sets);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("scenario parsing") {
  const Scenario s = ParseScenario(kTwoAgents, "s.json");
  CHECK(s.agents.size() == 2);
  CHECK(s.agents[0].pacing);
  CHECK_FALSE(s.agents[1].pacing);
  CHECK(std::isinf(s.agents[1].budget));
  CHECK(s.value_cap() == 1.0);
  CHECK(s.smoothing == doctest::Approx(0.05));

  const SimulationConfig cfg = s.simulation();
  // rho = 0.3, so the cap defaults to vbar / rho and the rate to 1/sqrt(T).
  CHECK(cfg.agents[0].pacing.mu_cap == doctest::Approx(1.0 / 0.3));
  CHECK(cfg.agents[0].pacing.learning_rate == doctest::Approx(0.1));

  const SimulationConfig big = s.AtHorizon(400);
  CHECK(big.agents[0].pacing.budget == doctest::Approx(120.0));
  CHECK(big.agents[0].pacing.learning_rate == doctest::Approx(0.05));
}

TEST_CASE("scenario errors carry the line") {
  std::string text = kTwoAgents;
  text.replace(text.find("\"seed\""), 6, "\"sed\"");
  const std::string unknown = ErrorOf(text);
  CHECK(unknown.rfind("s.json:10:", 0) == 0);
  CHECK(unknown.find("sed") != std::string::npos);

  std::string probs = kTwoAgents;
  probs.replace(probs.find("\"prob\": 0.5"), 11, "\"prob\": 0.4");
  CHECK(ErrorOf(probs).find("sum") != std::string::npos);

  std::string negative = kTwoAgents;
  negative.replace(negative.find("30"), 2, "-1");
  CHECK(ErrorOf(negative).rfind("s.json:4:", 0) == 0);

  CHECK(ErrorOf("{\"name\": ").rfind("s.json:", 0) == 0);
  CHECK_FALSE(ErrorOf(R"({"name": "x"})").empty());
}

TEST_CASE("dotted overrides") {
  const std::vector<std::string> sets = {"agents.0.budget=50", "name=renamed",
                                         "agents.1.script.bid=0.1"};
  const Scenario s = ParseScenario(kTwoAgents, "s.json", sets);
  CHECK(s.agents[0].budget == 50.0);
  CHECK(s.name == "renamed");
  CHECK(s.agents[1].script.bid == doctest::Approx(0.1));

  CHECK(ErrorOf(kTwoAgents, {"agents.7.budget=1"}).find("--set") != std::string::npos);
  CHECK(ErrorOf(kTwoAgents, {"no_equals_sign"}).find("--set") != std::string::npos);
  CHECK(ErrorOf(kTwoAgents, {"horizon=-5"}).find("horizon") != std::string::npos);
}

TEST_CASE("bundled scenarios load") {
  std::size_t count = 0;
  for (const auto& entry : fs::recursive_directory_iterator(PACESIM_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(LoadScenario(entry.path()));
    ++count;
  }
  CHECK(count >= 14);
  CHECK_THROWS_AS(LoadScenario("/nonexistent/x.json"), IoError);
}

TEST_CASE("regret environments need replayable opponents") {
  const Scenario s = ParseScenario(kTwoAgents, "s.json");
  const EnvironmentSchedule env = ScenarioEnvironment(s, 100);
  CHECK(env.switches() == 0);

  const Scenario paced =
      ParseScenario(kTwoAgents, "s.json",
                    std::vector<std::string>{R"(agents.1={"budget": 10})"});
  CHECK_THROWS_AS(ScenarioEnvironment(paced, 100), EnvironmentError);
  const Scenario limited = ParseScenario(kTwoAgents, "s.json",
                                         std::vector<std::string>{"agents.1.budget=5"});
  CHECK_THROWS_AS(ScenarioEnvironment(limited, 100), EnvironmentError);
}

TEST_CASE("scenario runs") {
  const Scenario s = ParseScenario(kTwoAgents, "s.json");
  const RunSummary a = RunScenario(s, 6, {}, Execution::kSerial);
  const RunSummary b = RunScenario(s, 6);
  CHECK(a.welfare_mean == b.welfare_mean);
  CHECK(a.welfare_standard_error == b.welfare_standard_error);
  CHECK(a.agents[0].mean_spend == b.agents[0].mean_spend);
  CHECK(a.agents[0].mean_spend <= 30.0 * (1 + 1e-12));
  CHECK(a.invariants.conformance_failures == 0);
  CHECK(a.invariants.epoch_failures == 0);

  std::size_t seen = 0;
  RunScenario(s, 3, [&](std::size_t, const Trace& t) {
    CHECK(t.num_rounds == 100);
    ++seen;
  }, Execution::kSerial);
  CHECK(seen == 3);

  const Scenario empty =
      ParseScenario(kTwoAgents, "s.json", std::vector<std::string>{"horizon=0"});
  const RunSummary z = RunScenario(empty, 2);
  CHECK(z.welfare_mean == 0.0);
  CHECK(z.agents[0].mean_spend == 0.0);
  CHECK(z.invariants.epochs_checked == 0);
}

TEST_CASE("counterexample ratio is exact") {
  for (double mu : {1.0, 9.0, 99.0}) {
    const CounterexampleReport r = RunCounterexample(mu, 1000, false);
    CHECK(r.ratio == doctest::Approx(1.0 / (mu + 1.0)).epsilon(1e-12));
    CHECK(r.realized_welfare == doctest::Approx(1000.0 / (mu + 1.0)));
    // Splitting rounds does better than the reference rule.
    CHECK(r.optimum > r.reference_welfare);
  }
  CHECK_THROWS_AS(RunCounterexample(9.0, 0, false), Error);
}

TEST_CASE("verify suite dispatch") {
  VerifyOptions o;
  CHECK_THROWS_AS(RunVerifySuite("nope", o), ConfigError);
  o.trials = 200;
  const auto r = RunVerifySuite("gsp-core", o);
  REQUIRE(r.size() == 1);
  CHECK(r[0].pass);
  o.scenarios = {fs::path(PACESIM_SCENARIO_DIR) / "tiny" / "binding-budgets.json"};
  o.trials = 3;
  CHECK(RunVerifySuite("epoch-lemma", o)[0].pass);
  CHECK(RunVerifySuite("stopping-bound", o)[0].pass);
  // At T = 100 the stopping bound exceeds the horizon, so tampering needs a
  // longer run to show.
  o.scenarios = {fs::path(PACESIM_SCENARIO_DIR) / "symmetric.json"};
  o.trials = 1;
  o.negative = true;
  CHECK_FALSE(RunVerifySuite("stopping-bound", o)[0].pass);
}

}  // namespace
}  // namespace pacesim
