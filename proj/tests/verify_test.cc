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
#include <vector>

#include "doctest.h"
#include "pacesim/errors.h"
#include "pacesim/verify.h"

namespace pacesim {
namespace {

TEST_CASE("concentration setups") {
  const auto degenerate =
      ConcentrationCheck(MartingaleSetup::Degenerate(100), 1000, 1);
  CHECK(degenerate.frequency == 0.0);
  CHECK(degenerate.pass);

  const auto uniform = ConcentrationCheck(MartingaleSetup::Uniform(100), 20000, 2);
  CHECK(uniform.bound == doctest::Approx(std::exp(-0.5)));
  CHECK(uniform.pass);

  const auto adversarial =
      ConcentrationCheck(MartingaleSetup::Adversarial(100), 20000, 3);
  CHECK(adversarial.pass);

  const auto control =
      ConcentrationCheck(MartingaleSetup::AboveMean(100), 20000, 4);
  CHECK(control.frequency > 0.99);
  CHECK_FALSE(control.pass);

  CHECK(ConcentrationCheck(MartingaleSetup::Uniform(50), 500, 9,
                           Execution::kSerial)
            .frequency ==
        ConcentrationCheck(MartingaleSetup::Uniform(50), 500, 9).frequency);

  MartingaleSetup broken = MartingaleSetup::Uniform(10);
  broken.vbar = 0.5;
  CHECK_THROWS_AS(ConcentrationCheck(broken, 10, 0), PreconditionError);
}

TEST_CASE("projected SGD against a moving comparator") {
  const SgdProblem fixed = SgdProblem::Static(10000);
  CHECK(fixed.path_bound() == 1.0);
  const auto s = SgdRegretCheck(fixed, fixed.tuned_learning_rate(), 20, 1);
  CHECK(s.pass);
  CHECK(s.regret < 0.1 * s.bound);

  const SgdProblem drift = SgdProblem::Drifting(100000);
  // Two full sine cycles of amplitude 0.4 travel 3.2.
  CHECK(drift.path_bound() == doctest::Approx(4.2).epsilon(1e-3));
  const auto d = SgdRegretCheck(drift, drift.tuned_learning_rate(), 20, 2);
  CHECK(d.pass);
  const auto frozen = SgdRegretCheck(drift, 0.0, 20, 3);
  CHECK_FALSE(frozen.pass);
  CHECK(frozen.regret > 0.1 * static_cast<double>(drift.horizon));
}

TEST_CASE("piecewise-linear integrals") {
  const PiecewiseLinear f{{0.0, 1.0, 3.0}, {0.0, 2.0, 2.0}};
  CHECK(f(0.5) == 1.0);
  CHECK(f.Integral(1.0) == 1.0);
  CHECK(f.Integral(3.0) == 5.0);
  CHECK(f.Integral(0.5) == 0.25);
  // Midpoint sums converge to the exact integral.
  double mid = 0.0;
  const int cells = 30000;
  for (int i = 0; i < cells; ++i) mid += f((i + 0.5) * 2.2 / cells) * 2.2 / cells;
  CHECK(mid == doctest::Approx(f.Integral(2.2)).epsilon(1e-7));
}

TEST_CASE("integrated Lipschitz inequality") {
  const double lambda = 2.5;
  const PiecewiseLinear linear{{0.0, 4.0}, {0.0, 4.0 * lambda}};
  for (double x : {0.0, 0.3, 1.0, 4.0}) {
    CHECK(LipintHolds(linear, lambda, x));
    CHECK(linear(x) == doctest::Approx(std::sqrt(2 * lambda * linear.Integral(x))));
  }
  const PiecewiseLinear zero{{0.0, 1.0}, {0.0, 0.0}};
  CHECK(LipintHolds(zero, 1.0, 0.7));

  CHECK_THROWS_AS(LipintHolds(linear, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(LipintHolds(PiecewiseLinear{{0.0, 1.0}, {0.0, -1.0}}, 2.0, 0.5),
                  PreconditionError);
  CHECK_THROWS_AS(LipintHolds(PiecewiseLinear{{0.0, 1.0}, {0.5, 1.0}}, 2.0, 0.5),
                  PreconditionError);
  CHECK_THROWS_AS(LipintHolds(linear, lambda, 5.0), PreconditionError);

  const CheckResult fuzz = LipintFuzz(10000, 5, false);
  CHECK(fuzz.statistic == 0.0);
  CHECK(fuzz.pass);
  CHECK_FALSE(LipintFuzz(2000, 5, true).pass);
}

TEST_CASE("GSP core inequality") {
  const std::vector<double> a = {1.0, 0.5};
  CHECK(GspCoreSlack(a, std::vector<double>{3, 2, 1}) == doctest::Approx(0.0));
  CHECK(GspCoreSlack(a, std::vector<double>{}) == 0.0);
  // Without payments a losing bidder alone gains a slot.
  CHECK(GspCoreSlack(a, std::vector<double>{3, 2, 1}, true) < 0.0);
  CHECK_THROWS_AS(GspCoreSlack(a, std::vector<double>(9, 1.0)), CapacityError);

  CHECK(GspCoreFuzz(10000, 7, false).pass);
  CHECK_FALSE(GspCoreFuzz(1000, 7, true).pass);
}

TEST_CASE("MBB and core fuzzing") {
  const CheckResult r = MbbCoreFuzz(3000, 11, false);
  CHECK(r.trials == 9000);
  CHECK(r.statistic == 0.0);
  CHECK_FALSE(MbbCoreFuzz(500, 11, true).pass);
  CHECK(MbbCoreFuzz(200, 3, false, Execution::kSerial).statistic == 0.0);
}

Trace HandTrace(const std::vector<double>& multipliers) {
  Trace t(multipliers.size(), 2);
  t.budgets = {4.0, 10.0};
  for (std::size_t r = 0; r < multipliers.size(); ++r) {
    t.values[t.at(r, 0)] = r % 2 == 0 ? 1.0 : 2.0;
    t.values[t.at(r, 1)] = 1.0;
    t.status[t.at(r, 0)] = MultiplierStatus::kActive;
    t.multipliers[t.at(r, 0)] = multipliers[r];
  }
  return t;
}

TEST_CASE("R_k diagnostic") {
  const ValueModel model({{0.5, {1.0, 1.0}, ""}, {0.5, {2.0, 1.0}, ""}});
  ExAnteRule rule;
  rule.allocation = {{0.5, 0.5}, {1.0, 0.0}};

  const Trace unpaced = HandTrace(std::vector<double>(8, 0.0));
  // Four rounds at v = 1 with y = 0.5, four at v = 2 with y = 1.
  CHECK(RkDiagnostic(unpaced, rule, model, 0) == 10.0);

  const Trace paced = HandTrace(std::vector<double>(8, 0.3));
  CHECK(RkDiagnostic(paced, rule, model, 0) == doctest::Approx(4.0));

  Trace stray = unpaced;
  stray.values[stray.at(3, 0)] = 7.0;
  CHECK_THROWS_AS(RkDiagnostic(stray, rule, model, 0), LookupError);

  // E[y v] for agent 0 is 1.25 against rho = 0.5.
  const std::vector<double> budgets = {4.0, 10.0};
  const ExAnteRule trimmed = TrimRuleToRates(rule, model, budgets, 8);
  CHECK(trimmed.allocation[0][0] == doctest::Approx(0.2));
  CHECK(trimmed.allocation[1][0] == doctest::Approx(0.4));
  CHECK(trimmed.allocation[0][1] == 0.5);

  CHECK(RkBound(0.5, 2.0, 2, 100) ==
        doctest::Approx(50.0 + 2.0 * std::sqrt(100.0 * std::log(400.0))));
}

TEST_CASE("R_k bound on the both-paced counterexample") {
  const std::int64_t T = 1000;
  const SimulationConfig cfg = CounterexamplePacedScenario(9.0, T);
  const ValueModel& model = cfg.value_model;
  const std::vector<double> budgets = cfg.budgets();
  const ExAnteSolution opt =
      SolveExAnteOptimum(model, cfg.mechanism.feasible(), budgets, T);
  const ExAnteRule rule = TrimRuleToRates(opt.rule, model, budgets, T);
  const auto violations = RunReplications(cfg, 100, [&](const Trace& trace, std::size_t) {
    int bad = 0;
    for (std::size_t k = 0; k < 2; ++k) {
      const double rho = budgets[k] / static_cast<double>(T);
      if (RkDiagnostic(trace, rule, model, k) >
          RkBound(rho, model.value_cap(), 2, T)) {
        ++bad;
      }
    }
    return bad;
  });
  int total = 0;
  for (int v : violations) total += v;
  CHECK(total == 0);
}

}  // namespace
}  // namespace pacesim
