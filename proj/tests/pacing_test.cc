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

#include "doctest.h"
#include "pacesim/errors.h"
#include "pacesim/pacing.h"
#include "pacesim/rng.h"

namespace pacesim {
namespace {

AgentConfig Config(double budget, std::int64_t horizon, double eps,
                   double mu_cap, double vbar = 1.0) {
  AgentConfig c;
  c.budget = budget;
  c.horizon = horizon;
  c.learning_rate = eps;
  c.mu_cap = mu_cap;
  c.value_cap = vbar;
  return c;
}

TEST_CASE("initial state") {
  const auto s = InitState(Config(100, 100, 0.1, 1));
  CHECK(s.multiplier == 0.0);
  CHECK(s.remaining_budget == 100.0);
  CHECK(s.round == 1);
  CHECK(Config(100, 100, 0.1, 1).target_rate() == 1.0);
  CHECK(Config(1, 1000, 0.1, 1).target_rate() == doctest::Approx(0.001));
  CHECK_THROWS_AS(InitState(Config(0, 100, 0.1, 1)), ConfigError);
  CHECK_THROWS_AS(InitState(Config(1, 0, 0.1, 1)), ConfigError);
}

TEST_CASE("bids") {
  PacingState s{0.0, 10.0, 1, false};
  CHECK(ComputeBid(s, 1.0) == 1.0);
  s.multiplier = 1.0;
  CHECK(ComputeBid(s, 2.0) == 1.0);
  s = PacingState{0.0, 0.5, 1, false};
  CHECK(ComputeBid(s, 2.0) == 0.5);
  s.stopped = true;
  CHECK_THROWS_AS(ComputeBid(s, 1.0), StoppedAgentError);
}

TEST_CASE("multiplier update and projections") {
  auto c = Config(10, 10, 0.1, 5);  // rho = 1
  PacingState s{0.5, 10.0, 1, false};
  CHECK(Update(c, s, 2.0).multiplier == doctest::Approx(0.6));
  s.multiplier = 0.0;
  CHECK(Update(c, s, 0.0).multiplier == 0.0);
  // rho = 0 needs a zero budget, which only a hand-built config allows.
  auto zero = Config(0, 10, 0.1, 2);
  PacingState top{2.0, 10.0, 1, false};
  CHECK(Update(zero, top, 5.0).multiplier == 2.0);
  CHECK_THROWS_AS(Update(c, PacingState{0.0, 1.0, 1, false}, 2.0),
                  InvariantViolation);
  CHECK_THROWS_AS(Update(c, PacingState{0.0, 1.0, 1, false}, -1.0),
                  InvariantViolation);
}

TEST_CASE("stop transitions and stopped states are frozen") {
  auto c = Config(1, 3, 0.1, 5);
  PacingState s = InitState(c);
  s = Update(c, s, 1.0);
  CHECK(s.stopped);
  const PacingState frozen = Update(c, s, 0.0);
  CHECK(frozen.multiplier == s.multiplier);
  CHECK(frozen.round == s.round);
  PacingState t = InitState(c);
  for (int i = 0; i < 3; ++i) t = Update(c, t, 0.0);
  CHECK(t.stopped);
  CHECK(t.round == 4);
}

TEST_CASE("stopping-time bound") {
  CHECK(StoppingTimeBound(Config(100, 100, 0.01, 9, 10)) == 910);
  CHECK(StoppingTimeBound(Config(1, 1, 1, 0, 1)) == 1);
  CHECK_THROWS_AS(StoppingTimeBound(Config(100, 100, 0.5, 9, 10)),
                  BoundInapplicableError);
  CHECK_THROWS_AS(StoppingTimeBound(Config(100, 100, 0.01, 8, 10)),
                  BoundInapplicableError);
}

TEST_CASE("defaults satisfy the stopping-bound hypotheses") {
  for (std::int64_t T : {100, 1000, 10000}) {
    for (double b : {0.1, 0.5, 1.0}) {
      const auto c = DefaultAgentConfig(b * static_cast<double>(T), T, 2.0);
      CHECK(c.learning_rate == doctest::Approx(1 / std::sqrt(double(T))));
      CHECK(c.mu_cap == doctest::Approx(2.0 / b));
      CHECK(c.mu_cap_covers_values());
      CHECK(c.stopping_bound_applies() == (c.learning_rate * 2.0 <= 1.0));
    }
  }
}

TEST_CASE("random walks respect state invariants") {
  RandomStream rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t T = 1 + static_cast<std::int64_t>(rng() % 200);
    const double vbar = 1.0 + rng.Uniform(0, 3);
    const auto c =
        Config(rng.Uniform(0.1, 50), T, rng.Uniform(0.01, 1), rng.Uniform(0, 10),
               vbar);
    GradientPacer agent(c);
    double spent = 0.0;
    for (std::int64_t t = 0; t < T + 5; ++t) {
      const double v = rng.Uniform(0, vbar);
      const bool was_stopped = agent.stopped();
      const double bid = agent.Bid(v);
      REQUIRE(bid <= v);
      REQUIRE(bid <= agent.remaining_budget());
      if (was_stopped) REQUIRE(bid == 0.0);
      if (!was_stopped && agent.state().multiplier == 0.0) {
        REQUIRE(bid == std::min(v, agent.remaining_budget()));
      }
      const double z = bid * rng.Uniform();
      agent.Observe(z);
      spent += was_stopped ? 0.0 : z;
      REQUIRE(agent.state().multiplier >= 0.0);
      REQUIRE(agent.state().multiplier <= c.mu_cap);
      REQUIRE(agent.remaining_budget() >= 0.0);
    }
    CHECK(agent.stopped());
    CHECK(spent <= c.budget * (1 + 1e-12));
  }
}

TEST_CASE("scripted bidders") {
  ScriptedBidder fixed({Script::Kind::kFixed, 2.0});
  CHECK(fixed.Bid(0.1) == 2.0);
  CHECK_FALSE(fixed.multiplier().has_value());
  ScriptedBidder truthful({Script::Kind::kTruthful, 0.0}, 1.0);
  CHECK(truthful.Bid(0.7) == 0.7);
  truthful.Observe(0.7);
  CHECK(truthful.Bid(0.7) == doctest::Approx(0.3));
  truthful.Observe(0.3);
  CHECK(truthful.stopped());
  CHECK(truthful.Bid(0.7) == 0.0);
  CHECK_THROWS_AS(ScriptedBidder({Script::Kind::kFixed, -1.0}), ConfigError);
}

}  // namespace
}  // namespace pacesim
