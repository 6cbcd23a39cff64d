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

#include "pacesim/pacing.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pacesim/constants.h"
#include "pacesim/errors.h"

namespace pacesim {

namespace {
constexpr double kRelSlack = 1e-12;
}  // namespace

bool AgentConfig::mu_cap_covers_values() const {
  const double need = value_cap / target_rate() - 1.0;
  return mu_cap >= need - kRelSlack * std::max(1.0, std::abs(need));
}

bool AgentConfig::step_small_enough() const {
  return learning_rate * value_cap <= 1.0 + kRelSlack;
}

void AgentConfig::Validate() const {
  if (!(budget > 0.0) || std::isinf(budget)) {
    throw ConfigError("agent budget must be positive and finite");
  }
  if (horizon <= 0) throw ConfigError("agent horizon must be positive");
  if (!(learning_rate > 0.0)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(mu_cap >= 0.0)) throw ConfigError("mu_cap must be non-negative");
  if (!(value_cap >= 1.0)) throw ConfigError("value cap must be at least 1");
}

AgentConfig DefaultAgentConfig(double budget, std::int64_t horizon,
                               double value_cap) {
  AgentConfig c;
  c.budget = budget;
  c.horizon = horizon;
  c.value_cap = value_cap;
  if (horizon > 0) {
    c.learning_rate = 1.0 / std::sqrt(static_cast<double>(horizon));
    c.mu_cap = budget > 0.0 ? value_cap / c.target_rate() : 0.0;
  }
  return c;
}

PacingState InitState(const AgentConfig& config) {
  config.Validate();
  PacingState s;
  s.multiplier = 0.0;
  s.remaining_budget = config.budget;
  s.round = 1;
  s.stopped = false;
  return s;
}

double ComputeBid(const PacingState& state, double value) {
  if (state.stopped) throw StoppedAgentError("agent has stopped bidding");
  if (!(value >= 0.0)) throw PreconditionError("value must be non-negative");
  return std::min(value / (1.0 + state.multiplier), state.remaining_budget);
}

PacingState Update(const AgentConfig& config, const PacingState& state,
                   double spend) {
  if (state.stopped) return state;
  if (!(spend >= 0.0) || spend > state.remaining_budget) {
    throw InvariantViolation("spend " + std::to_string(spend) +
                             " outside [0, remaining budget " +
                             std::to_string(state.remaining_budget) + "]");
  }
  PacingState next = state;
  const double step =
      state.multiplier - config.learning_rate * (config.target_rate() - spend);
  next.multiplier = std::clamp(step, 0.0, config.mu_cap);
  next.remaining_budget = state.remaining_budget - spend;
  next.round = state.round + 1;
  next.stopped = next.remaining_budget < kStopBudgetFraction * config.budget ||
                 next.round > config.horizon;
  return next;
}

std::int64_t StoppingTimeBound(const AgentConfig& config) {
  config.Validate();
  if (!config.mu_cap_covers_values()) {
    throw BoundInapplicableError("stopping bound needs mu_cap >= vbar/rho - 1");
  }
  if (!config.step_small_enough()) {
    throw BoundInapplicableError("stopping bound needs eps * vbar <= 1");
  }
  const double rho = config.target_rate();
  const double bound =
      config.mu_cap / (config.learning_rate * rho) + config.value_cap / rho;
  return static_cast<std::int64_t>(std::ceil(bound - kTolerance));
}

GradientPacer::GradientPacer(const AgentConfig& config)
    : config_(config), state_(InitState(config)) {}

double GradientPacer::Bid(double value) {
  if (state_.stopped) return 0.0;
  return ComputeBid(state_, value);
}

void GradientPacer::Observe(double spend) {
  state_ = Update(config_, state_, spend);
}

ScriptedBidder::ScriptedBidder(Script script, double budget)
    : script_(script), budget_(budget), remaining_(budget) {
  if (!(budget > 0.0)) throw ConfigError("scripted budget must be positive");
  if (script_.kind == Script::Kind::kFixed && !(script_.bid >= 0.0)) {
    throw ConfigError("scripted bid must be non-negative");
  }
}

double ScriptedBidder::Bid(double value) {
  if (stopped_) return 0.0;
  const double raw = script_.kind == Script::Kind::kFixed ? script_.bid : value;
  return std::min(raw, remaining_);
}

void ScriptedBidder::Observe(double spend) {
  if (!(spend >= 0.0) || spend > remaining_) {
    throw InvariantViolation("scripted agent overspent its budget");
  }
  remaining_ -= spend;
  if (std::isfinite(budget_) && remaining_ < kStopBudgetFraction * budget_) {
    stopped_ = true;
  }
}

}  // namespace pacesim
