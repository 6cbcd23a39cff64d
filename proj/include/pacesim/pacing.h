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

// Gradient-based budget pacing. The agent bids min{v / (1 + mu), B_t} and
// after observing spend z moves its multiplier by a projected gradient step:
//
//   mu <- clamp(mu - eps * (rho - z), 0, mu_cap),   rho = B / T.
//
// The pure transition functions (InitState / ComputeBid / Update) are the
// reference; GradientPacer wraps them behind the Bidder interface that the
// market simulator drives.

#ifndef PACESIM_PACING_H_
#define PACESIM_PACING_H_

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>

namespace pacesim {

struct AgentConfig {
  double budget = 0.0;
  std::int64_t horizon = 0;
  double learning_rate = 0.0;
  double mu_cap = 0.0;
  double value_cap = 1.0;

  // rho = B / T.
  double target_rate() const {
    return budget / static_cast<double>(horizon);
  }

  // mu_cap >= vbar / rho - 1.
  bool mu_cap_covers_values() const;
  // eps * vbar <= 1.
  bool step_small_enough() const;
  bool stopping_bound_applies() const {
    return mu_cap_covers_values() && step_small_enough();
  }

  // Throws ConfigError unless budget > 0, horizon > 0, eps > 0,
  // mu_cap >= 0 and value_cap >= 1.
  void Validate() const;
};

// eps = 1/sqrt(T) and mu_cap = vbar / rho.
AgentConfig DefaultAgentConfig(double budget, std::int64_t horizon,
                               double value_cap);

struct PacingState {
  double multiplier = 0.0;
  double remaining_budget = 0.0;
  std::int64_t round = 1;
  bool stopped = false;
};

PacingState InitState(const AgentConfig& config);

// min{value / (1 + mu), remaining}. Throws StoppedAgentError on a stopped
// state.
double ComputeBid(const PacingState& state, double value);

// One pacing step. A stopped state is returned unchanged. Throws
// InvariantViolation when spend is negative or exceeds the remaining budget.
PacingState Update(const AgentConfig& config, const PacingState& state,
                   double spend);

// ceil(mu_cap / (eps rho) + vbar / rho): a sure bound on T - tau. Throws
// BoundInapplicableError when the hypotheses fail.
std::int64_t StoppingTimeBound(const AgentConfig& config);

// Agent as seen by the market: emit a bid for an observed value, then
// observe the spend. Scripted opponents implement the same interface.
class Bidder {
 public:
  virtual ~Bidder() = default;

  virtual double Bid(double value) = 0;
  virtual void Observe(double spend) = 0;

  // Current pacing multiplier; nullopt for agents that do not pace.
  virtual std::optional<double> multiplier() const = 0;
  virtual bool stopped() const = 0;
  virtual double remaining_budget() const = 0;
  virtual double budget() const = 0;
};

class GradientPacer final : public Bidder {
 public:
  explicit GradientPacer(const AgentConfig& config);

  double Bid(double value) override;
  void Observe(double spend) override;
  std::optional<double> multiplier() const override {
    return state_.multiplier;
  }
  bool stopped() const override { return state_.stopped; }
  double remaining_budget() const override { return state_.remaining_budget; }
  double budget() const override { return config_.budget; }

  const PacingState& state() const { return state_; }
  const AgentConfig& config() const { return config_; }

 private:
  AgentConfig config_;
  PacingState state_;
};

struct Script {
  enum class Kind { kFixed, kTruthful };
  Kind kind = Kind::kTruthful;
  double bid = 0.0;  // used by kFixed
};

// Non-learning opponent. Bids are clamped to the remaining budget; the
// default budget is unlimited.
class ScriptedBidder final : public Bidder {
 public:
  explicit ScriptedBidder(
      Script script,
      double budget = std::numeric_limits<double>::infinity());

  double Bid(double value) override;
  void Observe(double spend) override;
  std::optional<double> multiplier() const override { return std::nullopt; }
  bool stopped() const override { return stopped_; }
  double remaining_budget() const override { return remaining_; }
  double budget() const override { return budget_; }

 private:
  Script script_;
  double budget_;
  double remaining_;
  bool stopped_ = false;
};

}  // namespace pacesim

#endif  // PACESIM_PACING_H_
