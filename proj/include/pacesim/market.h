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

// Repeated-auction market: value profiles drawn i.i.d. across rounds from a
// finite-support distribution, every agent bidding through the Bidder
// interface, full per-round trace recorded.

#ifndef PACESIM_MARKET_H_
#define PACESIM_MARKET_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacesim/auction.h"
#include "pacesim/pacing.h"
#include "pacesim/parallel.h"

namespace pacesim {

struct ValuePoint {
  double prob = 0.0;
  std::vector<double> values;
  std::string label;  // optional impression type
};

// Categorical distribution over value profiles. Probabilities must sum to
// one within 1e-12 and values must be non-negative and finite.
class ValueModel {
 public:
  explicit ValueModel(std::vector<ValuePoint> support);

  std::size_t num_agents() const { return num_agents_; }
  std::size_t size() const { return support_.size(); }
  const ValuePoint& point(std::size_t i) const { return support_[i]; }
  const std::vector<ValuePoint>& support() const { return support_; }

  // max(1, largest value in the support).
  double value_cap() const { return value_cap_; }

  // Support index for a uniform draw u in [0, 1).
  std::size_t Sample(double u) const;

  // First support point with exactly this profile.
  std::optional<std::size_t> Find(std::span<const double> profile) const;

  // E[v_k].
  double MeanValue(std::size_t agent) const;

 private:
  std::vector<ValuePoint> support_;
  std::vector<double> cumulative_;
  std::size_t num_agents_ = 0;
  double value_cap_ = 1.0;
};

struct ParticipantSpec {
  enum class Kind { kPacing, kScripted };

  static ParticipantSpec Pacing(const AgentConfig& config);
  static ParticipantSpec Scripted(
      Script script, double budget = std::numeric_limits<double>::infinity());

  Kind kind = Kind::kPacing;
  AgentConfig pacing;
  Script script;
  double scripted_budget = std::numeric_limits<double>::infinity();

  bool is_pacing() const { return kind == Kind::kPacing; }
  double budget() const { return is_pacing() ? pacing.budget : scripted_budget; }
  std::unique_ptr<Bidder> MakeBidder() const;
};

struct SimulationConfig {
  Mechanism mechanism;
  std::vector<ParticipantSpec> agents;
  ValueModel value_model;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;

  // Throws ConfigError on dimension mismatches or a pacing agent whose
  // horizon differs from the simulation horizon.
  void Validate() const;
  std::vector<double> budgets() const;
};

enum class MultiplierStatus : std::uint8_t { kActive, kStopped, kNone };

// Row-major per-round record; entry (t, k) lives at t * num_agents + k with
// t zero-based. Round numbers in the public API are one-based.
struct Trace {
  Trace() = default;
  Trace(std::size_t rounds, std::size_t agents);

  std::size_t num_rounds = 0;
  std::size_t num_agents = 0;
  std::vector<double> budgets;  // initial budget per agent

  std::vector<double> values;
  std::vector<double> multipliers;  // NaN unless status is kActive
  std::vector<MultiplierStatus> status;
  std::vector<double> bids;
  std::vector<double> allocations;
  std::vector<double> payments;
  std::vector<double> remaining;  // budget at the start of the round

  std::size_t at(std::size_t t, std::size_t k) const {
    return t * num_agents + k;
  }
  bool operator==(const Trace& other) const;
};

// Deterministic in (config, replication). Stopped agents bid zero.
Trace RunSimulation(const SimulationConfig& config,
                    std::uint64_t replication = 0);

// Runs `replications` independent copies and reduces each trace with
// `summarize` as soon as it is produced. Output order is by replication.
template <typename Summarize>
auto RunReplications(const SimulationConfig& config, std::size_t replications,
                     Summarize&& summarize,
                     Execution exec = Execution::kParallel) {
  config.Validate();
  return ParallelMap(
      replications,
      [&](std::size_t r) { return summarize(RunSimulation(config, r), r); },
      exec);
}

// First round (one-based) in which the agent is stopped; T + 1 if never.
std::size_t StoppingRound(const Trace& trace, std::size_t agent);

struct Epoch {
  std::size_t start = 0;  // one-based, inclusive
  std::size_t end = 0;    // exclusive
  std::size_t agent = 0;
};

// Partition of [1, tau) into maximal intervals that open at a zero
// multiplier and stay strictly positive afterwards.
std::vector<Epoch> ExtractEpochs(const Trace& trace, std::size_t agent);

struct EpochCheck {
  Epoch epoch;
  bool checked = false;  // false: epoch ends at the stop time
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = true;
};

struct EpochLemmaReport {
  std::vector<EpochCheck> epochs;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
  double min_slack = std::numeric_limits<double>::infinity();
};

// For every epoch [t1, t2) with the agent still bidding at t2:
//   sum_{t1 <= t < t2} x_t v_t >= x_{t1} v_{t1} - z_{t1} + rho (t2 - t1 - 1).
EpochLemmaReport VerifyEpochLemma(const Trace& trace, std::size_t agent,
                                  double rho);
EpochLemmaReport VerifyEpochLemma(const Trace& trace, std::size_t agent);

// Recorded-trace checks that define a generalized pacing agent: no
// overbidding, no unnecessary pacing (mu = 0 means bid = min{v, B_t}) and
// a bit-exact replay of the multiplier recurrence.
struct ConformanceReport {
  std::size_t rounds_checked = 0;
  std::size_t overbids = 0;
  std::size_t unnecessary_pacing = 0;
  std::size_t recurrence_mismatches = 0;
  bool ok() const {
    return overbids == 0 && unnecessary_pacing == 0 &&
           recurrence_mismatches == 0;
  }
};

ConformanceReport CheckPacingConformance(const Trace& trace, std::size_t agent,
                                         const AgentConfig& config);

struct StoppingBoundCheck {
  bool applies = false;
  std::size_t stopping_round = 0;
  std::int64_t bound = 0;
  std::int64_t shortfall = 0;  // T - tau
  bool pass = true;
};

StoppingBoundCheck CheckStoppingBound(const Trace& trace, std::size_t agent,
                                      const AgentConfig& config);

// CSV with columns round,agent,value,multiplier,bid,allocation,payment,
// remaining_budget. Numbers use 17 significant digits; the multiplier
// column holds "stopped" for a stopped agent and is empty for agents that do
// not pace.
void WriteTraceCsv(std::ostream& out, const Trace& trace);
Trace ReadTraceCsv(std::istream& in);

}  // namespace pacesim

#endif  // PACESIM_MARKET_H_
