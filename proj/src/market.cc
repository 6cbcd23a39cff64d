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

#include "pacesim/market.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "pacesim/constants.h"
#include "pacesim/errors.h"
#include "pacesim/rng.h"

namespace pacesim {

ValueModel::ValueModel(std::vector<ValuePoint> support)
    : support_(std::move(support)) {
  if (support_.empty()) throw ConfigError("value model support is empty");
  num_agents_ = support_.front().values.size();
  if (num_agents_ == 0) throw ConfigError("value profiles are empty");
  double total = 0.0;
  cumulative_.reserve(support_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const ValuePoint& p = support_[i];
    if (!(p.prob >= 0.0 && p.prob <= 1.0)) {
      throw ConfigError("support point " + std::to_string(i) +
                        " has probability outside [0, 1]");
    }
    if (p.values.size() != num_agents_) {
      throw ConfigError("support point " + std::to_string(i) +
                        " has a profile of the wrong length");
    }
    for (double v : p.values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError("support point " + std::to_string(i) +
                          " has a negative or non-finite value");
      }
      value_cap_ = std::max(value_cap_, v);
    }
    total += p.prob;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw ConfigError("probabilities sum to " + std::to_string(total) +
                      ", expected 1");
  }
}

std::size_t ValueModel::Sample(double u) const {
  const double target = u * cumulative_.back();
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(i, support_.size() - 1);
}

std::optional<std::size_t> ValueModel::Find(
    std::span<const double> profile) const {
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const auto& v = support_[i].values;
    if (v.size() == profile.size() &&
        std::equal(v.begin(), v.end(), profile.begin())) {
      return i;
    }
  }
  return std::nullopt;
}

double ValueModel::MeanValue(std::size_t agent) const {
  double m = 0.0;
  for (const ValuePoint& p : support_) m += p.prob * p.values.at(agent);
  return m;
}

ParticipantSpec ParticipantSpec::Pacing(const AgentConfig& config) {
  ParticipantSpec s;
  s.kind = Kind::kPacing;
  s.pacing = config;
  return s;
}

ParticipantSpec ParticipantSpec::Scripted(Script script, double budget) {
  ParticipantSpec s;
  s.kind = Kind::kScripted;
  s.script = script;
  s.scripted_budget = budget;
  return s;
}

std::unique_ptr<Bidder> ParticipantSpec::MakeBidder() const {
  if (is_pacing()) return std::make_unique<GradientPacer>(pacing);
  return std::make_unique<ScriptedBidder>(script, scripted_budget);
}

void SimulationConfig::Validate() const {
  const std::size_t n = agents.size();
  if (n != mechanism.num_agents()) {
    throw ConfigError("mechanism expects " +
                      std::to_string(mechanism.num_agents()) +
                      " agents, config lists " + std::to_string(n));
  }
  if (n != value_model.num_agents()) {
    throw ConfigError("value profiles have " +
                      std::to_string(value_model.num_agents()) +
                      " entries, config lists " + std::to_string(n) +
                      " agents");
  }
  if (horizon < 0) throw ConfigError("horizon must be non-negative");
  for (std::size_t k = 0; k < n; ++k) {
    const ParticipantSpec& a = agents[k];
    if (!(a.budget() > 0.0)) {
      throw ConfigError("agent " + std::to_string(k) +
                        " budget must be positive");
    }
    if (a.is_pacing() && horizon > 0) {
      if (a.pacing.horizon != horizon) {
        throw ConfigError("agent " + std::to_string(k) +
                          " horizon differs from the simulation horizon");
      }
      a.pacing.Validate();
    }
  }
}

std::vector<double> SimulationConfig::budgets() const {
  std::vector<double> b;
  b.reserve(agents.size());
  for (const ParticipantSpec& a : agents) b.push_back(a.budget());
  return b;
}

Trace::Trace(std::size_t rounds, std::size_t agents)
    : num_rounds(rounds), num_agents(agents), budgets(agents, 0.0) {
  const std::size_t cells = rounds * agents;
  values.assign(cells, 0.0);
  multipliers.assign(cells, std::nan(""));
  status.assign(cells, MultiplierStatus::kNone);
  bids.assign(cells, 0.0);
  allocations.assign(cells, 0.0);
  payments.assign(cells, 0.0);
  remaining.assign(cells, 0.0);
}

namespace {

bool BitEqual(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) !=
        std::bit_cast<std::uint64_t>(b[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool Trace::operator==(const Trace& o) const {
  return num_rounds == o.num_rounds && num_agents == o.num_agents &&
         BitEqual(budgets, o.budgets) && BitEqual(values, o.values) &&
         BitEqual(multipliers, o.multipliers) && status == o.status &&
         BitEqual(bids, o.bids) && BitEqual(allocations, o.allocations) &&
         BitEqual(payments, o.payments) && BitEqual(remaining, o.remaining);
}

Trace RunSimulation(const SimulationConfig& config,
                    std::uint64_t replication) {
  config.Validate();
  const std::size_t n = config.agents.size();
  const std::size_t rounds = static_cast<std::size_t>(config.horizon);
  Trace trace(rounds, n);
  trace.budgets = config.budgets();
  if (rounds == 0) return trace;

  std::vector<std::unique_ptr<Bidder>> bidders;
  bidders.reserve(n);
  for (const ParticipantSpec& a : config.agents) {
    bidders.push_back(a.MakeBidder());
  }

  std::vector<double> bids(n);
  AuctionOutcome outcome;
  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < rounds; ++t) {
    RandomStream stream = RandomStream::For(config.seed, replication, t + 1);
    const ValuePoint& point =
        config.value_model.point(config.value_model.Sample(stream.Uniform()));
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = trace.at(t, k);
      Bidder& b = *bidders[k];
      trace.values[i] = point.values[k];
      trace.remaining[i] = b.remaining_budget();
      const std::optional<double> mu = b.multiplier();
      if (!mu) {
        trace.status[i] = MultiplierStatus::kNone;
      } else if (b.stopped()) {
        trace.status[i] = MultiplierStatus::kStopped;
      } else {
        trace.status[i] = MultiplierStatus::kActive;
        trace.multipliers[i] = *mu;
      }
      bids[k] = b.Bid(point.values[k]);
      trace.bids[i] = bids[k];
    }
    AllocateInto(config.mechanism, bids, outcome, order);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = trace.at(t, k);
      trace.allocations[i] = outcome.allocations[k];
      trace.payments[i] = outcome.payments[k];
      bidders[k]->Observe(outcome.payments[k]);
    }
  }
  return trace;
}

std::size_t StoppingRound(const Trace& trace, std::size_t agent) {
  if (agent >= trace.num_agents) throw PreconditionError("agent out of range");
  for (std::size_t t = 0; t < trace.num_rounds; ++t) {
    if (trace.status[trace.at(t, agent)] == MultiplierStatus::kStopped) {
      return t + 1;
    }
  }
  return trace.num_rounds + 1;
}

std::vector<Epoch> ExtractEpochs(const Trace& trace, std::size_t agent) {
  const std::size_t tau = StoppingRound(trace, agent);
  std::vector<Epoch> epochs;
  for (std::size_t t = 1; t < tau; ++t) {
    const std::size_t i = trace.at(t - 1, agent);
    if (trace.status[i] != MultiplierStatus::kActive) {
      throw PreconditionError("agent " + std::to_string(agent) +
                              " has no multiplier in round " +
                              std::to_string(t));
    }
    if (trace.multipliers[i] == 0.0) {
      if (!epochs.empty()) epochs.back().end = t;
      epochs.push_back(Epoch{t, tau, agent});
    } else if (epochs.empty()) {
      throw PreconditionError("multiplier sequence does not start at zero");
    }
  }
  return epochs;
}

EpochLemmaReport VerifyEpochLemma(const Trace& trace, std::size_t agent,
                                  double rho) {
  const std::size_t tau = StoppingRound(trace, agent);
  EpochLemmaReport report;
  for (const Epoch& e : ExtractEpochs(trace, agent)) {
    EpochCheck c;
    c.epoch = e;
    if (e.end >= tau) {
      ++report.skipped;
      report.epochs.push_back(c);
      continue;
    }
    c.checked = true;
    for (std::size_t t = e.start; t < e.end; ++t) {
      const std::size_t i = trace.at(t - 1, agent);
      c.lhs += trace.allocations[i] * trace.values[i];
    }
    const std::size_t first = trace.at(e.start - 1, agent);
    c.rhs = trace.allocations[first] * trace.values[first] -
            trace.payments[first] +
            rho * static_cast<double>(e.end - e.start - 1);
    c.slack = c.lhs - c.rhs;
    c.pass = c.slack >= -kTolerance * std::max(1.0, std::abs(c.rhs));
    ++report.checked;
    if (!c.pass) ++report.failures;
    report.min_slack = std::min(report.min_slack, c.slack);
    report.epochs.push_back(c);
  }
  return report;
}

EpochLemmaReport VerifyEpochLemma(const Trace& trace, std::size_t agent) {
  if (trace.num_rounds == 0) return {};
  return VerifyEpochLemma(
      trace, agent,
      trace.budgets.at(agent) / static_cast<double>(trace.num_rounds));
}

ConformanceReport CheckPacingConformance(const Trace& trace, std::size_t agent,
                                         const AgentConfig& config) {
  if (agent >= trace.num_agents) throw PreconditionError("agent out of range");
  ConformanceReport report;
  PacingState state = InitState(config);
  for (std::size_t t = 0; t < trace.num_rounds; ++t) {
    const std::size_t i = trace.at(t, agent);
    const MultiplierStatus status = trace.status[i];
    if (state.stopped) {
      if (status != MultiplierStatus::kStopped || trace.bids[i] != 0.0) {
        ++report.recurrence_mismatches;
      }
      continue;
    }
    ++report.rounds_checked;
    if (status != MultiplierStatus::kActive ||
        trace.multipliers[i] != state.multiplier ||
        trace.remaining[i] != state.remaining_budget) {
      ++report.recurrence_mismatches;
    }
    const double value = trace.values[i];
    const double bid = trace.bids[i];
    if (bid > value) ++report.overbids;
    if (status == MultiplierStatus::kActive && trace.multipliers[i] == 0.0 &&
        bid != std::min(value, trace.remaining[i])) {
      ++report.unnecessary_pacing;
    }
    try {
      state = Update(config, state, trace.payments[i]);
    } catch (const InvariantViolation&) {
      ++report.recurrence_mismatches;
      break;
    }
  }
  return report;
}

StoppingBoundCheck CheckStoppingBound(const Trace& trace, std::size_t agent,
                                      const AgentConfig& config) {
  StoppingBoundCheck c;
  c.stopping_round = StoppingRound(trace, agent);
  c.shortfall = static_cast<std::int64_t>(trace.num_rounds) -
                static_cast<std::int64_t>(c.stopping_round);
  c.applies = config.stopping_bound_applies();
  if (!c.applies) return c;
  c.bound = StoppingTimeBound(config);
  c.pass = c.shortfall <= c.bound;
  return c;
}

}  // namespace pacesim
