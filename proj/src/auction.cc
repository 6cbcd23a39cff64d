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

#include "pacesim/auction.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "pacesim/constants.h"
#include "pacesim/errors.h"

namespace pacesim {

FeasibleSet FeasibleSet::SingleSlot() { return FeasibleSet(); }

FeasibleSet FeasibleSet::Polymatroid(std::vector<double> click_rates) {
  if (click_rates.empty()) {
    throw ConfigError("polymatroid needs at least one click rate");
  }
  for (std::size_t i = 0; i < click_rates.size(); ++i) {
    const double a = click_rates[i];
    if (!(a >= 0.0 && a <= 1.0)) {
      throw ConfigError("click rates must lie in [0, 1]");
    }
    if (i > 0 && a > click_rates[i - 1]) {
      throw ConfigError("click rates must be non-increasing");
    }
  }
  FeasibleSet set;
  set.click_rates_ = std::move(click_rates);
  return set;
}

double FeasibleSet::SlotRate(std::size_t rank) const {
  if (is_single_slot()) return rank == 1 ? 1.0 : 0.0;
  if (rank == 0 || rank > click_rates_.size()) return 0.0;
  return click_rates_[rank - 1];
}

bool FeasibleSet::Contains(std::span<const double> x, double tol) const {
  for (double v : x) {
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double load = 0.0;
  double capacity = 0.0;
  for (std::size_t l = 1; l <= sorted.size(); ++l) {
    load += sorted[l - 1];
    capacity += SlotRate(l);
    if (load > capacity + tol) return false;
  }
  return true;
}

std::string_view FormatName(AuctionFormat format) {
  switch (format) {
    case AuctionFormat::kFirstPrice:
      return "first_price";
    case AuctionFormat::kSecondPrice:
      return "second_price";
    case AuctionFormat::kGsp:
      return "gsp";
  }
  return "unknown";
}

AuctionFormat ParseFormat(std::string_view name) {
  if (name == "first_price") return AuctionFormat::kFirstPrice;
  if (name == "second_price") return AuctionFormat::kSecondPrice;
  if (name == "gsp") return AuctionFormat::kGsp;
  throw ConfigError("unknown mechanism type '" + std::string(name) + "'");
}

Mechanism::Mechanism(AuctionFormat format, FeasibleSet feasible,
                     std::size_t num_agents)
    : format_(format), feasible_(std::move(feasible)), num_agents_(num_agents) {
  if (num_agents_ == 0) throw ConfigError("mechanism needs at least one agent");
  if (format_ == AuctionFormat::kSecondPrice && !feasible_.is_single_slot()) {
    throw ConfigError("second-price auction requires a single slot");
  }
  if (format_ == AuctionFormat::kGsp && feasible_.is_single_slot()) {
    throw ConfigError("GSP requires click rates");
  }
}

namespace {

void CheckBids(const Mechanism& mechanism, std::span<const double> bids) {
  if (bids.size() != mechanism.num_agents()) {
    throw ConfigError("bid profile has " + std::to_string(bids.size()) +
                      " entries, mechanism has " +
                      std::to_string(mechanism.num_agents()) + " agents");
  }
  for (double b : bids) {
    if (!(b >= 0.0) || std::isinf(b)) {
      throw PreconditionError("bids must be finite and non-negative");
    }
  }
}

void SingleSlotAuction(AuctionFormat format, std::span<const double> bids,
                       AuctionOutcome& out) {
  std::size_t winner = 0;
  for (std::size_t k = 1; k < bids.size(); ++k) {
    if (bids[k] > bids[winner]) winner = k;
  }
  if (bids[winner] <= 0.0) return;
  out.allocations[winner] = 1.0;
  if (format == AuctionFormat::kFirstPrice) {
    out.payments[winner] = bids[winner];
    return;
  }
  double second = 0.0;
  for (std::size_t k = 0; k < bids.size(); ++k) {
    if (k != winner) second = std::max(second, bids[k]);
  }
  out.payments[winner] = second;
}

}  // namespace

void AllocateInto(const Mechanism& mechanism, std::span<const double> bids,
                  AuctionOutcome& out, std::vector<std::size_t>& order) {
  CheckBids(mechanism, bids);
  const std::size_t n = bids.size();
  out.allocations.assign(n, 0.0);
  out.payments.assign(n, 0.0);

  const FeasibleSet& feasible = mechanism.feasible();
  if (feasible.is_single_slot()) {
    SingleSlotAuction(mechanism.format(), bids, out);
    return;
  }

  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return bids[a] > bids[b];
                   });
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = order[r];
    if (bids[k] <= 0.0) break;
    const double x = feasible.SlotRate(r + 1);
    out.allocations[k] = x;
    if (mechanism.format() == AuctionFormat::kFirstPrice) {
      out.payments[k] = bids[k] * x;
    } else {
      const double next = r + 1 < n ? bids[order[r + 1]] : 0.0;
      out.payments[k] = x * next;
    }
  }
}

AuctionOutcome Allocate(const Mechanism& mechanism,
                        std::span<const double> bids) {
  AuctionOutcome out;
  std::vector<std::size_t> order;
  AllocateInto(mechanism, bids, out, order);
  return out;
}

namespace {

double Slack(double rhs) { return kTolerance * std::max(1.0, std::abs(rhs)); }

std::vector<bool> Membership(std::size_t n,
                             std::span<const std::size_t> coalition) {
  std::vector<bool> in(n, false);
  for (std::size_t k : coalition) {
    if (k >= n) throw PreconditionError("coalition member out of range");
    in[k] = true;
  }
  return in;
}

}  // namespace

bool CheckCore(const Mechanism& mechanism, std::span<const double> bids,
               std::span<const std::size_t> coalition,
               std::span<const double> deviation) {
  const std::size_t n = mechanism.num_agents();
  if (deviation.size() != n) {
    throw PreconditionError("deviation has the wrong dimension");
  }
  if (!mechanism.feasible().Contains(deviation)) {
    throw PreconditionError("deviation is not a feasible allocation");
  }
  const AuctionOutcome outcome = Allocate(mechanism, bids);
  const std::vector<bool> in = Membership(n, coalition);
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (in[k]) {
      lhs += bids[k] * outcome.allocations[k];
      rhs += bids[k] * deviation[k];
    } else {
      lhs += outcome.payments[k];
    }
  }
  return lhs >= rhs - Slack(rhs);
}

std::vector<double> BestCoalitionDeviation(
    const Mechanism& mechanism, std::span<const double> bids,
    std::span<const std::size_t> coalition) {
  const std::vector<bool> in = Membership(mechanism.num_agents(), coalition);
  std::vector<double> restricted(bids.begin(), bids.end());
  for (std::size_t k = 0; k < restricted.size(); ++k) {
    if (!in[k]) restricted[k] = 0.0;
  }
  return Allocate(mechanism, restricted).allocations;
}

bool CheckMbb(const Mechanism& mechanism, std::size_t agent, double bid_low,
              double bid_high, std::span<const double> others) {
  if (!(bid_low >= 0.0 && bid_low <= bid_high)) {
    throw PreconditionError("MBB check needs 0 <= b_low <= b_high");
  }
  if (agent >= others.size()) throw PreconditionError("agent out of range");
  std::vector<double> bids(others.begin(), others.end());
  bids[agent] = bid_low;
  const AuctionOutcome low = Allocate(mechanism, bids);
  bids[agent] = bid_high;
  const AuctionOutcome high = Allocate(mechanism, bids);
  const double dp = high.payments[agent] - low.payments[agent];
  const double rhs =
      bid_low * (high.allocations[agent] - low.allocations[agent]);
  return dp >= rhs - Slack(rhs);
}

bool CheckIr(const AuctionOutcome& outcome, std::span<const double> bids) {
  if (outcome.payments.size() != bids.size() ||
      outcome.allocations.size() != bids.size()) {
    throw PreconditionError("outcome and bids differ in dimension");
  }
  for (std::size_t k = 0; k < bids.size(); ++k) {
    const double cap = bids[k] * outcome.allocations[k];
    if (outcome.payments[k] > cap + Slack(cap)) return false;
  }
  return true;
}

}  // namespace pacesim
