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

// Single-round core auctions over a divisible good: first-price,
// second-price (single slot) and GSP (separable click rates), plus
// predicates for individual rationality, the core condition and monotone
// bang-per-buck.
//
// Ties between equal bids go to the lowest agent index. An agent bidding
// zero is never allocated. Fractional allocations are deterministic
// fractions of the good.

#ifndef PACESIM_AUCTION_H_
#define PACESIM_AUCTION_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pacesim {

// Feasible allocation profiles. A single slot admits sum_k x_k <= 1. A
// polymatroid with click rates 1 >= a_1 >= ... >= a_m >= 0 admits every
// profile whose l largest entries sum to at most a_1 + ... + a_l, for every
// l (rates beyond m are zero). One slot with rate 1 is the single-slot set.
class FeasibleSet {
 public:
  static FeasibleSet SingleSlot();
  static FeasibleSet Polymatroid(std::vector<double> click_rates);

  bool is_single_slot() const { return click_rates_.empty(); }

  // Empty for a single slot.
  const std::vector<double>& click_rates() const { return click_rates_; }

  // Capacity of the l-th best slot (1-based); zero beyond the last slot.
  double SlotRate(std::size_t rank) const;

  bool Contains(std::span<const double> x, double tol = 1e-9) const;

 private:
  FeasibleSet() = default;
  std::vector<double> click_rates_;
};

enum class AuctionFormat { kFirstPrice, kSecondPrice, kGsp };

std::string_view FormatName(AuctionFormat format);
AuctionFormat ParseFormat(std::string_view name);

class Mechanism {
 public:
  // Throws ConfigError when the format does not support the feasible set:
  // second-price needs a single slot, GSP needs a polymatroid.
  Mechanism(AuctionFormat format, FeasibleSet feasible,
            std::size_t num_agents);

  AuctionFormat format() const { return format_; }
  const FeasibleSet& feasible() const { return feasible_; }
  std::size_t num_agents() const { return num_agents_; }

 private:
  AuctionFormat format_;
  FeasibleSet feasible_;
  std::size_t num_agents_;
};

struct AuctionOutcome {
  std::vector<double> allocations;
  std::vector<double> payments;
};

// Runs one auction. Throws ConfigError on a dimension mismatch and
// PreconditionError on a negative bid.
AuctionOutcome Allocate(const Mechanism& mechanism,
                        std::span<const double> bids);

// Allocation-free variant for hot loops; `order` is scratch space.
void AllocateInto(const Mechanism& mechanism, std::span<const double> bids,
                  AuctionOutcome& out, std::vector<std::size_t>& order);

// sum_{k not in S} p_k + sum_{k in S} b_k x_k >= sum_{k in S} b_k y_k.
// `coalition` holds agent indices. Throws PreconditionError when the
// deviation is infeasible.
bool CheckCore(const Mechanism& mechanism, std::span<const double> bids,
               std::span<const std::size_t> coalition,
               std::span<const double> deviation);

// Best deviation for a coalition: its declared-welfare-maximizing allocation
// when every other agent is dropped.
std::vector<double> BestCoalitionDeviation(
    const Mechanism& mechanism, std::span<const double> bids,
    std::span<const std::size_t> coalition);

// p_k(hi) - p_k(lo) >= lo * (x_k(hi) - x_k(lo)). `others` is a full bid
// profile; entry `agent` is overwritten.
bool CheckMbb(const Mechanism& mechanism, std::size_t agent, double bid_low,
              double bid_high, std::span<const double> others);

// p_k <= b_k x_k for all k.
bool CheckIr(const AuctionOutcome& outcome, std::span<const double> bids);

}  // namespace pacesim

#endif  // PACESIM_AUCTION_H_
