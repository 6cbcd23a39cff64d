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

// Grid brute force for the ex-ante optimum with at most two agents. Agent
// 1's share in every scenario walks a grid; agent 2 then takes the largest
// share the feasible set leaves, which never lowers the objective.

#ifndef PACESIM_TESTS_WELFARE_ORACLE_H_
#define PACESIM_TESTS_WELFARE_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pacesim/auction.h"
#include "pacesim/market.h"

namespace pacesim::test {

inline double GridExAnteOptimum(const ValueModel& model,
                                const FeasibleSet& feasible,
                                std::span<const double> budgets,
                                std::int64_t T, double step) {
  const std::size_t n = model.num_agents();
  const std::size_t S = model.size();
  if (n > 2) throw std::invalid_argument("grid oracle handles n <= 2");
  const double a1 = feasible.SlotRate(1);
  const double a12 = a1 + feasible.SlotRate(2);
  const int steps = static_cast<int>(std::lround(a1 / step));
  auto second_share = [&](double y1) {
    return n == 2 ? std::min(a1, a12 - y1) : 0.0;
  };
  std::vector<int> idx(S, 0);
  double best = 0.0;
  const double horizon = static_cast<double>(T);
  while (true) {
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const double y1 = std::min(a1, idx[s] * step);
      const auto& p = model.point(s);
      e1 += p.prob * y1 * p.values[0];
      if (n == 2) e2 += p.prob * second_share(y1) * p.values[1];
    }
    double w = std::min(budgets[0], horizon * e1);
    if (n == 2) w += std::min(budgets[1], horizon * e2);
    best = std::max(best, w);
    std::size_t s = 0;
    while (s < S && idx[s] == steps) idx[s++] = 0;
    if (s == S) break;
    ++idx[s];
  }
  return best;
}

}  // namespace pacesim::test

#endif  // PACESIM_TESTS_WELFARE_ORACLE_H_
