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

// All tolerances and implementation constants in one table. The analytic
// bounds checked by this library hide their constants inside O(.); the
// values below are the fixed, auditable choices used in their place.

#ifndef PACESIM_CONSTANTS_H_
#define PACESIM_CONSTANTS_H_

#include <cstddef>

namespace pacesim {

// Tolerance for every sure (deterministic) inequality.
inline constexpr double kTolerance = 1e-9;

// Probabilities of a value model must sum to one within this.
inline constexpr double kProbabilityTolerance = 1e-12;

// An agent stops once its remaining budget falls below this fraction of B.
inline constexpr double kStopBudgetFraction = 1e-12;

// Constant in front of n * vbar * sqrt(T log(vbar n T)) in the welfare bound.
inline constexpr double kWelfareBoundConstant = 3.0;

// Constant on the right-hand side of the dynamic-regret bound.
inline constexpr double kRegretBoundConstant = 10.0;

// Constant in front of D^2 P / eps + eps G^2 T for projected SGD.
inline constexpr double kSgdBoundConstant = 4.0;

// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

// Slack, in standard errors, for Monte Carlo comparisons with a bound.
inline constexpr double kMonteCarloSigmas = 3.0;

inline constexpr std::size_t kMinWelfareReplications = 200;

// Perfect-multiplier bisection.
inline constexpr double kBisectionTolerance = 1e-9;
inline constexpr int kBisectionMaxIterations = 200;

// Absolute error target for the artificial objective's integral.
inline constexpr double kQuadratureTolerance = 1e-8;

// Default smoothing width as a fraction of the value cap.
inline constexpr double kDefaultSmoothingFraction = 0.05;

// Exact ex-ante solver capacity.
inline constexpr std::size_t kMaxLpVariables = 10000;
inline constexpr std::size_t kMaxPolymatroidAgents = 11;
inline constexpr std::size_t kMaxTableauCells = std::size_t{1} << 24;

// Sequence-rule collapse enumerates at most this many value sequences.
inline constexpr std::size_t kMaxEnumeratedSequences = 1u << 20;

// Exhaustive subset enumeration limit for the GSP core check.
inline constexpr std::size_t kMaxGspCoreAgents = 8;

}  // namespace pacesim

#endif  // PACESIM_CONSTANTS_H_
