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

// Dense primal simplex for packing-type programs
//
//   maximize c'x  subject to  A x <= b,  x >= 0,  b >= 0.
//
// With b >= 0 the origin is feasible, so a single phase suffices. Entering
// columns follow Dantzig's rule and switch to Bland's rule after a run of
// degenerate pivots, which rules out cycling.

#ifndef PACESIM_LP_H_
#define PACESIM_LP_H_

#include <cstddef>
#include <span>
#include <vector>

namespace pacesim {

class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_rows() const { return rhs_.size(); }

  void SetObjective(std::size_t var, double coeff);
  // Sparse row: sum_i coeffs[i] * x[vars[i]] <= rhs. Requires rhs >= 0.
  void AddRow(std::span<const std::size_t> vars,
              std::span<const double> coeffs, double rhs);

  const std::vector<double>& objective() const { return objective_; }
  const std::vector<std::vector<std::size_t>>& row_vars() const {
    return row_vars_;
  }
  const std::vector<std::vector<double>>& row_coeffs() const {
    return row_coeffs_;
  }
  const std::vector<double>& rhs() const { return rhs_; }

 private:
  std::size_t num_vars_;
  std::vector<double> objective_;
  std::vector<std::vector<std::size_t>> row_vars_;
  std::vector<std::vector<double>> row_coeffs_;
  std::vector<double> rhs_;
};

struct LpSolution {
  enum class Status { kOptimal, kUnbounded };
  Status status = Status::kOptimal;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

// Throws CapacityError when the dense tableau would exceed its cell budget.
LpSolution SolveLp(const LinearProgram& lp);

}  // namespace pacesim

#endif  // PACESIM_LP_H_
