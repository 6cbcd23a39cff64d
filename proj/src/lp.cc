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

#include "pacesim/lp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pacesim/constants.h"
#include "pacesim/errors.h"

namespace pacesim {

LinearProgram::LinearProgram(std::size_t num_vars)
    : num_vars_(num_vars), objective_(num_vars, 0.0) {}

void LinearProgram::SetObjective(std::size_t var, double coeff) {
  objective_.at(var) = coeff;
}

void LinearProgram::AddRow(std::span<const std::size_t> vars,
                           std::span<const double> coeffs, double rhs) {
  if (vars.size() != coeffs.size()) {
    throw PreconditionError("row has mismatched variable and coefficient lists");
  }
  if (!(rhs >= 0.0)) throw PreconditionError("row right-hand side must be >= 0");
  for (std::size_t v : vars) {
    if (v >= num_vars_) throw PreconditionError("row references unknown variable");
  }
  row_vars_.emplace_back(vars.begin(), vars.end());
  row_coeffs_.emplace_back(coeffs.begin(), coeffs.end());
  rhs_.push_back(rhs);
}

namespace {

constexpr double kPivotEps = 1e-11;
constexpr std::size_t kDegenerateRunBeforeBland = 50;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_((rows + 1) * cols, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
  double* row(std::size_t r) { return cells_.data() + r * cols_; }

  void Pivot(std::size_t pr, std::size_t pc) {
    double* p = row(pr);
    const double inv = 1.0 / p[pc];
    for (std::size_t c = 0; c < cols_; ++c) p[c] *= inv;
    p[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* q = row(r);
      const double f = q[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c) q[c] -= f * p[c];
      q[pc] = 0.0;
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
};

}  // namespace

LpSolution SolveLp(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  const std::size_t cols = n + m + 1;
  if ((m + 1) > kMaxTableauCells / cols) {
    throw CapacityError("linear program with " + std::to_string(n) +
                        " variables and " + std::to_string(m) +
                        " rows exceeds the dense solver capacity");
  }
  Tableau t(m, cols);
  const std::size_t rhs = cols - 1;
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& vars = lp.row_vars()[r];
    const auto& coeffs = lp.row_coeffs()[r];
    for (std::size_t i = 0; i < vars.size(); ++i) t.at(r, vars[i]) += coeffs[i];
    t.at(r, n + r) = 1.0;
    t.at(r, rhs) = lp.rhs()[r];
    basis[r] = n + r;
  }
  for (std::size_t j = 0; j < n; ++j) t.at(m, j) = -lp.objective()[j];

  LpSolution sol;
  std::size_t degenerate_run = 0;
  const std::size_t max_pivots = 50 * (n + m) + 1000;
  while (true) {
    const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
    std::size_t enter = cols;
    double best = -kPivotEps;
    for (std::size_t j = 0; j < rhs; ++j) {
      const double d = t.at(m, j);
      if (d < best) {
        enter = j;
        if (bland) break;
        best = d;
      }
    }
    if (enter == cols) break;

    std::size_t leave = m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double a = t.at(r, enter);
      if (a <= kPivotEps) continue;
      const double q = t.at(r, rhs) / a;
      if (q < ratio || (q == ratio && leave < m && basis[r] < basis[leave])) {
        ratio = q;
        leave = r;
      }
    }
    if (leave == m) {
      sol.status = LpSolution::Status::kUnbounded;
      return sol;
    }
    degenerate_run = ratio <= kPivotEps ? degenerate_run + 1 : 0;
    t.Pivot(leave, enter);
    basis[leave] = enter;
    if (++sol.pivots > max_pivots) {
      throw InvariantViolation("simplex exceeded its pivot budget");
    }
  }

  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) sol.x[basis[r]] = std::max(0.0, t.at(r, rhs));
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective()[j] * sol.x[j];
  return sol;
}

}  // namespace pacesim
