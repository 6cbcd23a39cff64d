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

#include "pacesim/parallel.h"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace pacesim {

namespace {

int EnvironmentCap() {
  const char* raw = std::getenv("PACESIM_THREADS");
  if (raw == nullptr) return 0;
  try {
    const int n = std::stoi(raw);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

int MaxWorkers() {
  const int cap = EnvironmentCap();
  return cap > 0 ? cap : omp_get_max_threads();
}

void ConfigureWorkersFromEnvironment() {
  const int cap = EnvironmentCap();
  if (cap > 0) omp_set_num_threads(cap);
}

double PairwiseSum(std::span<const double> values) {
  constexpr std::size_t kBlock = 32;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return PairwiseSum(values.first(half)) + PairwiseSum(values.subspan(half));
}

SampleStats Summarize(std::span<const double> values) {
  SampleStats s;
  s.count = values.size();
  if (s.count == 0) return s;
  s.mean = PairwiseSum(values) / static_cast<double>(s.count);
  if (s.count < 2) return s;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - s.mean;
    sq[i] = d * d;
  }
  const double var = PairwiseSum(sq) / static_cast<double>(s.count - 1);
  s.stddev = std::sqrt(var);
  s.stderr_mean = s.stddev / std::sqrt(static_cast<double>(s.count));
  return s;
}

}  // namespace pacesim
