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

// Index-parallel fan-out. Every kernel in the library that loops over
// independent work items (replications, Monte Carlo trials, rounds of a
// known environment) goes through ParallelMap, and has a serial reference
// path selected by Execution::kSerial. Results are written by index, so the
// output never depends on the worker count.

#ifndef PACESIM_PARALLEL_H_
#define PACESIM_PARALLEL_H_

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

namespace pacesim {

enum class Execution { kSerial, kParallel };

// Worker cap: PACESIM_THREADS if set and positive, else the OpenMP default.
int MaxWorkers();

// Applies PACESIM_THREADS to the OpenMP runtime. Called once by the CLI.
void ConfigureWorkersFromEnvironment();

template <typename Fn>
auto ParallelMap(std::size_t count, Fn&& fn,
                 Execution exec = Execution::kParallel)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> out(count);
  if (exec == Execution::kSerial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mu;
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic) num_threads(MaxWorkers())
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// Pairwise summation; the result depends only on the order of `values`.
double PairwiseSum(std::span<const double> values);

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_mean = 0.0;
};

SampleStats Summarize(std::span<const double> values);

}  // namespace pacesim

#endif  // PACESIM_PARALLEL_H_
