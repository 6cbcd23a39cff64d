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

// Counter-based random streams. A stream is identified by a key derived from
// (seed, replication, substream) and produces the SplitMix64 finalizer of
// key + counter * golden_gamma. Any draw can be reproduced from its
// coordinates alone, so replications and rounds may run in any order or on
// any thread and still see the same numbers.

#ifndef PACESIM_RNG_H_
#define PACESIM_RNG_H_

#include <cstdint>
#include <limits>

namespace pacesim {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t DeriveKey(std::uint64_t parent, std::uint64_t child) {
  return Mix64(parent + kGoldenGamma * (child + 1));
}

class RandomStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit RandomStream(std::uint64_t key) : key_(key) {}

  // Substream for (seed, replication, index). Index is typically a round.
  static constexpr RandomStream For(std::uint64_t seed,
                                    std::uint64_t replication,
                                    std::uint64_t index) {
    return RandomStream(DeriveKey(DeriveKey(Mix64(seed), replication), index));
  }

  constexpr RandomStream Split(std::uint64_t child) const {
    return RandomStream(DeriveKey(key_, child));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() {
    ++counter_;
    return Mix64(key_ + kGoldenGamma * counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pacesim

#endif  // PACESIM_RNG_H_
