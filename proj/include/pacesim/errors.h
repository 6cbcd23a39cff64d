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

#ifndef PACESIM_ERRORS_H_
#define PACESIM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pacesim {

// Base of every error the library throws. The CLI maps each subclass to a
// stable exit code (see tools/pacesim.cc).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration (dimension mismatch, bad budget).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A pacing agent was asked to bid after it stopped.
class StoppedAgentError : public Error {
 public:
  using Error::Error;
};

// Internal consistency failure, e.g. an auction charged more than the
// remaining budget.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// The hypotheses of the stopping-time bound do not hold.
class BoundInapplicableError : public Error {
 public:
  using Error::Error;
};

// Instance too large for the exact ex-ante solver.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Not enough Monte Carlo replications for the requested confidence.
class StatisticsError : public Error {
 public:
  using Error::Error;
};

// A value profile is not in the support of an allocation rule.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Root finding on a discontinuous expected-spend curve.
class RequiresSmoothingError : public Error {
 public:
  using Error::Error;
};

// The per-round environment of the learning agent cannot be reconstructed
// (adaptive opponents).
class EnvironmentError : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pacesim

#endif  // PACESIM_ERRORS_H_
