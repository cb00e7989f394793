// Copyright 2026 The afba Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace afba {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed numeric input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A parameter is outside its admissible range (nonpositive step, p > 1, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An API was called in a context it does not support.
class InvalidUsage : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Random graph sampling exhausted its retry budget without a connected sample.
class GenerationFailure : public Error {
 public:
  GenerationFailure(std::size_t n, double p, std::uint64_t seed);
  std::size_t nodes;
  double probability;
  std::uint64_t seed;
};

/// Power iteration did not settle within its iteration budget.
class EstimationFailure : public Error {
 public:
  EstimationFailure(double last_estimate, int iterations);
  double last_estimate;
  int iterations;
};

/// An iterative solver hit its iteration cap.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(double final_residual, int iterations);
  double final_residual;
  int iterations;
};

/// A distributed iterate became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t agent, std::int64_t round);
  std::size_t agent;
  std::int64_t round;
};

/// The bulk-synchronous message protocol was not respected.
class ProtocolViolation : public Error {
 public:
  ProtocolViolation(const std::string& what, std::vector<std::size_t> nodes);
  std::vector<std::size_t> nodes;
};

}  // namespace afba
