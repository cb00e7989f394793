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

#include "afba/error.hpp"

#include <sstream>
#include <utility>

namespace afba {

namespace {

std::string generation_message(std::size_t n, double p, std::uint64_t seed) {
  std::ostringstream os;
  os << "no connected Erdos-Renyi sample for (n=" << n << ", p=" << p
     << ", seed=" << seed << ") within the retry limit";
  return os.str();
}

std::string join_nodes(const std::string& what,
                       const std::vector<std::size_t>& nodes) {
  std::ostringstream os;
  os << what;
  if (!nodes.empty()) {
    os << " [nodes:";
    for (std::size_t v : nodes) os << ' ' << v;
    os << ']';
  }
  return os.str();
}

}  // namespace

GenerationFailure::GenerationFailure(std::size_t n, double p,
                                     std::uint64_t seed)
    : Error(generation_message(n, p, seed)),
      nodes(n),
      probability(p),
      seed(seed) {}

EstimationFailure::EstimationFailure(double last_estimate, int iterations)
    : Error("power iteration did not converge after " +
            std::to_string(iterations) + " iterations (last estimate " +
            std::to_string(last_estimate) + ")"),
      last_estimate(last_estimate),
      iterations(iterations) {}

ConvergenceFailure::ConvergenceFailure(double final_residual, int iterations)
    : Error("solver did not converge after " + std::to_string(iterations) +
            " iterations (residual " + std::to_string(final_residual) + ")"),
      final_residual(final_residual),
      iterations(iterations) {}

DivergenceError::DivergenceError(std::size_t agent, std::int64_t round)
    : Error("non-finite iterate at agent " + std::to_string(agent) +
            " in round " + std::to_string(round)),
      agent(agent),
      round(round) {}

ProtocolViolation::ProtocolViolation(const std::string& what,
                                     std::vector<std::size_t> nodes)
    : Error(join_nodes(what, nodes)), nodes(std::move(nodes)) {}

}  // namespace afba
