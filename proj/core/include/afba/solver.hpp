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

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afba/graph.hpp"
#include "afba/problem.hpp"
#include "afba/simnet.hpp"

namespace afba {

/// theta^2 - 3 theta + 3; positive for every theta, minimal (0.75) at 1.5.
constexpr double theta_factor(double theta) { return theta * theta - 3.0 * theta + 3.0; }

/// Per-agent primal (sigma) and dual (tau) steps, per-edge consensus weights
/// (kappa, indexed like Graph::edges()), and the interpolation parameter theta.
struct StepSizes {
  std::vector<double> sigma;
  std::vector<double> tau;
  std::vector<double> kappa;
  double theta = 1.5;

  double sigma_max() const;
  /// max over tau and kappa together.
  double tau_max() const;
};

StepSizes uniform_stepsizes(std::size_t agents, std::size_t edges, double sigma,
                            double tau, double theta);

struct StepSizeCheck {
  bool ok = false;
  double margin = 0.0;  // 1/sigma_max - tau_max * theta_factor(theta) * op_norm
  std::string reason;
};

/// Convergence condition 1/sigma_max - tau_max (theta^2 - 3 theta + 3) ||L|| > 0,
/// relaxed to >= 0 when theta == 2. Throws InvalidParameter on nonpositive
/// steps, negative theta, or a negative / non-finite norm.
StepSizeCheck validate_stepsizes(const StepSizes& s, double op_norm);

/// sigma_i = alpha / op_norm, tau_i = kappa_ij = 0.99 / (alpha theta_factor).
StepSizes default_stepsizes(double theta, double alpha, double op_norm, const Graph& g);

/// Upper bound ||Lap|| + max_i ||C_i||^2 on ||Lap (x) I_n + C^T C||, each
/// term by power iteration.
double operator_norm_bound(const ConsensusProblem& prob, const Graph& g,
                           const PowerIterationOptions& opts = {});

/// Power iteration on the full N n dimensional operator Lap (x) I_n + C^T C.
double operator_norm_exact(const ConsensusProblem& prob, const Graph& g,
                           const PowerIterationOptions& opts = {});

/// max_i ||C_i||^2 by power iteration on the smaller Gram matrix.
double max_coupling_norm_sq(const ConsensusProblem& prob,
                            const PowerIterationOptions& opts = {});

struct AgentState {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd rho;
  Eigen::VectorXd cached_Cx;  // C x from the previous round
};

/// x = y = rho = 0, cache = C 0.
std::vector<AgentState> zero_states(const ConsensusProblem& prob);

struct LocalStepResult {
  AgentState state;  // rho copied through unchanged
  Eigen::VectorXd u;
  int c_products = 0;
};

/// The per-agent half of one round:
///   x+  = prox_{sigma f}(x - sigma rho - sigma C^T y)
///   yb  = prox_{tau g*}(y + tau C(theta x+ + (1 - theta) x))
///   y+  = yb + tau (2 - theta) C (x+ - x)
///   u   = 2 x+ - x
/// C x is read from the cache, so only C^T y and C x+ are computed. Throws
/// DivergenceError (naming agent and round) on a non-finite result.
LocalStepResult local_step(const AgentState& state, const Agent& agent, double sigma,
                           double tau, double theta, std::size_t agent_index = 0,
                           std::int64_t round = 0);

/// rho + sum_j kappa_j (u_self - u_j), accumulated in ascending neighbor order.
Eigen::VectorXd exchange_step(const Eigen::VectorXd& rho, const Eigen::VectorXd& u_self,
                              std::span<const NeighborMessage> neighbors,
                              std::span<const double> kappas);

/// Stop when the max-over-agents relative error against reference drops to
/// tol; without a reference, when both the fixed-point residual and the
/// consensus disagreement do.
struct Termination {
  double tol = 1e-6;
  std::int64_t max_rounds = 100000;
  std::optional<Eigen::VectorXd> reference;

  static Termination relative_error(Eigen::VectorXd reference, double tol,
                                    std::int64_t max_rounds);
  /// Stops once the primal and dual residuals and the consensus
  /// disagreement of a round are all within tol.
  static Termination fixed_point(double tol, std::int64_t max_rounds);
};

enum class RunStatus { converged, max_rounds, diverged };

const char* to_string(RunStatus status);

struct RoundRecord {
  std::int64_t round = 0;
  double rel_err = 0.0;        // NaN without a reference
  double disagreement = 0.0;   // max_i ||x_i - mean x||_inf
  double fp_residual = 0.0;    // max_i ||x_i^k - x_i^{k-1}||_inf / sigma_i, NaN at round 0
  /// max_i of ||y_i^k - y_i^{k-1}||_inf / tau_i and ||rho_i^k - rho_i^{k-1}||_inf
  double dual_residual = 0.0;
  std::int64_t c_products = 0; // summed over agents
};

/// Everything a run reports. records[k] describes the state after k rounds,
/// so records.size() == comm.rounds + 1.
struct RunTrace {
  std::vector<RoundRecord> records;
  CommStats comm;
  RunStatus status = RunStatus::max_rounds;
  std::string message;
  std::vector<AgentState> final_states;
  std::int64_t init_c_products = 0;
  double op_norm = 0.0;

  std::int64_t rounds() const { return comm.rounds; }
  Eigen::VectorXd mean_x() const;
};

using RoundObserver = std::function<void(std::int64_t round, std::span<const AgentState>)>;

struct RunOptions {
  /// Upper bound on ||L||; computed when absent.
  std::optional<double> op_norm;
  /// Compute the norm by power iteration on the full operator instead of
  /// the cheaper bound.
  bool exact_op_norm = false;
  std::optional<std::vector<AgentState>> init;
  /// Worker threads for the local and exchange phases.
  unsigned threads = 1;
  /// Order in which nodes broadcast within a round; identity when empty.
  std::vector<std::size_t> broadcast_order;
  /// Called after every round, including round 0.
  RoundObserver observer;
};

/// Distributed primal-dual iteration over the graph with one synchronous
/// neighbor exchange per round. Invalid step sizes or a disconnected graph
/// throw; divergence and the round cap are reported in the trace.
RunTrace run(const ConsensusProblem& prob, const Graph& g, const StepSizes& s,
             const Termination& term, const RunOptions& opts = {});

/// Specialization for problems without g terms:
///   x+ = prox_{sigma f}(x - sigma rho), u = 2 x+ - x, rho+ = rho + sum kappa (u_i - u_j).
/// Validated against ||Lap|| alone. Throws InvalidUsage if any agent has a
/// nonempty C.
RunTrace run_reduced(const ConsensusProblem& prob, const Graph& g, const StepSizes& s,
                     const Termination& term, const RunOptions& opts = {});

}  // namespace afba
