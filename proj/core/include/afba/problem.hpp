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
#include <vector>

#include "afba/prox.hpp"

namespace afba {

/// Private data of one agent: minimizes f(x) + g(C x). An agent with
/// C.rows() == 0 has no g term and no dual variable.
struct Agent {
  ProxFunctionPtr f;
  ProxFunctionPtr g;  // may be null iff C.rows() == 0
  Eigen::MatrixXd C;

  std::size_t dual_dim() const { return static_cast<std::size_t>(C.rows()); }
};

/// sum_i f_i(x) + g_i(C_i x) over a shared x in R^n. Immutable.
class ConsensusProblem {
 public:
  /// A null f is replaced by the zero function.
  ConsensusProblem(std::size_t dim, std::vector<Agent> agents);

  std::size_t dim() const { return dim_; }
  std::size_t num_agents() const { return agents_.size(); }
  const Agent& agent(std::size_t i) const { return agents_.at(i); }
  const std::vector<Agent>& agents() const { return agents_; }

  /// True iff every agent has dual_dim() == 0.
  bool uncoupled() const;

  double objective(const Eigen::VectorXd& x) const;

 private:
  std::size_t dim_;
  std::vector<Agent> agents_;
};

/// lambda ||x||_1 + sum_i 1/2 ||D_i x - d_i||^2, split as
/// f_i = (lambda/N) ||.||_1, g_i = 1/2 ||. - d_i||^2, C_i = D_i.
struct LassoInstance {
  ConsensusProblem problem;
  std::vector<Eigen::MatrixXd> D;
  std::vector<Eigen::VectorXd> d;
  double lambda;
  Eigen::VectorXd planted;
  std::uint64_t seed;

  std::size_t num_agents() const { return D.size(); }
  std::size_t dim() const { return problem.dim(); }
  /// sum_i D_i^T d_i
  Eigen::VectorXd correlation() const;
};

enum class LambdaCheck {
  enforce,   // require lambda < 0.1 ||sum_i D_i^T d_i||_inf
  unchecked  // test-only instances (lambda = 0, null solution, ...)
};

LassoInstance make_lasso_instance(std::vector<Eigen::MatrixXd> D,
                                  std::vector<Eigen::VectorXd> d, double lambda,
                                  Eigen::VectorXd planted, std::uint64_t seed,
                                  LambdaCheck check = LambdaCheck::enforce);

struct LassoParams {
  std::size_t agents = 50;
  std::size_t dim = 500;
  std::size_t rows = 50;
  double sparsity = 0.1;      // fraction of nonzeros in the planted vector
  double lambda_frac = 0.05;  // lambda = lambda_frac * ||sum D_i^T d_i||_inf
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

/// Gaussian D_i, sparse planted x with ceil(sparsity * n) standard-normal
/// entries, d_i = D_i x + noise. Bit-reproducible for fixed parameters.
LassoInstance generate_lasso(const LassoParams& params);

struct OracleOptions {
  double tol = 1e-12;
  int max_iter = 200000;
};

struct OracleResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;  // ||x - prox(x - grad/L)||_inf at exit
};

/// Centralized FISTA with gradient-based adaptive restart on the lasso
/// objective, finished by an exact solve on the detected support when that
/// solve is sign-consistent and does not increase the residual. Throws
/// ConvergenceFailure after max_iter iterations.
OracleResult oracle_solve(const LassoInstance& inst, const OracleOptions& opts = {});

/// Infinity-norm distance from -sum_i D_i^T (D_i x - d_i) to lambda d||x||_1.
/// Zero iff x minimizes the lasso objective.
///
/// The subdifferential jumps at zero, so an iterate carrying a 1e-9 entry
/// where the optimum has an exact zero scores O(lambda). Entries with
/// |x_j| <= zero_tol are given the full subdifferential [-lambda, lambda];
/// the gradient is still taken at x itself.
double optimality_residual(const LassoInstance& inst, const Eigen::VectorXd& x,
                           double zero_tol = 0.0);

/// ||x - reference||_inf / ||reference||_inf
double relative_error(const Eigen::VectorXd& x, const Eigen::VectorXd& reference);

}  // namespace afba
