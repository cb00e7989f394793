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

#include "afba/problem.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "afba/error.hpp"
#include "afba/graph.hpp"
#include "afba/random.hpp"

namespace afba {

ConsensusProblem::ConsensusProblem(std::size_t dim, std::vector<Agent> agents)
    : dim_(dim), agents_(std::move(agents)) {
  if (agents_.empty()) throw InvalidParameter("problem needs at least one agent");
  if (dim_ == 0) throw InvalidParameter("problem dimension must be positive");
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    Agent& a = agents_[i];
    if (!a.f) a.f = std::make_shared<ZeroFunction>();
    if (a.C.rows() > 0 && a.C.cols() != static_cast<Eigen::Index>(dim_)) {
      throw DimensionMismatch("agent " + std::to_string(i) + ": C has " +
                              std::to_string(a.C.cols()) + " columns, expected " +
                              std::to_string(dim_));
    }
    if (a.C.rows() == 0) {
      a.C.resize(0, static_cast<Eigen::Index>(dim_));
    } else if (!a.g) {
      throw InvalidParameter("agent " + std::to_string(i) +
                             ": nonempty C requires a g term");
    }
  }
}

bool ConsensusProblem::uncoupled() const {
  return std::all_of(agents_.begin(), agents_.end(),
                     [](const Agent& a) { return a.dual_dim() == 0; });
}

double ConsensusProblem::objective(const Eigen::VectorXd& x) const {
  std::vector<ProxFunctionPtr> fs;
  std::vector<ProxFunctionPtr> gs;
  std::vector<Eigen::MatrixXd> cs;
  for (const Agent& a : agents_) {
    fs.push_back(a.f);
    gs.push_back(a.g);
    cs.push_back(a.C);
  }
  return evaluate_objective(fs, gs, cs, x);
}

Eigen::VectorXd LassoInstance::correlation() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < D.size(); ++i) c.noalias() += D[i].transpose() * d[i];
  return c;
}

LassoInstance make_lasso_instance(std::vector<Eigen::MatrixXd> D,
                                  std::vector<Eigen::VectorXd> d, double lambda,
                                  Eigen::VectorXd planted, std::uint64_t seed,
                                  LambdaCheck check) {
  if (D.empty() || D.size() != d.size()) {
    throw DimensionMismatch("lasso: need one d_i per D_i and at least one agent");
  }
  const Eigen::Index n = D.front().cols();
  for (std::size_t i = 0; i < D.size(); ++i) {
    if (D[i].cols() != n || D[i].rows() != d[i].size()) {
      throw DimensionMismatch("lasso: agent " + std::to_string(i) +
                              " has inconsistent D_i / d_i shapes");
    }
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("lasso: lambda must be finite and nonnegative");
  }
  const double weight = lambda / static_cast<double>(D.size());
  std::vector<Agent> agents;
  agents.reserve(D.size());
  for (std::size_t i = 0; i < D.size(); ++i) {
    agents.push_back({std::make_shared<L1Norm>(weight),
                      std::make_shared<SquaredDistance>(d[i]), D[i]});
  }
  LassoInstance inst{ConsensusProblem(static_cast<std::size_t>(n), std::move(agents)),
                     std::move(D),
                     std::move(d),
                     lambda,
                     std::move(planted),
                     seed};
  if (check == LambdaCheck::enforce) {
    const double bound = 0.1 * inst.correlation().lpNorm<Eigen::Infinity>();
    if (!(lambda > 0.0 && lambda < bound)) {
      throw InvalidParameter("lasso: lambda must satisfy 0 < lambda < 0.1 ||sum D_i^T d_i||_inf");
    }
  }
  return inst;
}

LassoInstance generate_lasso(const LassoParams& params) {
  if (params.agents == 0 || params.dim == 0 || params.rows == 0) {
    throw InvalidParameter("generate_lasso: N, n, m must be positive");
  }
  if (!(params.sparsity > 0.0 && params.sparsity <= 1.0)) {
    throw InvalidParameter("generate_lasso: sparsity must lie in (0, 1]");
  }
  if (!(params.lambda_frac > 0.0)) {
    throw InvalidParameter("generate_lasso: lambda_frac must be positive");
  }
  if (!(params.noise_std >= 0.0)) {
    throw InvalidParameter("generate_lasso: noise_std must be nonnegative");
  }
  const auto n = static_cast<Eigen::Index>(params.dim);
  const auto m = static_cast<Eigen::Index>(params.rows);
  Rng rng = make_rng(params.seed, 0x1a550);
  std::normal_distribution<double> normal;

  // Partial Fisher-Yates picks the support.
  const auto k = static_cast<std::size_t>(
      std::ceil(params.sparsity * static_cast<double>(params.dim)));
  std::vector<std::size_t> index(params.dim);
  for (std::size_t j = 0; j < params.dim; ++j) index[j] = j;
  for (std::size_t j = 0; j < k; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, params.dim - 1);
    std::swap(index[j], index[pick(rng)]);
  }
  Eigen::VectorXd planted = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < k; ++j) {
    planted[static_cast<Eigen::Index>(index[j])] = normal(rng);
  }

  std::vector<Eigen::MatrixXd> D(params.agents);
  std::vector<Eigen::VectorXd> d(params.agents);
  for (std::size_t i = 0; i < params.agents; ++i) {
    D[i].resize(m, n);
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index c = 0; c < n; ++c) D[i](r, c) = normal(rng);
    d[i] = D[i] * planted;
    if (params.noise_std > 0.0) {
      for (Eigen::Index r = 0; r < m; ++r) d[i][r] += params.noise_std * normal(rng);
    }
  }
  Eigen::VectorXd corr = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < params.agents; ++i) corr.noalias() += D[i].transpose() * d[i];
  const double lambda = params.lambda_frac * corr.lpNorm<Eigen::Infinity>();
  const LambdaCheck check =
      params.lambda_frac < 0.1 ? LambdaCheck::enforce : LambdaCheck::unchecked;
  return make_lasso_instance(std::move(D), std::move(d), lambda, std::move(planted),
                             params.seed, check);
}

namespace {

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  if (t == 0.0) return v;
  return prox_l1(v, t);
}

// Solves the optimality system on the support of a near-optimal x, where it
// is linear: H_SS x_S = b_S - lambda sign(x_S). Rejected unless the signs
// survive and every off-support gradient stays within [-lambda, lambda].
std::optional<Eigen::VectorXd> polish_support(const Eigen::MatrixXd& hessian,
                                              const Eigen::VectorXd& linear, double lambda,
                                              const Eigen::VectorXd& x) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) support.push_back(j);
  }
  if (support.empty()) return std::nullopt;
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd h(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) h(a, b) = hessian(support[a], support[b]);
    rhs[a] = linear[support[a]] - lambda * (x[support[a]] > 0.0 ? 1.0 : -1.0);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  const Eigen::VectorXd xs = ldlt.solve(rhs);
  if (!xs.allFinite()) return std::nullopt;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index a = 0; a < k; ++a) {
    if (xs[a] * x[support[a]] <= 0.0) return std::nullopt;
    out[support[a]] = xs[a];
  }
  const Eigen::VectorXd grad = hessian * out - linear;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (out[j] == 0.0 && std::abs(grad[j]) > lambda) return std::nullopt;
  }
  return out;
}

}  // namespace

OracleResult oracle_solve(const LassoInstance& inst, const OracleOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidParameter("oracle_solve: tol must be positive");
  const auto n = static_cast<Eigen::Index>(inst.dim());
  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd linear = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < inst.D.size(); ++i) {
    hessian.noalias() += inst.D[i].transpose() * inst.D[i];
    linear.noalias() += inst.D[i].transpose() * inst.d[i];
  }
  double lipschitz =
      spectral_norm([&hessian](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return hessian * v;
      }, inst.dim()).bound();
  if (lipschitz == 0.0) lipschitz = 1.0;
  const double step = 1.0 / lipschitz;
  const double threshold = inst.lambda * step;

  auto forward_backward = [&](const Eigen::VectorXd& z) {
    return soft_threshold(z - step * (hessian * z - linear), threshold);
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = x;
  double t = 1.0;
  double residual = (x - forward_backward(x)).lpNorm<Eigen::Infinity>();
  if (residual <= opts.tol) return {x, 0, residual};
  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd next = forward_backward(y);
    residual = (next - forward_backward(next)).lpNorm<Eigen::Infinity>();
    if (residual <= opts.tol) {
      if (auto polished = polish_support(hessian, linear, inst.lambda, next)) {
        const double r = (*polished - forward_backward(*polished)).lpNorm<Eigen::Infinity>();
        if (r <= residual) return {std::move(*polished), it, r};
      }
      return {next, it, residual};
    }
    if ((y - next).dot(next - x) > 0.0) {
      t = 1.0;
      y = next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    }
    x = std::move(next);
  }
  throw ConvergenceFailure(residual, opts.max_iter);
}

double optimality_residual(const LassoInstance& inst, const Eigen::VectorXd& x,
                           double zero_tol) {
  if (x.size() != static_cast<Eigen::Index>(inst.dim())) {
    throw DimensionMismatch("optimality_residual: wrong dimension");
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  for (std::size_t i = 0; i < inst.D.size(); ++i) {
    grad.noalias() += inst.D[i].transpose() * (inst.D[i] * x - inst.d[i]);
  }
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double gap = 0.0;
    if (x[j] > zero_tol) {
      gap = std::abs(grad[j] + inst.lambda);
    } else if (x[j] < -zero_tol) {
      gap = std::abs(grad[j] - inst.lambda);
    } else {
      gap = std::max(0.0, std::abs(grad[j]) - inst.lambda);
    }
    worst = std::max(worst, gap);
  }
  return worst;
}

double relative_error(const Eigen::VectorXd& x, const Eigen::VectorXd& reference) {
  if (x.size() != reference.size()) {
    throw DimensionMismatch("relative_error: dimension mismatch");
  }
  const double scale = reference.lpNorm<Eigen::Infinity>();
  if (!(scale > 0.0)) throw InvalidParameter("relative_error: zero reference");
  return (x - reference).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace afba
