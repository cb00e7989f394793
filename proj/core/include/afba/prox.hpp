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

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace afba {

/// +infinity of the extended real line; evaluate() returns it off-domain.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A proper closed convex function with a computable proximal mapping.
///
/// Implementations are immutable after construction and safe to share
/// across threads.
class ProxFunction {
 public:
  virtual ~ProxFunction() = default;

  /// Function value, kInfinity outside the domain.
  virtual double evaluate(const Eigen::VectorXd& x) const = 0;

  /// argmin_z f(z) + 1/(2 step) ||z - v||^2. Always finite.
  virtual Eigen::VectorXd prox(const Eigen::VectorXd& v, double step) const = 0;

  /// Piecewise linear-quadratic; metadata only.
  virtual bool is_plq() const = 0;

  virtual std::string name() const = 0;
};

using ProxFunctionPtr = std::shared_ptr<const ProxFunction>;

/// Componentwise soft-thresholding sign(v) max(|v| - t, 0).
Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double t);

/// Proximal map of 1/2 ||. - d||^2 with step t: (v + t d) / (1 + t).
Eigen::VectorXd prox_sq_dist(const Eigen::VectorXd& v, const Eigen::VectorXd& d,
                             double t);

/// Proximal map of the Fenchel conjugate f* with step t, computed through the
/// Moreau identity v = prox_{t f*}(v) + t prox_{f/t}(v/t).
Eigen::VectorXd prox_conjugate(const ProxFunction& f, const Eigen::VectorXd& v,
                               double t);

class ZeroFunction final : public ProxFunction {
 public:
  double evaluate(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double step) const override;
  bool is_plq() const override { return true; }
  std::string name() const override { return "zero"; }
};

/// weight * ||x||_1
class L1Norm final : public ProxFunction {
 public:
  explicit L1Norm(double weight);
  double weight() const { return weight_; }
  double evaluate(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double step) const override;
  bool is_plq() const override { return true; }
  std::string name() const override { return "l1"; }

 private:
  double weight_;
};

/// 1/2 ||x - center||^2
class SquaredDistance final : public ProxFunction {
 public:
  explicit SquaredDistance(Eigen::VectorXd center);
  const Eigen::VectorXd& center() const { return center_; }
  double evaluate(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double step) const override;
  bool is_plq() const override { return true; }
  std::string name() const override { return "sq_dist"; }

 private:
  Eigen::VectorXd center_;
};

/// Indicator of the box [lower, upper]^n.
class BoxIndicator final : public ProxFunction {
 public:
  BoxIndicator(double lower, double upper);
  double evaluate(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double step) const override;
  bool is_plq() const override { return true; }
  std::string name() const override { return "box"; }

 private:
  double lower_;
  double upper_;
};

/// sum_i f_i(x) + g_i(C_i x). A null g_i contributes nothing. Returns
/// kInfinity as soon as any term is infinite.
double evaluate_objective(std::span<const ProxFunctionPtr> fs,
                          std::span<const ProxFunctionPtr> gs,
                          std::span<const Eigen::MatrixXd> cs,
                          const Eigen::VectorXd& x);

}  // namespace afba
