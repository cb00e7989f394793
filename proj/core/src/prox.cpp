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

#include "afba/prox.hpp"

#include <cmath>
#include <utility>

#include "afba/error.hpp"

namespace afba {

namespace {

void require_step(double t, const char* where) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidParameter(std::string(where) + ": step must be positive and finite");
  }
}

void require_finite(const Eigen::VectorXd& v, const char* where) {
  if (!v.allFinite()) {
    throw InvalidInput(std::string(where) + ": non-finite input");
  }
}

}  // namespace

Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double t) {
  require_step(t, "prox_l1");
  require_finite(v, "prox_l1");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double mag = std::abs(v[k]) - t;
    out[k] = mag > 0.0 ? std::copysign(mag, v[k]) : 0.0;
  }
  return out;
}

Eigen::VectorXd prox_sq_dist(const Eigen::VectorXd& v, const Eigen::VectorXd& d,
                             double t) {
  require_step(t, "prox_sq_dist");
  if (v.size() != d.size()) {
    throw DimensionMismatch("prox_sq_dist: dim(v) != dim(d)");
  }
  require_finite(v, "prox_sq_dist");
  return (v + t * d) / (1.0 + t);
}

Eigen::VectorXd prox_conjugate(const ProxFunction& f, const Eigen::VectorXd& v,
                               double t) {
  require_step(t, "prox_conjugate");
  return v - t * f.prox(v / t, 1.0 / t);
}

double ZeroFunction::evaluate(const Eigen::VectorXd&) const { return 0.0; }

Eigen::VectorXd ZeroFunction::prox(const Eigen::VectorXd& v, double step) const {
  require_step(step, "zero.prox");
  require_finite(v, "zero.prox");
  return v;
}

L1Norm::L1Norm(double weight) : weight_(weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw InvalidParameter("L1Norm: weight must be finite and nonnegative");
  }
}

double L1Norm::evaluate(const Eigen::VectorXd& x) const {
  return weight_ * x.lpNorm<1>();
}

Eigen::VectorXd L1Norm::prox(const Eigen::VectorXd& v, double step) const {
  require_step(step, "l1.prox");
  if (weight_ == 0.0) {
    require_finite(v, "l1.prox");
    return v;
  }
  return prox_l1(v, weight_ * step);
}

SquaredDistance::SquaredDistance(Eigen::VectorXd center)
    : center_(std::move(center)) {
  require_finite(center_, "SquaredDistance");
}

double SquaredDistance::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != center_.size()) {
    throw DimensionMismatch("sq_dist.evaluate: dimension mismatch");
  }
  return 0.5 * (x - center_).squaredNorm();
}

Eigen::VectorXd SquaredDistance::prox(const Eigen::VectorXd& v,
                                      double step) const {
  return prox_sq_dist(v, center_, step);
}

BoxIndicator::BoxIndicator(double lower, double upper)
    : lower_(lower), upper_(upper) {
  if (!(lower <= upper)) throw InvalidParameter("BoxIndicator: lower > upper");
}

double BoxIndicator::evaluate(const Eigen::VectorXd& x) const {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (!(x[k] >= lower_ && x[k] <= upper_)) return kInfinity;
  }
  return 0.0;
}

Eigen::VectorXd BoxIndicator::prox(const Eigen::VectorXd& v, double step) const {
  require_step(step, "box.prox");
  require_finite(v, "box.prox");
  return v.cwiseMax(lower_).cwiseMin(upper_);
}

double evaluate_objective(std::span<const ProxFunctionPtr> fs,
                          std::span<const ProxFunctionPtr> gs,
                          std::span<const Eigen::MatrixXd> cs,
                          const Eigen::VectorXd& x) {
  if (fs.size() != gs.size() || fs.size() != cs.size()) {
    throw DimensionMismatch("evaluate_objective: fs, gs, Cs differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i]) {
      const double fi = fs[i]->evaluate(x);
      if (fi == kInfinity) return kInfinity;
      total += fi;
    }
    if (gs[i] && cs[i].rows() > 0) {
      if (cs[i].cols() != x.size()) {
        throw DimensionMismatch("evaluate_objective: C_i has wrong column count");
      }
      const double gi = gs[i]->evaluate(cs[i] * x);
      if (gi == kInfinity) return kInfinity;
      total += gi;
    }
  }
  return total;
}

}  // namespace afba
