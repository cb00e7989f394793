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

#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "afba/error.hpp"
#include "afba/problem.hpp"
#include "oracles/oracles.hpp"

using namespace afba;

namespace {

LassoInstance scalar_lasso(double lambda, double c, double d) {
  return make_lasso_instance({Eigen::MatrixXd::Constant(1, 1, c)}, {Eigen::VectorXd::Constant(1, d)},
                             lambda, Eigen::VectorXd::Zero(1), 0, LambdaCheck::unchecked);
}

LassoParams small_params(std::uint64_t seed) {
  LassoParams p;
  p.agents = 3;
  p.dim = 20;
  p.rows = 30;
  p.sparsity = 0.1;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("ConsensusProblem construction") {
  SUBCASE("null f becomes the zero function, empty C means no coupling") {
    ConsensusProblem prob(3, {Agent{nullptr, nullptr, {}}});
    CHECK(prob.agent(0).f != nullptr);
    CHECK(prob.agent(0).f->evaluate(Eigen::VectorXd::Ones(3)) == 0.0);
    CHECK(prob.agent(0).dual_dim() == 0);
    CHECK(prob.agent(0).C.cols() == 3);
    CHECK(prob.uncoupled());
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(ConsensusProblem(3, {}), InvalidParameter);
    CHECK_THROWS_AS(ConsensusProblem(0, {Agent{}}), InvalidParameter);
    auto g = std::make_shared<SquaredDistance>(Eigen::VectorXd::Zero(2));
    CHECK_THROWS_AS(ConsensusProblem(3, {Agent{nullptr, g, Eigen::MatrixXd::Ones(2, 4)}}),
                    DimensionMismatch);
    CHECK_THROWS(ConsensusProblem(3, {Agent{nullptr, nullptr, Eigen::MatrixXd::Ones(2, 3)}}));
    ConsensusProblem ok(3, {Agent{nullptr, g, Eigen::MatrixXd::Ones(2, 3)}});
    CHECK_FALSE(ok.uncoupled());
    CHECK(ok.agent(0).dual_dim() == 2);
  }
}

TEST_CASE("generate_lasso") {
  SUBCASE("default shape: 50 agents x 50 rows x 500") {
    LassoInstance inst = generate_lasso(LassoParams{});
    CHECK(inst.num_agents() == 50);
    CHECK(inst.dim() == 500);
    for (const auto& D : inst.D) {
      CHECK(D.rows() == 50);
      CHECK(D.cols() == 500);
    }
    CHECK((inst.planted.array() != 0.0).count() == 50);
    const double corr = inst.correlation().lpNorm<Eigen::Infinity>();
    CHECK(inst.lambda == doctest::Approx(0.05 * corr).epsilon(1e-15));
    CHECK(inst.lambda < 0.1 * corr);
    // f_i weight is lambda / N
    auto l1 = std::dynamic_pointer_cast<const L1Norm>(inst.problem.agent(7).f);
    REQUIRE(l1 != nullptr);
    CHECK(l1->weight() == doctest::Approx(inst.lambda / 50.0).epsilon(1e-15));
  }
  SUBCASE("noise-free data is exact") {
    LassoInstance inst = generate_lasso(small_params(4));
    for (std::size_t i = 0; i < inst.num_agents(); ++i) {
      CHECK((inst.D[i] * inst.planted - inst.d[i]).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("bit-reproducible in the seed") {
    LassoParams p = small_params(11);
    p.noise_std = 0.1;
    LassoInstance a = generate_lasso(p);
    LassoInstance b = generate_lasso(p);
    CHECK(a.lambda == b.lambda);
    CHECK(a.planted == b.planted);
    for (std::size_t i = 0; i < a.num_agents(); ++i) {
      CHECK(a.D[i] == b.D[i]);
      CHECK(a.d[i] == b.d[i]);
    }
    p.seed = 12;
    CHECK_FALSE(generate_lasso(p).D[0] == a.D[0]);
  }
  SUBCASE("parameter validation") {
    LassoParams p = small_params(1);
    p.sparsity = 0.0;
    CHECK_THROWS_AS(generate_lasso(p), InvalidParameter);
    p = small_params(1);
    p.agents = 0;
    CHECK_THROWS_AS(generate_lasso(p), InvalidParameter);
    p = small_params(1);
    p.noise_std = -1.0;
    CHECK_THROWS_AS(generate_lasso(p), InvalidParameter);
    p = small_params(1);
    p.lambda_frac = 0.0;
    CHECK_THROWS_AS(generate_lasso(p), InvalidParameter);
  }
}

TEST_CASE("the lambda bound is asserted at construction") {
  LassoInstance inst = generate_lasso(small_params(2));
  const double corr = inst.correlation().lpNorm<Eigen::Infinity>();
  CHECK_THROWS_AS(make_lasso_instance(inst.D, inst.d, 0.1 * corr, inst.planted, 2), InvalidParameter);
  CHECK_THROWS_AS(make_lasso_instance(inst.D, inst.d, 0.0, inst.planted, 2), InvalidParameter);
  CHECK_NOTHROW(make_lasso_instance(inst.D, inst.d, 0.09 * corr, inst.planted, 2));
  CHECK_NOTHROW(make_lasso_instance(inst.D, inst.d, 0.0, inst.planted, 2, LambdaCheck::unchecked));
}

TEST_CASE("oracle_solve") {
  SUBCASE("scalar: min 0.3|x| + 1/2 (x - 1)^2") {
    LassoInstance inst = scalar_lasso(0.3, 1.0, 1.0);
    OracleResult res = oracle_solve(inst);
    CHECK(res.x[0] == doctest::Approx(0.7).epsilon(1e-12));
    const auto grid = oracle::grid_minimize(
        [](double z) { return 0.3 * std::abs(z) + 0.5 * (z - 1) * (z - 1); }, -2.0, 2.0);
    CHECK(std::abs(grid.argmin - res.x[0]) <= 1e-4);
  }
  SUBCASE("lambda = 0, square invertible D") {
    Eigen::MatrixXd D(3, 3);
    D << 2, 1, 0, 1, 3, 1, 0, 1, 4;
    Eigen::VectorXd d(3);
    d << 1, -2, 0.5;
    LassoInstance inst =
        make_lasso_instance({D}, {d}, 0.0, Eigen::VectorXd::Zero(3), 0, LambdaCheck::unchecked);
    OracleResult res = oracle_solve(inst);
    const Eigen::VectorXd exact = D.lu().solve(d);
    CHECK((res.x - exact).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("lambda above the null threshold gives zero") {
    LassoInstance base = generate_lasso(small_params(3));
    const double corr = base.correlation().lpNorm<Eigen::Infinity>();
    LassoInstance inst = make_lasso_instance(base.D, base.d, 1.01 * corr, base.planted, 3,
                                             LambdaCheck::unchecked);
    OracleResult res = oracle_solve(inst);
    CHECK(res.x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(optimality_residual(inst, res.x) == 0.0);
  }
  SUBCASE("small lambda, no noise recovers the planted support") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      LassoParams p = small_params(seed);
      p.lambda_frac = 1e-4;
      LassoInstance inst = generate_lasso(p);
      OracleResult res = oracle_solve(inst);
      CHECK(relative_error(res.x, inst.planted) <= 1e-3);
      for (Eigen::Index j = 0; j < inst.planted.size(); ++j) {
        if (inst.planted[j] != 0.0) CHECK(res.x[j] != 0.0);
        if (inst.planted[j] == 0.0) CHECK(std::abs(res.x[j]) <= 1e-6);
      }
    }
  }
  SUBCASE("iteration cap") {
    OracleOptions opts;
    opts.max_iter = 2;
    try {
      oracle_solve(generate_lasso(small_params(6)), opts);
      FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
      CHECK(e.iterations == 2);
      CHECK(e.final_residual > 0.0);
    }
  }
  SUBCASE("tol must be positive") {
    OracleOptions opts;
    opts.tol = 0.0;
    CHECK_THROWS_AS(oracle_solve(scalar_lasso(0.3, 1, 1), opts), InvalidParameter);
  }
}

TEST_CASE("oracle output passes the optimality check") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    LassoInstance inst = generate_lasso(small_params(seed));
    OracleResult res = oracle_solve(inst);
    CHECK(res.residual <= 1e-12);
    CHECK(optimality_residual(inst, res.x) <= 1e-9);
    CHECK(optimality_residual(inst, res.x) <= 10.0 * OracleOptions{}.tol);
  }
  SUBCASE("default-size instance") {
    LassoInstance inst = generate_lasso(LassoParams{});
    OracleResult res = oracle_solve(inst);
    CHECK(optimality_residual(inst, res.x) <= 1e-9);
  }
}

TEST_CASE("single-agent instance without coupling reduces to the prox fixed point") {
  // With D = 0 the objective is lambda ||x||_1, whose minimizer is x = 0,
  // the unique fixed point of x = prox_{gamma lambda ||.||_1}(x).
  LassoInstance inst = make_lasso_instance({Eigen::MatrixXd::Zero(2, 4)}, {Eigen::VectorXd::Zero(2)},
                                           0.5, Eigen::VectorXd::Zero(4), 0, LambdaCheck::unchecked);
  OracleResult res = oracle_solve(inst);
  for (double gamma : {0.1, 1.0, 10.0}) {
    CHECK((prox_l1(res.x, gamma * 0.5) - res.x).cwiseAbs().maxCoeff() <= OracleOptions{}.tol);
  }
}

TEST_CASE("optimality_residual") {
  LassoInstance inst = generate_lasso(small_params(8));
  const double corr = inst.correlation().lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.dim()));
  CHECK(optimality_residual(inst, zero) == doctest::Approx(corr - inst.lambda).epsilon(1e-14));
  LassoInstance big = make_lasso_instance(inst.D, inst.d, corr, inst.planted, 8, LambdaCheck::unchecked);
  CHECK(optimality_residual(big, zero) == 0.0);
  CHECK(optimality_residual(scalar_lasso(0.3, 1, 1), Eigen::VectorXd::Constant(1, 0.7)) <= 1e-15);

  // A stray 1e-9 where the optimum is zero: the strict form jumps, the
  // thresholded form does not.
  const Eigen::VectorXd opt = oracle_solve(inst).x;
  Eigen::Index zero_at = 0;
  while (opt[zero_at] != 0.0) ++zero_at;
  Eigen::VectorXd stray = opt;
  stray[zero_at] = 1e-9;
  CHECK(optimality_residual(inst, stray) > 0.1 * inst.lambda);
  CHECK(optimality_residual(inst, stray, 1e-8) <= 1e-6);
}

TEST_CASE("relative_error") {
  Eigen::VectorXd ref(2);
  ref << 2, -4;
  Eigen::VectorXd x(2);
  x << 2, -3;
  CHECK(relative_error(x, ref) == 0.25);
  CHECK_THROWS_AS(relative_error(x, Eigen::VectorXd::Zero(2)), InvalidParameter);
}
