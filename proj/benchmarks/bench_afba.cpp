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

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "afba/graph.hpp"
#include "afba/problem.hpp"
#include "afba/prox.hpp"
#include "afba/simnet.hpp"
#include "afba/solver.hpp"

namespace {

using namespace afba;

// One full-size agent: m = 50 rows, n = 500.
const LassoInstance& bench_instance() {
  static const LassoInstance inst = [] {
    LassoParams p;
    p.agents = 4;
    return generate_lasso(p);
  }();
  return inst;
}

void BM_ProxL1(benchmark::State& state) {
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(state.range(0), -3.0, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(prox_l1(v, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxL1)->Arg(500)->Arg(5000);

void BM_LocalStep(benchmark::State& state) {
  const LassoInstance& inst = bench_instance();
  const Agent& agent = inst.problem.agent(0);
  AgentState st = zero_states(inst.problem)[0];
  st.x.setConstant(0.1);
  st.y.setConstant(-0.2);
  for (auto _ : state) {
    LocalStepResult r = local_step(st, agent, 0.02, 0.066, 1.5);
    benchmark::DoNotOptimize(r.u.data());
  }
}
BENCHMARK(BM_LocalStep);

void BM_ExchangeStep(benchmark::State& state) {
  const auto degree = static_cast<std::size_t>(state.range(0));
  const Eigen::VectorXd rho = Eigen::VectorXd::Zero(500);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(500);
  std::vector<Eigen::VectorXd> others(degree, Eigen::VectorXd::Constant(500, 0.5));
  std::vector<NeighborMessage> msgs;
  for (std::size_t j = 0; j < degree; ++j) msgs.push_back({j + 1, &others[j]});
  const std::vector<double> kappas(degree, 0.066);
  for (auto _ : state) benchmark::DoNotOptimize(exchange_step(rho, u, msgs, kappas));
}
BENCHMARK(BM_ExchangeStep)->Arg(3)->Arg(10);

void BM_MailboxRound(benchmark::State& state) {
  const Graph g = erdos_renyi(50, 0.05, 1);
  RoundMailbox mbox(g, 500);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(500);
  for (auto _ : state) {
    for (std::size_t i = 0; i < 50; ++i) mbox.broadcast(i, u);
    for (std::size_t i = 0; i < 50; ++i) benchmark::DoNotOptimize(mbox.collect(i));
    mbox.advance_round();
  }
}
BENCHMARK(BM_MailboxRound);

// Full solver rounds on the full-size problem (N = 50, n = 500, m = 50).
void BM_FullRound(benchmark::State& state) {
  static const LassoInstance inst = generate_lasso(LassoParams{});
  static const Graph g = erdos_renyi(50, 0.05, 1);
  static const double norm = operator_norm_bound(inst.problem, g);
  const StepSizes s = default_stepsizes(1.5, 20.0, norm, g);
  const std::int64_t rounds = 20;
  RunOptions opts;
  opts.op_norm = norm;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    RunTrace t = run(inst.problem, g, s, Termination::fixed_point(1e-300, rounds), opts);
    benchmark::DoNotOptimize(t.records.data());
  }
  state.SetItemsProcessed(state.iterations() * rounds);
  state.SetLabel("items = rounds");
}
BENCHMARK(BM_FullRound)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_LaplacianNorm(benchmark::State& state) {
  const Graph g = erdos_renyi(50, 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_norm(g).value);
}
BENCHMARK(BM_LaplacianNorm);

}  // namespace

BENCHMARK_MAIN();
