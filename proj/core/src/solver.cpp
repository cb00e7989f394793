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

#include "afba/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "afba/error.hpp"
#include "parallel.hpp"

namespace afba {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_positive(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidParameter(std::string("step sizes: ") + what +
                             " entries must be positive and finite");
    }
  }
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

double StepSizes::sigma_max() const { return max_of(sigma); }

double StepSizes::tau_max() const { return std::max(max_of(tau), max_of(kappa)); }

StepSizes uniform_stepsizes(std::size_t agents, std::size_t edges, double sigma,
                            double tau, double theta) {
  return {std::vector<double>(agents, sigma), std::vector<double>(agents, tau),
          std::vector<double>(edges, tau), theta};
}

StepSizeCheck validate_stepsizes(const StepSizes& s, double op_norm) {
  if (s.sigma.empty() || s.tau.size() != s.sigma.size()) {
    throw InvalidParameter("step sizes: need one sigma and one tau per agent");
  }
  require_positive(s.sigma, "sigma");
  require_positive(s.tau, "tau");
  require_positive(s.kappa, "kappa");
  if (!(s.theta >= 0.0) || !std::isfinite(s.theta)) {
    throw InvalidParameter("step sizes: theta must be finite and nonnegative");
  }
  if (!(op_norm >= 0.0) || !std::isfinite(op_norm)) {
    throw InvalidParameter("step sizes: operator norm must be finite and nonnegative");
  }
  StepSizeCheck check;
  check.margin = 1.0 / s.sigma_max() - s.tau_max() * theta_factor(s.theta) * op_norm;
  check.ok = check.margin > 0.0 || (s.theta == 2.0 && check.margin >= 0.0);
  if (!check.ok) {
    std::ostringstream os;
    os << "step-size condition violated: 1/sigma_max - tau_max * (theta^2 - 3 theta + 3)"
          " * ||L|| = "
       << check.margin << (s.theta == 2.0 ? " < 0" : " <= 0");
    check.reason = os.str();
  }
  return check;
}

StepSizes default_stepsizes(double theta, double alpha, double op_norm, const Graph& g) {
  if (!(alpha > 0.0)) throw InvalidParameter("default_stepsizes: alpha must be positive");
  if (!(op_norm > 0.0)) throw InvalidParameter("default_stepsizes: norm must be positive");
  if (!(theta >= 0.0)) throw InvalidParameter("default_stepsizes: theta must be nonnegative");
  const double sigma = alpha / op_norm;
  const double tau = 0.99 / (alpha * theta_factor(theta));
  return uniform_stepsizes(g.num_nodes(), g.num_edges(), sigma, tau, theta);
}

double max_coupling_norm_sq(const ConsensusProblem& prob, const PowerIterationOptions& opts) {
  double worst = 0.0;
  for (const Agent& a : prob.agents()) {
    if (a.C.rows() == 0) continue;
    const bool wide = a.C.rows() <= a.C.cols();
    const Eigen::MatrixXd gram =
        wide ? Eigen::MatrixXd(a.C * a.C.transpose()) : Eigen::MatrixXd(a.C.transpose() * a.C);
    const SpectralEstimate est = spectral_norm(
        [&gram](const Eigen::VectorXd& v) -> Eigen::VectorXd { return gram * v; },
        static_cast<std::size_t>(gram.rows()), opts);
    worst = std::max(worst, est.bound());
  }
  return worst;
}

double operator_norm_bound(const ConsensusProblem& prob, const Graph& g,
                           const PowerIterationOptions& opts) {
  return laplacian_norm(g, opts).bound() + max_coupling_norm_sq(prob, opts);
}

double operator_norm_exact(const ConsensusProblem& prob, const Graph& g,
                           const PowerIterationOptions& opts) {
  if (g.num_nodes() != prob.num_agents()) {
    throw DimensionMismatch("operator_norm_exact: graph and problem disagree on N");
  }
  const auto n = static_cast<Eigen::Index>(prob.dim());
  auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd y = apply_laplacian(g, x, prob.dim());
    for (std::size_t i = 0; i < prob.num_agents(); ++i) {
      const Eigen::MatrixXd& C = prob.agent(i).C;
      if (C.rows() == 0) continue;
      const auto xi = x.segment(static_cast<Eigen::Index>(i) * n, n);
      y.segment(static_cast<Eigen::Index>(i) * n, n).noalias() += C.transpose() * (C * xi);
    }
    return y;
  };
  return spectral_norm(apply, prob.num_agents() * prob.dim(), opts).bound();
}

std::vector<AgentState> zero_states(const ConsensusProblem& prob) {
  std::vector<AgentState> states;
  states.reserve(prob.num_agents());
  const auto n = static_cast<Eigen::Index>(prob.dim());
  for (const Agent& a : prob.agents()) {
    states.push_back({Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(a.C.rows()),
                      Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(a.C.rows())});
  }
  return states;
}

LocalStepResult local_step(const AgentState& state, const Agent& agent, double sigma,
                           double tau, double theta, std::size_t agent_index,
                           std::int64_t round) {
  const Eigen::Index n = state.x.size();
  if (state.rho.size() != n || agent.C.cols() != n || state.y.size() != agent.C.rows() ||
      state.cached_Cx.size() != agent.C.rows()) {
    throw DimensionMismatch("local_step: state does not match agent " +
                            std::to_string(agent_index));
  }
  LocalStepResult out;
  Eigen::VectorXd v = state.x - sigma * state.rho;
  const bool coupled = agent.C.rows() > 0;
  if (coupled) {
    v.noalias() -= sigma * (agent.C.transpose() * state.y);
    ++out.c_products;
  }
  if (!v.allFinite()) throw DivergenceError(agent_index, round);
  out.state.x = agent.f->prox(v, sigma);
  out.state.rho = state.rho;
  if (coupled) {
    Eigen::VectorXd cx_new = agent.C * out.state.x;
    ++out.c_products;
    const Eigen::VectorXd arg =
        state.y + tau * (theta * cx_new + (1.0 - theta) * state.cached_Cx);
    if (!arg.allFinite()) throw DivergenceError(agent_index, round);
    const Eigen::VectorXd ybar = prox_conjugate(*agent.g, arg, tau);
    out.state.y = ybar + tau * (2.0 - theta) * (cx_new - state.cached_Cx);
    out.state.cached_Cx = std::move(cx_new);
  } else {
    out.state.y = state.y;
    out.state.cached_Cx = state.cached_Cx;
  }
  out.u = 2.0 * out.state.x - state.x;
  if (!out.state.x.allFinite() || !out.state.y.allFinite()) {
    throw DivergenceError(agent_index, round);
  }
  return out;
}

Eigen::VectorXd exchange_step(const Eigen::VectorXd& rho, const Eigen::VectorXd& u_self,
                              std::span<const NeighborMessage> neighbors,
                              std::span<const double> kappas) {
  if (neighbors.size() != kappas.size()) {
    throw DimensionMismatch("exchange_step: one kappa per neighbor required");
  }
  if (rho.size() != u_self.size()) throw DimensionMismatch("exchange_step: rho vs u");
  Eigen::VectorXd out = rho;
  for (std::size_t p = 0; p < neighbors.size(); ++p) {
    if (p > 0 && neighbors[p].node <= neighbors[p - 1].node) {
      throw InvalidParameter("exchange_step: neighbors must be sorted by id");
    }
    if (neighbors[p].u == nullptr || neighbors[p].u->size() != u_self.size()) {
      throw DimensionMismatch("exchange_step: neighbor vector has wrong dimension");
    }
    out.noalias() += kappas[p] * (u_self - *neighbors[p].u);
  }
  return out;
}

Termination Termination::relative_error(Eigen::VectorXd reference, double tol,
                                        std::int64_t max_rounds) {
  return {tol, max_rounds, std::move(reference)};
}

Termination Termination::fixed_point(double tol, std::int64_t max_rounds) {
  return {tol, max_rounds, std::nullopt};
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged:
      return "converged";
    case RunStatus::max_rounds:
      return "max-rounds";
    case RunStatus::diverged:
      return "diverged";
  }
  return "unknown";
}

Eigen::VectorXd RunTrace::mean_x() const {
  if (final_states.empty()) return {};
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(final_states.front().x.size());
  for (const AgentState& s : final_states) mean += s.x;
  return mean / static_cast<double>(final_states.size());
}

namespace {

using LocalKernel =
    std::function<LocalStepResult(std::size_t agent, const AgentState&, std::int64_t round)>;

double consensus_disagreement(const std::vector<AgentState>& states) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(states.front().x.size());
  for (const AgentState& s : states) mean += s.x;
  mean /= static_cast<double>(states.size());
  double worst = 0.0;
  for (const AgentState& s : states) {
    worst = std::max(worst, (s.x - mean).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

double max_relative_error(const std::vector<AgentState>& states, const Eigen::VectorXd& ref) {
  double worst = 0.0;
  for (const AgentState& s : states) worst = std::max(worst, relative_error(s.x, ref));
  return worst;
}

void check_inputs(const ConsensusProblem& prob, const Graph& g, const StepSizes& s,
                  const Termination& term) {
  if (g.num_nodes() != prob.num_agents()) {
    throw DimensionMismatch("run: graph has " + std::to_string(g.num_nodes()) +
                            " nodes but the problem has " +
                            std::to_string(prob.num_agents()) + " agents");
  }
  if (s.sigma.size() != prob.num_agents() || s.tau.size() != prob.num_agents() ||
      s.kappa.size() != g.num_edges()) {
    throw DimensionMismatch("run: step-size vectors do not match graph");
  }
  if (!is_connected(g)) throw InvalidParameter("run: communication graph is not connected");
  if (!(term.tol > 0.0)) throw InvalidParameter("run: tolerance must be positive");
  if (term.max_rounds < 0) throw InvalidParameter("run: max_rounds must be nonnegative");
  if (term.reference) {
    if (term.reference->size() != static_cast<Eigen::Index>(prob.dim())) {
      throw DimensionMismatch("run: reference has wrong dimension");
    }
    if (!(term.reference->lpNorm<Eigen::Infinity>() > 0.0)) {
      throw InvalidParameter("run: relative-error termination needs a nonzero reference");
    }
  }
}

std::vector<AgentState> initial_states(const ConsensusProblem& prob, const RunOptions& opts,
                                       std::int64_t& products) {
  products = 0;
  if (!opts.init) {
    for (const Agent& a : prob.agents()) products += a.C.rows() > 0 ? 1 : 0;
    return zero_states(prob);
  }
  std::vector<AgentState> states = *opts.init;
  if (states.size() != prob.num_agents()) {
    throw DimensionMismatch("run: need one initial state per agent");
  }
  const auto n = static_cast<Eigen::Index>(prob.dim());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Agent& a = prob.agent(i);
    AgentState& st = states[i];
    if (st.x.size() != n || st.rho.size() != n || st.y.size() != a.C.rows()) {
      throw DimensionMismatch("run: initial state " + std::to_string(i) +
                              " has wrong dimensions");
    }
    st.cached_Cx = a.C * st.x;
    products += a.C.rows() > 0 ? 1 : 0;
  }
  return states;
}

RunTrace drive(const ConsensusProblem& prob, const Graph& g, const StepSizes& s,
               const Termination& term, const RunOptions& opts, double op_norm,
               const LocalKernel& kernel) {
  const std::size_t agents = prob.num_agents();
  RunTrace trace;
  trace.op_norm = op_norm;
  std::vector<AgentState> states = initial_states(prob, opts, trace.init_c_products);

  std::vector<std::vector<double>> kappas(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    for (const Neighbor& nb : g.neighbors(i)) kappas[i].push_back(s.kappa[nb.edge]);
  }
  std::vector<std::size_t> order = opts.broadcast_order;
  if (order.empty()) {
    order.resize(agents);
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != i || sorted.size() != agents) {
        throw InvalidParameter("run: broadcast_order must be a permutation of 0..N-1");
      }
    }
  }

  RoundMailbox mailbox(g, prob.dim());
  auto converged = [&](const RoundRecord& r) {
    if (term.reference) return r.rel_err <= term.tol;
    return r.round > 0 && r.fp_residual <= term.tol && r.dual_residual <= term.tol &&
           r.disagreement <= term.tol;
  };

  RoundRecord rec;
  rec.rel_err = term.reference ? max_relative_error(states, *term.reference) : kNaN;
  rec.disagreement = consensus_disagreement(states);
  rec.fp_residual = kNaN;
  rec.dual_residual = kNaN;
  trace.records.push_back(rec);
  if (opts.observer) opts.observer(0, states);

  bool done = converged(rec);
  if (done) trace.status = RunStatus::converged;

  std::vector<LocalStepResult> results(agents);
  std::vector<std::exception_ptr> errors(agents);
  for (std::int64_t k = 1; !done && k <= term.max_rounds; ++k) {
    detail::parallel_for(agents, opts.threads, [&](std::size_t i) {
      try {
        results[i] = kernel(i, states[i], k);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
    for (std::size_t i = 0; i < agents; ++i) {
      if (!errors[i]) continue;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const DivergenceError& e) {
        trace.status = RunStatus::diverged;
        trace.message = e.what();
        done = true;
        break;
      }
    }
    if (done) break;

    for (std::size_t i : order) mailbox.broadcast(i, results[i].u);
    detail::parallel_for(agents, opts.threads, [&](std::size_t i) {
      try {
        const std::vector<NeighborMessage> inbox = mailbox.collect(i);
        results[i].state.rho = exchange_step(states[i].rho, results[i].u, inbox, kappas[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
    for (std::size_t i = 0; i < agents; ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
    }
    mailbox.advance_round();

    rec = RoundRecord{};
    rec.round = k;
    rec.fp_residual = 0.0;
    rec.dual_residual = 0.0;
    for (std::size_t i = 0; i < agents; ++i) {
      const AgentState& next = results[i].state;
      rec.fp_residual = std::max(
          rec.fp_residual, (next.x - states[i].x).lpNorm<Eigen::Infinity>() / s.sigma[i]);
      if (next.y.size() > 0) {
        rec.dual_residual = std::max(
            rec.dual_residual, (next.y - states[i].y).lpNorm<Eigen::Infinity>() / s.tau[i]);
      }
      rec.dual_residual =
          std::max(rec.dual_residual, (next.rho - states[i].rho).lpNorm<Eigen::Infinity>());
      rec.c_products += results[i].c_products;
      states[i] = std::move(results[i].state);
      if (!done && !states[i].rho.allFinite()) {
        trace.status = RunStatus::diverged;
        trace.message = DivergenceError(i, k).what();
        done = true;
      }
    }
    if (done) {
      trace.records.push_back(rec);
      break;
    }
    rec.rel_err = term.reference ? max_relative_error(states, *term.reference) : kNaN;
    rec.disagreement = consensus_disagreement(states);
    trace.records.push_back(rec);
    if (opts.observer) opts.observer(k, states);
    if (converged(rec)) {
      trace.status = RunStatus::converged;
      done = true;
    }
  }
  if (!done) {
    trace.status = RunStatus::max_rounds;
    trace.message = "reached max_rounds = " + std::to_string(term.max_rounds);
  }
  trace.comm = mailbox.stats();
  trace.final_states = std::move(states);
  return trace;
}

void require_valid(const StepSizes& s, double op_norm) {
  const StepSizeCheck check = validate_stepsizes(s, op_norm);
  if (!check.ok) throw InvalidParameter(check.reason);
}

}  // namespace

RunTrace run(const ConsensusProblem& prob, const Graph& g, const StepSizes& s,
             const Termination& term, const RunOptions& opts) {
  check_inputs(prob, g, s, term);
  const double op_norm = opts.op_norm ? *opts.op_norm
                         : opts.exact_op_norm ? operator_norm_exact(prob, g)
                                              : operator_norm_bound(prob, g);
  require_valid(s, op_norm);
  auto kernel = [&](std::size_t i, const AgentState& st, std::int64_t round) {
    return local_step(st, prob.agent(i), s.sigma[i], s.tau[i], s.theta, i, round);
  };
  return drive(prob, g, s, term, opts, op_norm, kernel);
}

RunTrace run_reduced(const ConsensusProblem& prob, const Graph& g, const StepSizes& s,
                     const Termination& term, const RunOptions& opts) {
  if (!prob.uncoupled()) {
    throw InvalidUsage("run_reduced: every agent must have an empty C (no g term)");
  }
  check_inputs(prob, g, s, term);
  const double op_norm = opts.op_norm ? *opts.op_norm : laplacian_norm(g).bound();
  require_valid(s, op_norm);
  auto kernel = [&](std::size_t i, const AgentState& st, std::int64_t round) {
    LocalStepResult out;
    const Eigen::VectorXd v = st.x - s.sigma[i] * st.rho;
    if (!v.allFinite()) throw DivergenceError(i, round);
    out.state.x = prob.agent(i).f->prox(v, s.sigma[i]);
    out.state.y = st.y;
    out.state.rho = st.rho;
    out.state.cached_Cx = st.cached_Cx;
    out.u = 2.0 * out.state.x - st.x;
    if (!out.state.x.allFinite()) throw DivergenceError(i, round);
    return out;
  };
  return drive(prob, g, s, term, opts, op_norm, kernel);
}

}  // namespace afba
