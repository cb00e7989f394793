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

#include "afba/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "afba/error.hpp"
#include "afba/instance_io.hpp"
#include "parallel.hpp"

namespace afba {

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what) { throw InvalidParameter("config: " + what); };
  if (cfg.nodes == 0) fail("nodes must be positive");
  if (!(cfg.edge_prob > 0.0 && cfg.edge_prob <= 1.0)) fail("edge-prob must lie in (0, 1]");
  if (cfg.dim == 0 || cfg.rows == 0) fail("dim and rows must be positive");
  if (cfg.thetas.empty()) fail("at least one theta is required");
  for (double t : cfg.thetas) {
    if (!(t >= 0.0) || !std::isfinite(t)) fail("theta values must be finite and >= 0");
  }
  if (!(cfg.alpha > 0.0)) fail("alpha must be positive");
  if (!(cfg.tol > 0.0)) fail("tol must be positive");
  if (cfg.max_rounds < 0) fail("max-rounds must be nonnegative");
  if (cfg.graph_seeds.empty() && !cfg.graph_file) fail("at least one graph seed is required");
  if (!(cfg.oracle_tol > 0.0)) fail("oracle tolerance must be positive");
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<ThetaSummary> summarize(const std::vector<ExperimentRun>& runs,
                                    const std::vector<double>& thetas) {
  std::vector<ThetaSummary> out;
  for (double theta : thetas) {
    ThetaSummary s;
    s.theta = theta;
    std::vector<double> rounds;
    for (const ExperimentRun& r : runs) {
      if (r.theta != theta) continue;
      ++s.n_runs;
      if (r.status == RunStatus::converged) rounds.push_back(static_cast<double>(r.rounds));
    }
    s.n_converged = rounds.size();
    s.median_rounds = percentile(rounds, 0.5);
    s.p25 = percentile(rounds, 0.25);
    s.p75 = percentile(rounds, 0.75);
    out.push_back(s);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress) {
  validate(cfg);
  LassoInstance instance = [&] {
    if (cfg.instance_dir) return load_lasso_instance(*cfg.instance_dir);
    LassoParams params;
    params.agents = cfg.nodes;
    params.dim = cfg.dim;
    params.rows = cfg.rows;
    params.sparsity = cfg.sparsity;
    params.lambda_frac = cfg.lambda_frac;
    params.noise_std = cfg.noise_std;
    params.seed = cfg.data_seed;
    return generate_lasso(params);
  }();
  OracleOptions oracle_opts;
  oracle_opts.tol = cfg.oracle_tol;
  Eigen::VectorXd reference = oracle_solve(instance, oracle_opts).x;
  const ConsensusProblem& prob = instance.problem;

  std::vector<std::uint64_t> seeds = cfg.graph_seeds;
  std::vector<Graph> graphs;
  if (cfg.graph_file) {
    seeds = {0};
    graphs.push_back(load_edge_list(*cfg.graph_file));
  } else {
    for (std::uint64_t seed : seeds) {
      graphs.push_back(erdos_renyi(prob.num_agents(), cfg.edge_prob, seed));
    }
  }
  for (const Graph& g : graphs) {
    if (g.num_nodes() != prob.num_agents()) {
      throw DimensionMismatch("graph has " + std::to_string(g.num_nodes()) +
                              " nodes, instance has " + std::to_string(prob.num_agents()) +
                              " agents");
    }
  }

  // Norm per graph: the coupling part depends only on the data.
  std::vector<double> norms(graphs.size());
  if (cfg.exact_lnorm) {
    detail::parallel_for(graphs.size(), cfg.threads, [&](std::size_t k) {
      norms[k] = operator_norm_exact(prob, graphs[k]);
    });
  } else {
    const double coupling = max_coupling_norm_sq(prob);
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      norms[k] = laplacian_norm(graphs[k]).bound() + coupling;
    }
  }

  const std::size_t jobs = cfg.thetas.size() * graphs.size();
  std::vector<ExperimentRun> runs(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::size_t finished = 0;
  auto worker = [&] {
    // Jobs are handed out seed by seed so a partial sweep covers every theta;
    // results are stored theta-major.
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t t = job % cfg.thetas.size();
      const std::size_t k = job / cfg.thetas.size();
      const std::size_t slot = t * graphs.size() + k;
      ExperimentRun& out = runs[slot];
      out.theta = cfg.thetas[t];
      out.graph_seed = seeds[k];
      out.op_norm = norms[k];
      try {
        const StepSizes steps = default_stepsizes(out.theta, cfg.alpha, norms[k], graphs[k]);
        RunOptions opts;
        opts.op_norm = norms[k];
        const RunTrace trace =
            run(prob, graphs[k], steps,
                Termination::relative_error(reference, cfg.tol, cfg.max_rounds), opts);
        out.status = trace.status;
        out.rounds = trace.rounds();
        out.comm = trace.comm;
        out.message = trace.message;
        out.rel_err.reserve(trace.records.size());
        for (const RoundRecord& r : trace.records) out.rel_err.push_back(r.rel_err);
        out.final_rel_err = trace.records.back().rel_err;
        out.final_disagreement = trace.records.back().disagreement;
        out.mean_x = trace.mean_x();
        if (cfg.verify_optimality && trace.status == RunStatus::converged) {
          // Entries inside the certified tolerance band count as zeros.
          const double zero_tol = cfg.tol * reference.lpNorm<Eigen::Infinity>();
          for (const AgentState& st : trace.final_states) {
            out.max_optimality_residual = std::max(out.max_optimality_residual,
                                                   optimality_residual(instance, st.x, zero_tol));
          }
        }
      } catch (...) {
        errors[slot] = std::current_exception();
      }
      if (progress && !errors[slot]) {
        std::lock_guard lock(progress_mutex);
        progress(out, ++finished, jobs);
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(jobs)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result{cfg, std::move(instance), std::move(reference), std::move(runs), {}};
  result.summary = summarize(result.runs, cfg.thetas);
  return result;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_theta(double theta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", theta);
  return buf;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::ordered_json config_echo(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["nodes"] = cfg.nodes;
  j["edge_prob"] = cfg.edge_prob;
  j["dim"] = cfg.dim;
  j["rows"] = cfg.rows;
  j["thetas"] = cfg.thetas;
  j["alpha"] = cfg.alpha;
  j["lambda_frac"] = cfg.lambda_frac;
  j["sparsity"] = cfg.sparsity;
  j["noise_std"] = cfg.noise_std;
  j["tol"] = cfg.tol;
  j["max_rounds"] = cfg.max_rounds;
  j["graph_seeds"] = cfg.graph_seeds;
  j["data_seed"] = cfg.data_seed;
  j["graph_file"] = cfg.graph_file ? cfg.graph_file->filename().string() : "";
  j["instance_dir"] = cfg.instance_dir ? cfg.instance_dir->filename().string() : "";
  j["exact_lnorm"] = cfg.exact_lnorm;
  j["oracle_tol"] = cfg.oracle_tol;
  return j;
}

}  // namespace

void emit_plot_data(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  if (result.runs.empty()) throw InvalidParameter("emit_plot_data: no runs to write");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const auto hist_path = out_dir / "histogram.csv";
  std::ofstream hist = open_output(hist_path);
  hist << "theta,graph_seed,rounds,status\n";
  for (const ExperimentRun& r : result.runs) {
    hist << format_double(r.theta) << ',' << r.graph_seed << ',' << r.rounds << ','
         << to_string(r.status) << '\n';
  }
  finish(hist, hist_path);

  for (const ExperimentRun& r : result.runs) {
    const auto path = out_dir / ("trace_" + format_theta(r.theta) + "_" +
                                 std::to_string(r.graph_seed) + ".csv");
    std::ofstream trace = open_output(path);
    trace << "round,rel_err\n";
    for (std::size_t k = 0; k < r.rel_err.size(); ++k) {
      trace << k << ',' << format_double(r.rel_err[k]) << '\n';
    }
    finish(trace, path);
  }

  const auto summary_path = out_dir / "summary.csv";
  std::ofstream summary = open_output(summary_path);
  summary << "theta,median_rounds,p25,p75,n_converged\n";
  for (const ThetaSummary& s : result.summary) {
    summary << format_double(s.theta) << ',' << format_double(s.median_rounds) << ','
            << format_double(s.p25) << ',' << format_double(s.p75) << ',' << s.n_converged
            << '\n';
  }
  finish(summary, summary_path);

  const auto config_path = out_dir / "config.json";
  std::ofstream config = open_output(config_path);
  config << config_echo(result.config).dump(2) << '\n';
  finish(config, config_path);
}

int exit_code(const ExperimentResult& result) {
  bool capped = false;
  for (const ExperimentRun& r : result.runs) {
    if (r.status == RunStatus::diverged) return 3;
    if (r.status == RunStatus::max_rounds) capped = true;
  }
  return capped ? 2 : 0;
}

}  // namespace afba
