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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "afba/problem.hpp"
#include "afba/solver.hpp"

namespace afba {

/// Sweep over graph seeds x theta on one fixed lasso instance.
struct ExperimentConfig {
  std::size_t nodes = 50;
  double edge_prob = 0.05;
  std::size_t dim = 500;
  std::size_t rows = 50;
  std::vector<double> thetas = {0.0, 0.5, 1.5, 2.0};
  double alpha = 20.0;
  double lambda_frac = 0.05;
  double sparsity = 0.1;
  double noise_std = 0.0;
  double tol = 1e-6;
  std::int64_t max_rounds = 1000000;
  std::vector<std::uint64_t> graph_seeds = {1};
  std::uint64_t data_seed = 0;
  std::filesystem::path out_dir = "afba-out";
  std::optional<std::filesystem::path> graph_file;
  std::optional<std::filesystem::path> instance_dir;  // load instead of generating
  bool exact_lnorm = false;
  unsigned threads = 1;
  double oracle_tol = 1e-12;
  /// Also compute optimality_residual of every agent's final iterate, with
  /// entries below tol * ||x*||_inf treated as zeros.
  bool verify_optimality = false;
};

/// Throws InvalidParameter naming the first offending field.
void validate(const ExperimentConfig& cfg);

struct ExperimentRun {
  double theta = 0.0;
  std::uint64_t graph_seed = 0;
  RunStatus status = RunStatus::max_rounds;
  std::int64_t rounds = 0;
  std::vector<double> rel_err;  // one entry per record, round 0 first
  double op_norm = 0.0;
  double final_rel_err = 0.0;    // max over agents
  double final_disagreement = 0.0;
  double max_optimality_residual = 0.0;  // max over agents; 0 unless verified
  Eigen::VectorXd mean_x;
  CommStats comm;
  std::string message;
};

struct ThetaSummary {
  double theta = 0.0;
  double median_rounds = 0.0;  // NaN when nothing converged
  double p25 = 0.0;
  double p75 = 0.0;
  std::size_t n_converged = 0;
  std::size_t n_runs = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  LassoInstance instance;
  Eigen::VectorXd reference;  // oracle x*
  std::vector<ExperimentRun> runs;  // theta-major, seeds in config order
  std::vector<ThetaSummary> summary;
};

/// Called once per finished run, serialized, in completion order.
using ProgressCallback =
    std::function<void(const ExperimentRun& run, std::size_t done, std::size_t total)>;

/// Generates (or loads) one instance, solves it with the oracle, then runs
/// the distributed solver for every (theta, graph seed). Runs are spread over
/// cfg.threads workers; results do not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const ProgressCallback& progress = {});

/// Linear-interpolation percentile (q in [0, 1]) of unsorted data.
double percentile(std::vector<double> values, double q);

std::vector<ThetaSummary> summarize(const std::vector<ExperimentRun>& runs,
                                    const std::vector<double>& thetas);

/// Writes histogram.csv, summary.csv, config.json and trace_<theta>_<seed>.csv
/// into out_dir. Throws IoError when the directory cannot be written.
void emit_plot_data(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// 0 if all runs converged, 3 if any diverged, otherwise 2.
int exit_code(const ExperimentResult& result);

/// "%.17g"
std::string format_double(double v);
/// Short form used in file names ("0", "0.5", "1.5", "2").
std::string format_theta(double theta);

}  // namespace afba
