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
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include "afba/error.hpp"
#include "afba/experiment.hpp"
#include "afba/instance_io.hpp"

using namespace afba;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.nodes = 5;
  cfg.edge_prob = 0.6;
  cfg.dim = 20;
  cfg.rows = 10;
  cfg.thetas = {1.5};
  cfg.graph_seeds = {1};
  cfg.data_seed = 3;
  return cfg;
}

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("afba_test_exp_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> directory_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    out[entry.path().filename().string()] = slurp(entry.path());
  }
  return out;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig cfg = tiny_config();
  CHECK_NOTHROW(validate(cfg));
  cfg.tol = 0.0;
  CHECK_THROWS_AS(validate(cfg), InvalidParameter);
  cfg = tiny_config();
  cfg.thetas = {1.5, -0.5};
  CHECK_THROWS_AS(validate(cfg), InvalidParameter);
  cfg = tiny_config();
  cfg.graph_seeds.clear();
  CHECK_THROWS_AS(validate(cfg), InvalidParameter);
  cfg = tiny_config();
  cfg.edge_prob = 0.0;
  CHECK_THROWS_AS(validate(cfg), InvalidParameter);
}

TEST_CASE("percentile and summaries") {
  CHECK(percentile({3, 1, 2}, 0.5) == 2.0);
  CHECK(percentile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(percentile({1, 2, 3, 4, 5}, 0.25) == 2.0);
  CHECK(percentile({7}, 0.75) == 7.0);
  CHECK(std::isnan(percentile({}, 0.5)));

  std::vector<ExperimentRun> runs(4);
  runs[0] = {.theta = 1.5, .status = RunStatus::converged, .rounds = 10};
  runs[1] = {.theta = 1.5, .status = RunStatus::converged, .rounds = 30};
  runs[2] = {.theta = 1.5, .status = RunStatus::max_rounds, .rounds = 1000};
  runs[3] = {.theta = 2.0, .status = RunStatus::diverged, .rounds = 3};
  auto summary = summarize(runs, {1.5, 2.0});
  REQUIRE(summary.size() == 2);
  CHECK(summary[0].median_rounds == 20.0);
  CHECK(summary[0].n_converged == 2);
  CHECK(summary[0].n_runs == 3);
  CHECK(std::isnan(summary[1].median_rounds));
  CHECK(summary[1].n_converged == 0);
}

TEST_CASE("number formatting") {
  CHECK(format_theta(0.0) == "0");
  CHECK(format_theta(0.5) == "0.5");
  CHECK(format_theta(1.5) == "1.5");
  CHECK(format_theta(2.0) == "2");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("tiny smoke run against the oracle") {
  ExperimentConfig cfg = tiny_config();
  cfg.verify_optimality = true;
  ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.runs.size() == 1);
  const ExperimentRun& r = res.runs[0];
  CHECK(r.status == RunStatus::converged);
  CHECK(r.final_rel_err <= cfg.tol);
  CHECK(r.rel_err.size() == static_cast<std::size_t>(r.rounds) + 1);
  CHECK(r.comm.rounds == r.rounds);
  CHECK(r.max_optimality_residual > 0.0);
  CHECK(exit_code(res) == 0);

  // A tighter tolerance certifies optimality directly.
  cfg.tol = 1e-10;
  ExperimentResult tight = run_experiment(cfg);
  REQUIRE(tight.runs[0].status == RunStatus::converged);
  CHECK(tight.runs[0].max_optimality_residual <= 1e-5 * tight.instance.lambda);
}

TEST_CASE("loose tolerance converges at round zero") {
  ExperimentConfig cfg = tiny_config();
  cfg.tol = 2.0;
  ExperimentResult res = run_experiment(cfg);
  CHECK(res.runs[0].status == RunStatus::converged);
  CHECK(res.runs[0].rounds == 0);
  const fs::path dir = scratch_dir("zero");
  emit_plot_data(res, dir);
  CHECK(slurp(dir / "trace_1.5_1.csv") == "round,rel_err\n0,1\n");
  fs::remove_all(dir);
}

TEST_CASE("round cap and exit codes") {
  ExperimentConfig cfg = tiny_config();
  cfg.max_rounds = 3;
  ExperimentResult res = run_experiment(cfg);
  CHECK(res.runs[0].status == RunStatus::max_rounds);
  CHECK(exit_code(res) == 2);
  res.runs[0].status = RunStatus::diverged;
  CHECK(exit_code(res) == 3);
}

TEST_CASE("emitted files") {
  ExperimentConfig cfg = tiny_config();
  cfg.thetas = {0.0, 2.0};
  cfg.graph_seeds = {1, 2, 3};
  ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.runs.size() == 6);
  CHECK(res.runs[0].theta == 0.0);
  CHECK(res.runs[2].graph_seed == 3);
  CHECK(res.runs[3].theta == 2.0);
  const fs::path dir = scratch_dir("files");
  emit_plot_data(res, dir);

  const std::string hist = slurp(dir / "histogram.csv");
  CHECK(hist.rfind("theta,graph_seed,rounds,status\n", 0) == 0);
  CHECK(count_lines(hist) == 7);
  CHECK(hist.back() == '\n');

  const std::string trace = slurp(dir / "trace_2_3.csv");
  CHECK(count_lines(trace) == static_cast<std::size_t>(res.runs[5].rounds) + 2);
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.rfind("theta,median_rounds,p25,p75,n_converged\n", 0) == 0);
  CHECK(count_lines(summary) == 3);
  CHECK(fs::exists(dir / "config.json"));

  // 17 significant digits survive a text round trip.
  std::istringstream lines(trace);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  std::getline(lines, line);
  const double parsed = std::stod(line.substr(line.find(',') + 1));
  CHECK(parsed == res.runs[5].rel_err[1]);
  fs::remove_all(dir);
}

TEST_CASE("output is byte-identical across reruns and thread counts") {
  ExperimentConfig cfg = tiny_config();
  cfg.thetas = {0.5, 1.5};
  cfg.graph_seeds = {4, 5};
  const fs::path a = scratch_dir("det_a");
  const fs::path b = scratch_dir("det_b");
  emit_plot_data(run_experiment(cfg), a);
  cfg.threads = 3;
  emit_plot_data(run_experiment(cfg), b);
  CHECK(directory_contents(a) == directory_contents(b));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("graph file and saved instance bypass generation") {
  ExperimentConfig cfg = tiny_config();
  const fs::path dir = scratch_dir("inputs");
  fs::create_directories(dir);
  save_edge_list(dir / "ring.txt", Graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}));
  LassoParams p;
  p.agents = 5;
  p.dim = 20;
  p.rows = 10;
  p.seed = 3;
  save_lasso_instance(dir / "inst", generate_lasso(p));
  cfg.graph_file = dir / "ring.txt";
  cfg.instance_dir = dir / "inst";
  ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.runs.size() == 1);
  CHECK(res.runs[0].graph_seed == 0);
  CHECK(res.runs[0].status == RunStatus::converged);

  save_edge_list(dir / "small.txt", path_graph(3));
  cfg.graph_file = dir / "small.txt";
  CHECK_THROWS_AS(run_experiment(cfg), DimensionMismatch);
  fs::remove_all(dir);
}

TEST_CASE("unwritable output directory") {
  ExperimentConfig cfg = tiny_config();
  cfg.tol = 2.0;
  ExperimentResult res = run_experiment(cfg);
  const fs::path blocker = scratch_dir("blocker");
  std::ofstream(blocker) << "not a directory";
  CHECK_THROWS_AS(emit_plot_data(res, blocker / "sub"), IoError);
  fs::remove(blocker);
}
