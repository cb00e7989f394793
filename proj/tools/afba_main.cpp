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

// afba: sweep theta x graph seeds on one lasso instance and write CSVs for
// round histograms and convergence traces.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "afba/error.hpp"
#include "afba/experiment.hpp"
#include "afba/instance_io.hpp"

namespace {

// "7", "1..200", or a comma list of either.
std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& specs) {
  std::vector<std::uint64_t> out;
  for (const std::string& spec : specs) {
    std::size_t start = 0;
    while (start <= spec.size()) {
      const std::size_t comma = spec.find(',', start);
      const std::string item =
          spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const std::size_t dots = item.find("..");
      try {
        if (dots == std::string::npos) {
          out.push_back(std::stoull(item));
        } else {
          const std::uint64_t lo = std::stoull(item.substr(0, dots));
          const std::uint64_t hi = std::stoull(item.substr(dots + 2));
          if (hi < lo) throw afba::InvalidParameter("empty seed range '" + item + "'");
          for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        }
      } catch (const std::logic_error&) {
        throw afba::InvalidParameter("bad graph seed '" + item + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed primal-dual consensus lasso experiments"};
  afba::ExperimentConfig cfg;
  std::vector<std::string> seed_specs{"1"};
  std::string out_dir = cfg.out_dir.string();
  std::string graph_file;
  std::string instance_dir;
  std::string save_instance;
  bool quiet = false;

  app.add_option("--nodes", cfg.nodes, "Number of agents N")->capture_default_str();
  app.add_option("--edge-prob", cfg.edge_prob, "Erdos-Renyi edge probability p")
      ->capture_default_str();
  app.add_option("--dim", cfg.dim, "Decision dimension n")->capture_default_str();
  app.add_option("--rows", cfg.rows, "Rows per agent m_i")->capture_default_str();
  app.add_option("--theta", cfg.thetas, "Theta value (repeatable)")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "Step-size scale alpha")->capture_default_str();
  app.add_option("--lambda-frac", cfg.lambda_frac,
                 "lambda as a fraction of ||sum D_i^T d_i||_inf")
      ->capture_default_str();
  app.add_option("--sparsity", cfg.sparsity, "Fraction of nonzeros in the planted vector")
      ->capture_default_str();
  app.add_option("--noise-std", cfg.noise_std, "Measurement noise standard deviation")
      ->capture_default_str();
  app.add_option("--tol", cfg.tol, "Relative-error tolerance")->capture_default_str();
  app.add_option("--max-rounds", cfg.max_rounds, "Round cap per run")->capture_default_str();
  app.add_option("--graph-seeds", seed_specs, "Graph seeds: 7, 1..200 or 1,4,9")
      ->capture_default_str();
  app.add_option("--data-seed", cfg.data_seed, "Seed of the lasso instance")
      ->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--graph-file", graph_file, "Edge list to use instead of random graphs");
  app.add_option("--instance", instance_dir, "Load a saved instance instead of generating");
  app.add_option("--save-instance", save_instance, "Also save the instance to this directory");
  app.add_flag("--exact-lnorm", cfg.exact_lnorm,
               "Power iteration on the full operator instead of the norm bound");
  app.add_option("--threads", cfg.threads, "Concurrent runs")->capture_default_str();
  app.add_flag("--verify-optimality", cfg.verify_optimality,
               "Report the optimality residual of every converged run");
  app.add_flag("-q,--quiet", quiet, "No per-run progress on stderr");
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.graph_seeds = parse_seeds(seed_specs);
    cfg.out_dir = out_dir;
    if (!graph_file.empty()) cfg.graph_file = graph_file;
    if (!instance_dir.empty()) cfg.instance_dir = instance_dir;

    auto progress = [quiet](const afba::ExperimentRun& r, std::size_t done, std::size_t total) {
      if (quiet) return;
      std::fprintf(stderr, "[%zu/%zu] theta=%s seed=%llu %s rounds=%lld rel_err=%.3e\n", done,
                   total, afba::format_theta(r.theta).c_str(),
                   static_cast<unsigned long long>(r.graph_seed), afba::to_string(r.status),
                   static_cast<long long>(r.rounds), r.final_rel_err);
    };
    const afba::ExperimentResult result = afba::run_experiment(cfg, progress);
    if (!save_instance.empty()) afba::save_lasso_instance(save_instance, result.instance);
    afba::emit_plot_data(result, cfg.out_dir);

    std::printf("%-8s %14s %10s %10s %10s\n", "theta", "median_rounds", "p25", "p75",
                "converged");
    for (const afba::ThetaSummary& s : result.summary) {
      std::printf("%-8s %14.1f %10.1f %10.1f %6zu/%zu\n", afba::format_theta(s.theta).c_str(),
                  s.median_rounds, s.p25, s.p75, s.n_converged, s.n_runs);
    }
    if (cfg.verify_optimality) {
      double worst = 0.0;
      for (const auto& r : result.runs) worst = std::max(worst, r.max_optimality_residual);
      std::printf("max optimality residual %.3e (lambda %.6g)\n", worst, result.instance.lambda);
    }
    return afba::exit_code(result);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "afba: %s\n", e.what());
    return 1;
  }
}
