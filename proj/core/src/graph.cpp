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

#include "afba/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "afba/error.hpp"
#include "afba/random.hpp"

namespace afba {

Graph::Graph(std::size_t num_nodes,
             const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : neighbors_(num_nodes) {
  if (num_nodes == 0) throw InvalidParameter("graph needs at least one node");
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= num_nodes || b >= num_nodes) {
      throw InvalidParameter("edge (" + std::to_string(a) + ", " +
                             std::to_string(b) + ") out of range for " +
                             std::to_string(num_nodes) + " nodes");
    }
    if (a == b) {
      throw InvalidParameter("self-loop at node " + std::to_string(a));
    }
    edges_.push_back({std::min(a, b), std::max(a, b)});
  }
  std::vector<Edge> sorted = edges_;
  std::sort(sorted.begin(), sorted.end(), [](const Edge& x, const Edge& y) {
    return std::pair(x.head, x.tail) < std::pair(y.head, y.tail);
  });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidParameter("duplicate edge in edge list");
  }
  for (std::size_t l = 0; l < edges_.size(); ++l) {
    neighbors_[edges_[l].head].push_back({edges_[l].tail, l});
    neighbors_[edges_[l].tail].push_back({edges_[l].head, l});
  }
  for (auto& list : neighbors_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }
}

std::size_t Graph::max_degree() const {
  std::size_t d = 0;
  for (const auto& list : neighbors_) d = std::max(d, list.size());
  return d;
}

Graph complete_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph(n, edges);
}

Graph path_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, edges);
}

Graph star_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
  return Graph(n, edges);
}

Graph sample_erdos_renyi(std::size_t n, double p, std::uint64_t seed,
                         std::uint64_t attempt) {
  if (n == 0) throw InvalidParameter("erdos_renyi: n_nodes must be positive");
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParameter("erdos_renyi: p must lie in (0, 1]");
  }
  Rng rng = make_rng(seed, attempt);
  std::bernoulli_distribution keep(p);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (keep(rng)) edges.emplace_back(i, j);
  return Graph(n, edges);
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed,
                  int retry_limit) {
  for (int attempt = 0; attempt <= retry_limit; ++attempt) {
    Graph g = sample_erdos_renyi(n, p, seed, static_cast<std::uint64_t>(attempt));
    if (is_connected(g)) return g;
  }
  throw GenerationFailure(n, p, seed);
}

bool is_connected(const Graph& g) {
  std::vector<bool> seen(g.num_nodes(), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    std::size_t v = frontier.front();
    frontier.pop();
    for (const Neighbor& nb : g.neighbors(v)) {
      if (!seen[nb.node]) {
        seen[nb.node] = true;
        ++reached;
        frontier.push(nb.node);
      }
    }
  }
  return reached == g.num_nodes();
}

Eigen::MatrixXd incidence_matrix(const Graph& g) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(g.num_nodes()),
      static_cast<Eigen::Index>(g.num_edges()));
  for (std::size_t l = 0; l < g.num_edges(); ++l) {
    const Edge& e = g.edges()[l];
    b(static_cast<Eigen::Index>(e.head), static_cast<Eigen::Index>(l)) = 1.0;
    b(static_cast<Eigen::Index>(e.tail), static_cast<Eigen::Index>(l)) = -1.0;
  }
  return b;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const auto i = static_cast<Eigen::Index>(e.head);
    const auto j = static_cast<Eigen::Index>(e.tail);
    lap(i, j) = -1.0;
    lap(j, i) = -1.0;
    lap(i, i) += 1.0;
    lap(j, j) += 1.0;
  }
  return lap;
}

Eigen::VectorXd apply_laplacian(const Graph& g, const Eigen::VectorXd& x,
                                std::size_t block_dim) {
  const auto bd = static_cast<Eigen::Index>(block_dim);
  if (x.size() != static_cast<Eigen::Index>(g.num_nodes()) * bd) {
    throw DimensionMismatch("apply_laplacian: vector size does not match graph");
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    auto yi = y.segment(static_cast<Eigen::Index>(i) * bd, bd);
    auto xi = x.segment(static_cast<Eigen::Index>(i) * bd, bd);
    for (const Neighbor& nb : g.neighbors(i)) {
      yi += xi - x.segment(static_cast<Eigen::Index>(nb.node) * bd, bd);
    }
  }
  return y;
}

SpectralEstimate spectral_norm(const LinearOperator& apply, std::size_t dim,
                               const PowerIterationOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidParameter("spectral_norm: tol must be positive");
  if (dim == 0) return {0.0, 0, opts.tol};

  Rng rng = make_rng(opts.seed, 0x5eed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
  v.normalize();

  double estimate = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd w = apply(v);
    if (w.size() != v.size()) {
      throw DimensionMismatch("spectral_norm: operator changed the dimension");
    }
    const double rayleigh = v.dot(w);
    const double wnorm = w.norm();
    if (wnorm == 0.0) return {0.0, it, opts.tol};
    if (it > 1 && std::abs(rayleigh - estimate) <= opts.tol * std::abs(rayleigh)) {
      return {rayleigh, it, opts.tol};
    }
    estimate = rayleigh;
    v = w / wnorm;
  }
  throw EstimationFailure(estimate, opts.max_iter);
}

SpectralEstimate laplacian_norm(const Graph& g,
                                const PowerIterationOptions& opts) {
  return spectral_norm(
      [&g](const Eigen::VectorXd& x) { return apply_laplacian(g, x, 1); },
      g.num_nodes(), opts);
}

Graph read_edge_list(std::istream& in) {
  std::size_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw IoError("edge list: missing \"N M\" header");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(m);
  for (std::size_t l = 0; l < m; ++l) {
    std::size_t i = 0;
    std::size_t j = 0;
    if (!(in >> i >> j)) {
      throw IoError("edge list: expected " + std::to_string(m) +
                    " edges, read " + std::to_string(l));
    }
    if (i == 0 || j == 0) throw IoError("edge list: node ids are 1-based");
    edges.emplace_back(i - 1, j - 1);
  }
  return Graph(n, edges);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.head + 1 << ' ' << e.tail + 1 << '\n';
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file " + path.string());
  return read_edge_list(in);
}

void save_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file " + path.string());
  write_edge_list(out, g);
}

}  // namespace afba
