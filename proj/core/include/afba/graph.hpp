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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace afba {

/// Oriented edge. The smaller endpoint is the head (+1 in the incidence
/// matrix), the larger the tail (-1).
struct Edge {
  std::size_t head;
  std::size_t tail;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  std::size_t node;
  std::size_t edge;  // index into Graph::edges()
};

/// Undirected simple graph on nodes 0..N-1.
///
/// Edges are stored once, oriented (min, max). Neighbor lists are derived
/// from the edge list and sorted by node id, which fixes the summation order
/// of every per-node reduction downstream.
class Graph {
 public:
  /// Throws InvalidParameter on out-of-range endpoints, self-loops, duplicate
  /// edges, or num_nodes == 0.
  Graph(std::size_t num_nodes,
        const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t num_nodes() const { return neighbors_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Neighbor>& neighbors(std::size_t node) const {
    return neighbors_.at(node);
  }
  std::size_t degree(std::size_t node) const { return neighbors(node).size(); }
  std::size_t max_degree() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.edges_ == b.edges_ && a.neighbors_.size() == b.neighbors_.size();
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> neighbors_;
};

Graph complete_graph(std::size_t n);
Graph path_graph(std::size_t n);
/// Node 0 joined to every other node.
Graph star_graph(std::size_t n);

/// One Erdos-Renyi G(n, p) draw with no connectivity filter. Pairs are
/// visited in lexicographic order, each kept independently with probability p.
Graph sample_erdos_renyi(std::size_t n, double p, std::uint64_t seed,
                         std::uint64_t attempt = 0);

/// Connected Erdos-Renyi graph. Disconnected draws are discarded and the
/// sampler retried with attempt = 1, 2, ... up to retry_limit.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed,
                  int retry_limit = 1000);

/// Breadth-first reachability from node 0.
bool is_connected(const Graph& g);

/// N x M oriented node-arc incidence matrix.
Eigen::MatrixXd incidence_matrix(const Graph& g);

/// N x N graph Laplacian, degree on the diagonal and -1 per edge.
Eigen::MatrixXd laplacian(const Graph& g);

/// y = (L (x) I_n) x for a stacked vector of N blocks of size block_dim,
/// computed from adjacency lists without forming L.
Eigen::VectorXd apply_laplacian(const Graph& g, const Eigen::VectorXd& x,
                                std::size_t block_dim = 1);

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct PowerIterationOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 0;
};

struct SpectralEstimate {
  double value = 0.0;  // Rayleigh quotient at exit
  int iterations = 0;
  double tol = 0.0;

  /// Estimate inflated by (1 + tol); this is what step-size rules consume.
  double bound() const { return value * (1.0 + tol); }
};

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration, stopping once the Rayleigh quotient changes by less than tol
/// relative. Throws EstimationFailure after max_iter iterations.
SpectralEstimate spectral_norm(const LinearOperator& apply, std::size_t dim,
                               const PowerIterationOptions& opts = {});

/// Spectral norm of the graph Laplacian.
SpectralEstimate laplacian_norm(const Graph& g,
                                const PowerIterationOptions& opts = {});

/// Edge-list text format: "N M" then M lines "i j", 1-based.
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);
Graph load_edge_list(const std::filesystem::path& path);
void save_edge_list(const std::filesystem::path& path, const Graph& g);

}  // namespace afba
