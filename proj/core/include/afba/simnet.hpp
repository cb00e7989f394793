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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "afba/graph.hpp"

namespace afba {

struct CommStats {
  std::int64_t rounds = 0;
  std::int64_t vectors_sent = 0;
  std::int64_t bytes_sent = 0;  // vectors_sent * dim * sizeof(double)
};

/// A vector received from one neighbor; points into the mailbox slot and is
/// valid until the next advance_round().
struct NeighborMessage {
  std::size_t node;
  const Eigen::VectorXd* u;
};

/// In-process bulk-synchronous message exchange over a fixed graph.
///
/// One slot per directed pair (j -> i). A round is: every node broadcasts
/// exactly once, every node collects its inbox, then advance_round(). Any
/// deviation raises ProtocolViolation.
///
/// broadcast() and collect() may run concurrently for distinct nodes as long
/// as all broadcasts of a round complete before the first collect();
/// advance_round() needs exclusive access.
class RoundMailbox {
 public:
  RoundMailbox(Graph graph, std::size_t dim);

  void broadcast(std::size_t node, const Eigen::VectorXd& u);

  /// Messages for node, ordered by ascending neighbor id. Every slot is
  /// checked to hold a vector written in the current round.
  std::vector<NeighborMessage> collect(std::size_t node);

  void advance_round();

  std::int64_t round() const { return round_; }
  std::size_t dim() const { return dim_; }
  const Graph& graph() const { return graph_; }
  CommStats stats() const;

 private:
  struct Slot {
    Eigen::VectorXd value;
    std::int64_t round = -1;
  };

  Graph graph_;
  std::size_t dim_;
  std::int64_t round_ = 0;
  // inbox_[i][p] holds the message from graph_.neighbors(i)[p].node.
  std::vector<std::vector<Slot>> inbox_;
  // reverse_[j][p]: position of j inside neighbors(neighbors(j)[p].node).
  std::vector<std::vector<std::size_t>> reverse_;
  std::vector<char> broadcast_done_;
  std::vector<char> collect_done_;
  std::atomic<std::int64_t> vectors_sent_{0};
};

}  // namespace afba
