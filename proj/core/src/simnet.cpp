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

#include "afba/simnet.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "afba/error.hpp"

namespace afba {

RoundMailbox::RoundMailbox(Graph graph, std::size_t dim)
    : graph_(std::move(graph)),
      dim_(dim),
      inbox_(graph_.num_nodes()),
      reverse_(graph_.num_nodes()),
      broadcast_done_(graph_.num_nodes(), 0),
      collect_done_(graph_.num_nodes(), 0) {
  for (std::size_t i = 0; i < graph_.num_nodes(); ++i) {
    const auto& nbrs = graph_.neighbors(i);
    inbox_[i].resize(nbrs.size());
    for (auto& slot : inbox_[i]) slot.value.resize(static_cast<Eigen::Index>(dim_));
    for (const Neighbor& nb : nbrs) {
      const auto& back = graph_.neighbors(nb.node);
      auto it = std::find_if(back.begin(), back.end(),
                             [i](const Neighbor& x) { return x.node == i; });
      reverse_[i].push_back(static_cast<std::size_t>(it - back.begin()));
    }
  }
}

void RoundMailbox::broadcast(std::size_t node, const Eigen::VectorXd& u) {
  if (node >= graph_.num_nodes()) throw InvalidParameter("broadcast: unknown node");
  if (u.size() != static_cast<Eigen::Index>(dim_)) {
    throw DimensionMismatch("broadcast: vector has wrong dimension");
  }
  if (broadcast_done_[node]) {
    throw ProtocolViolation("double broadcast in round " + std::to_string(round_), {node});
  }
  const auto& nbrs = graph_.neighbors(node);
  for (std::size_t p = 0; p < nbrs.size(); ++p) {
    Slot& slot = inbox_[nbrs[p].node][reverse_[node][p]];
    slot.value = u;
    slot.round = round_;
  }
  broadcast_done_[node] = 1;
  vectors_sent_.fetch_add(static_cast<std::int64_t>(nbrs.size()),
                          std::memory_order_relaxed);
}

std::vector<NeighborMessage> RoundMailbox::collect(std::size_t node) {
  if (node >= graph_.num_nodes()) throw InvalidParameter("collect: unknown node");
  const auto& nbrs = graph_.neighbors(node);
  std::vector<NeighborMessage> out;
  out.reserve(nbrs.size());
  std::vector<std::size_t> missing;
  for (std::size_t p = 0; p < nbrs.size(); ++p) {
    const Slot& slot = inbox_[node][p];
    if (slot.round != round_) {
      missing.push_back(nbrs[p].node);
      continue;
    }
    out.push_back({nbrs[p].node, &slot.value});
  }
  if (!missing.empty()) {
    throw ProtocolViolation("node " + std::to_string(node) + " read stale slots in round " +
                                std::to_string(round_),
                            std::move(missing));
  }
  collect_done_[node] = 1;
  return out;
}

void RoundMailbox::advance_round() {
  std::vector<std::size_t> lagging;
  for (std::size_t i = 0; i < graph_.num_nodes(); ++i) {
    if (!broadcast_done_[i]) lagging.push_back(i);
  }
  if (!lagging.empty()) {
    throw ProtocolViolation("advance_round with missing broadcasts", std::move(lagging));
  }
  for (std::size_t i = 0; i < graph_.num_nodes(); ++i) {
    if (!collect_done_[i]) lagging.push_back(i);
  }
  if (!lagging.empty()) {
    throw ProtocolViolation("advance_round with uncollected inboxes", std::move(lagging));
  }
  std::fill(broadcast_done_.begin(), broadcast_done_.end(), 0);
  std::fill(collect_done_.begin(), collect_done_.end(), 0);
  ++round_;
}

CommStats RoundMailbox::stats() const {
  CommStats s;
  s.rounds = round_;
  s.vectors_sent = vectors_sent_.load(std::memory_order_relaxed);
  s.bytes_sent = s.vectors_sent * static_cast<std::int64_t>(dim_) *
                 static_cast<std::int64_t>(sizeof(double));
  return s;
}

}  // namespace afba
