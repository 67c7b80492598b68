// Copyright 2026 The privconsensus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVCONSENSUS_GRAPH_H_
#define PRIVCONSENSUS_GRAPH_H_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privconsensus/rng.h"

namespace privconsensus {

// Default lower bound on coupling weights of existing edges.
inline constexpr double kDefaultEta = 1e-3;

// A directed edge: `to` receives messages from `from`, i.e. L[to][from] > 0.
struct Edge {
  int from = 0;
  int to = 0;
  bool operator==(const Edge&) const = default;
};

struct NeighborView {
  int agent = 0;
  std::vector<int> in_neighbors;
  std::vector<int> out_neighbors;
  int degree = 0;  // |in_neighbors|
};

// Interaction topology with (possibly time-varying) coupling weights.
//
// Weights are a function of (i, j, k) returning L_ij[k], the weight agent i
// applies to the message it receives from agent j at iteration k. The
// function is only consulted for existing edges; non-edges weigh exactly 0.
// Self-loops are never stored. Immutable after construction.
class WeightedGraph {
 public:
  using WeightFn = std::function<double(int i, int j, int64_t k)>;

  // `edges` must list both directions of every link when `directed` is false.
  static absl::StatusOr<WeightedGraph> Create(int node_count,
                                              const std::vector<Edge>& edges,
                                              bool directed, WeightFn weight);

  // Each pair {a, b} becomes the two directed edges a->b and b->a.
  static absl::StatusOr<WeightedGraph> Undirected(
      int node_count, const std::vector<std::pair<int, int>>& links,
      WeightFn weight);

  static WeightFn ConstantWeight(double w);

  int node_count() const { return node_count_; }
  bool directed() const { return directed_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool HasEdge(int from, int to) const {
    return adjacency_[static_cast<size_t>(to) * node_count_ + from] != 0;
  }

  // L_ij[k]; zero when j is not an in-neighbor of i.
  double Weight(int i, int j, int64_t k) const {
    return HasEdge(j, i) ? weight_(i, j, k) : 0.0;
  }

  const std::vector<int>& InNeighbors(int i) const { return in_[i]; }
  const std::vector<int>& OutNeighbors(int i) const { return out_[i]; }
  NeighborView Neighbors(int i) const;

  // Undirected links {a < b}; for directed graphs, every (from, to) pair
  // whose skeleton link is present, reported once.
  std::vector<std::pair<int, int>> SkeletonLinks() const;

  const WeightFn& weight_fn() const { return weight_; }

 private:
  WeightedGraph() = default;

  int node_count_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::vector<char> adjacency_;  // [to * m + from]
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
  WeightFn weight_;
};

// Named topologies.
absl::StatusOr<WeightedGraph> CircleGraph(int m, double weight);
absl::StatusOr<WeightedGraph> PathGraph(int m, double weight);
absl::StatusOr<WeightedGraph> CompleteGraph(int m, double weight);
absl::StatusOr<WeightedGraph> ErdosRenyiGraph(int m, double p, double weight,
                                              Rng& rng);
// Five-agent topology used for the machine-learning comparison: a ring
// 0-1-2-3-4-0 plus the chord 0-2.
absl::StatusOr<WeightedGraph> FiveAgentGraph(double weight);
std::vector<std::pair<int, int>> FiveAgentLinks();

// Maximum in-neighbor count over all agents.
int MaxDegree(const WeightedGraph& g);

// Connectivity of the undirected skeleton, or strong connectivity when the
// graph is directed.
bool IsConnected(const WeightedGraph& g);

struct WeightViolation {
  enum class Kind { kBelowEta, kNotBelowOne, kAsymmetric };
  Kind kind;
  int i = 0;
  int j = 0;
  int64_t k = 0;
  double value = 0.0;          // L_ij[k]
  double reverse_value = 0.0;  // L_ji[k], for kAsymmetric
  std::string ToString() const;
};

struct WeightReport {
  std::vector<WeightViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks eta <= L_ij[k] < 1 on every edge for k in [0, horizon] and, for
// undirected graphs, L_ij[k] == L_ji[k]. Undirected links are checked once
// per unordered pair: an asymmetric pair yields one kAsymmetric entry plus a
// range entry for each direction out of range; a symmetric pair out of range
// yields a single range entry.
WeightReport ValidateWeights(const WeightedGraph& g, double eta,
                             int64_t horizon);

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_GRAPH_H_
