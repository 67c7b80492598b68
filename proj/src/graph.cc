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

#include "privconsensus/graph.h"

#include <algorithm>
#include <deque>

#include "absl/strings/str_cat.h"
#include "privconsensus/status_macros.h"

namespace privconsensus {
namespace {

std::vector<char> Reachable(int m, int start,
                            const std::vector<std::vector<int>>& next) {
  std::vector<char> seen(m, 0);
  std::deque<int> queue{start};
  seen[start] = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : next[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

bool AllSeen(const std::vector<char>& seen) {
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace

absl::StatusOr<WeightedGraph> WeightedGraph::Create(
    int node_count, const std::vector<Edge>& edges, bool directed,
    WeightFn weight) {
  if (node_count < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("graph.nodes must be positive, got ", node_count));
  }
  if (!weight) {
    return absl::InvalidArgumentError("graph weight function is empty");
  }
  WeightedGraph g;
  g.node_count_ = node_count;
  g.directed_ = directed;
  g.adjacency_.assign(static_cast<size_t>(node_count) * node_count, 0);
  g.in_.resize(node_count);
  g.out_.resize(node_count);
  g.weight_ = std::move(weight);
  for (const Edge& e : edges) {
    if (e.from < 0 || e.from >= node_count || e.to < 0 ||
        e.to >= node_count) {
      return absl::InvalidArgumentError(
          absl::StrCat("graph.edges: edge (", e.from, ", ", e.to,
                       ") references a node outside [0, ", node_count, ")"));
    }
    if (e.from == e.to) {
      return absl::InvalidArgumentError(
          absl::StrCat("graph.edges: self-loop on node ", e.from));
    }
    char& slot = g.adjacency_[static_cast<size_t>(e.to) * node_count + e.from];
    if (slot) {
      return absl::InvalidArgumentError(absl::StrCat(
          "graph.edges: duplicate edge (", e.from, ", ", e.to, ")"));
    }
    slot = 1;
    g.edges_.push_back(e);
    g.in_[e.to].push_back(e.from);
    g.out_[e.from].push_back(e.to);
  }
  if (!directed) {
    for (const Edge& e : g.edges_) {
      if (!g.HasEdge(e.to, e.from)) {
        return absl::InvalidArgumentError(
            absl::StrCat("graph.edges: undirected graph lacks reverse of (",
                         e.from, ", ", e.to, ")"));
      }
    }
  }
  for (int i = 0; i < node_count; ++i) {
    std::sort(g.in_[i].begin(), g.in_[i].end());
    std::sort(g.out_[i].begin(), g.out_[i].end());
  }
  return g;
}

absl::StatusOr<WeightedGraph> WeightedGraph::Undirected(
    int node_count, const std::vector<std::pair<int, int>>& links,
    WeightFn weight) {
  std::vector<Edge> edges;
  edges.reserve(links.size() * 2);
  for (const auto& [a, b] : links) {
    edges.push_back({a, b});
    edges.push_back({b, a});
  }
  return Create(node_count, edges, /*directed=*/false, std::move(weight));
}

WeightedGraph::WeightFn WeightedGraph::ConstantWeight(double w) {
  return [w](int, int, int64_t) { return w; };
}

NeighborView WeightedGraph::Neighbors(int i) const {
  NeighborView view;
  view.agent = i;
  view.in_neighbors = in_[i];
  view.out_neighbors = out_[i];
  view.degree = static_cast<int>(in_[i].size());
  return view;
}

std::vector<std::pair<int, int>> WeightedGraph::SkeletonLinks() const {
  std::vector<std::pair<int, int>> links;
  for (int a = 0; a < node_count_; ++a) {
    for (int b = a + 1; b < node_count_; ++b) {
      if (HasEdge(a, b) || HasEdge(b, a)) links.emplace_back(a, b);
    }
  }
  return links;
}

absl::StatusOr<WeightedGraph> CircleGraph(int m, double weight) {
  std::vector<std::pair<int, int>> links;
  if (m == 2) {
    links.emplace_back(0, 1);
  } else if (m >= 3) {
    for (int i = 0; i < m; ++i) links.emplace_back(i, (i + 1) % m);
  }
  return WeightedGraph::Undirected(m, links,
                                   WeightedGraph::ConstantWeight(weight));
}

absl::StatusOr<WeightedGraph> PathGraph(int m, double weight) {
  std::vector<std::pair<int, int>> links;
  for (int i = 0; i + 1 < m; ++i) links.emplace_back(i, i + 1);
  return WeightedGraph::Undirected(m, links,
                                   WeightedGraph::ConstantWeight(weight));
}

absl::StatusOr<WeightedGraph> CompleteGraph(int m, double weight) {
  std::vector<std::pair<int, int>> links;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) links.emplace_back(a, b);
  }
  return WeightedGraph::Undirected(m, links,
                                   WeightedGraph::ConstantWeight(weight));
}

absl::StatusOr<WeightedGraph> ErdosRenyiGraph(int m, double p, double weight,
                                              Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("edge probability must lie in [0, 1], got ", p));
  }
  std::vector<std::pair<int, int>> links;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      if (rng.Uniform01() < p) links.emplace_back(a, b);
    }
  }
  return WeightedGraph::Undirected(m, links,
                                   WeightedGraph::ConstantWeight(weight));
}

std::vector<std::pair<int, int>> FiveAgentLinks() {
  return {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}};
}

absl::StatusOr<WeightedGraph> FiveAgentGraph(double weight) {
  return WeightedGraph::Undirected(5, FiveAgentLinks(),
                                   WeightedGraph::ConstantWeight(weight));
}

int MaxDegree(const WeightedGraph& g) {
  size_t best = 0;
  for (int i = 0; i < g.node_count(); ++i) {
    best = std::max(best, g.InNeighbors(i).size());
  }
  return static_cast<int>(best);
}

bool IsConnected(const WeightedGraph& g) {
  const int m = g.node_count();
  if (m <= 1) return true;
  std::vector<std::vector<int>> forward(m);
  std::vector<std::vector<int>> backward(m);
  for (const Edge& e : g.edges()) {
    forward[e.from].push_back(e.to);
    backward[e.to].push_back(e.from);
  }
  if (!g.directed()) {
    // Undirected skeleton: both directions are present by construction.
    return AllSeen(Reachable(m, 0, forward));
  }
  return AllSeen(Reachable(m, 0, forward)) &&
         AllSeen(Reachable(m, 0, backward));
}

std::string WeightViolation::ToString() const {
  switch (kind) {
    case Kind::kBelowEta:
      return absl::StrCat("L[", i, "][", j, "][k=", k, "] = ", value,
                          " is below eta");
    case Kind::kNotBelowOne:
      return absl::StrCat("L[", i, "][", j, "][k=", k, "] = ", value,
                          " is not below 1");
    case Kind::kAsymmetric:
      return absl::StrCat("L[", i, "][", j, "][k=", k, "] = ", value,
                          " differs from L[", j, "][", i,
                          "] = ", reverse_value);
  }
  return "";
}

WeightReport ValidateWeights(const WeightedGraph& g, double eta,
                             int64_t horizon) {
  WeightReport report;
  auto check_range = [&](int i, int j, int64_t k, double w) {
    if (!(w >= eta)) {
      report.violations.push_back(
          {WeightViolation::Kind::kBelowEta, i, j, k, w, 0.0});
    } else if (!(w < 1.0)) {
      report.violations.push_back(
          {WeightViolation::Kind::kNotBelowOne, i, j, k, w, 0.0});
    }
  };
  for (int64_t k = 0; k <= horizon; ++k) {
    if (g.directed()) {
      for (const Edge& e : g.edges()) {
        check_range(e.to, e.from, k, g.Weight(e.to, e.from, k));
      }
      continue;
    }
    for (const auto& [a, b] : g.SkeletonLinks()) {
      const double ab = g.Weight(a, b, k);
      const double ba = g.Weight(b, a, k);
      if (ab != ba) {
        report.violations.push_back(
            {WeightViolation::Kind::kAsymmetric, a, b, k, ab, ba});
        check_range(a, b, k, ab);
        check_range(b, a, k, ba);
      } else {
        check_range(a, b, k, ab);
      }
    }
  }
  return report;
}

}  // namespace privconsensus
