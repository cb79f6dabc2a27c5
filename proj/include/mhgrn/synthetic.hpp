#pragma once

#include <cmath>
#include <set>
#include <vector>

#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/rng.hpp"

namespace mhgrn {

namespace detail {

/// Default node schema for synthetic graphs: node 0 asks, the last node
/// answers, everything in between is a bridge.
inline std::vector<NodeType> endpoint_phi(int n) {
  std::vector<NodeType> phi(n, NodeType::Other);
  if (n > 0) phi[0] = NodeType::Question;
  if (n > 1) phi[n - 1] = NodeType::Answer;
  return phi;
}

}  // namespace detail

/// Complete digraph on n nodes: every ordered pair (i, j), i != j, under a
/// single relation. Walk counts on this graph are exactly n * (n-1)^k.
inline MultiRelGraph complete_digraph(int n) {
  if (n < 2) throw IndexOutOfRange("complete_digraph: need n >= 2");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) edges.push_back({i, 1, j});
  return make_graph(n, detail::endpoint_phi(n), {}, std::move(edges), 1);
}

/// Chain 0 -> 1 -> ... -> n-1 with relation 1 forward and relation 2 back.
inline MultiRelGraph chain_graph(int n) {
  if (n < 2) throw IndexOutOfRange("chain_graph: need n >= 2");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) {
    edges.push_back({i, 1, i + 1});
    edges.push_back({i + 1, 2, i});
  }
  return make_graph(n, detail::endpoint_phi(n), {}, std::move(edges), 2);
}

/// Random multi-relational digraph with round(n * deg) distinct edges spread
/// uniformly over relations 1..m, no self-loops. Node 0 is always a question
/// and node n-1 always an answer; every other node draws q/a/o with
/// probability 0.1/0.1/0.8. Fully determined by the seed: node types are
/// drawn first (ascending node id), then edges.
inline MultiRelGraph erdos_graph(int n, double deg, int m,
                                 std::uint64_t seed) {
  if (n < 2) throw IndexOutOfRange("erdos_graph: need n >= 2");
  if (m < 1) throw BadRelationId("erdos_graph: need m >= 1");
  if (deg <= 0.0) throw Error("erdos_graph: need deg > 0");
  const long target = std::lround(static_cast<double>(n) * deg);
  const long capacity = static_cast<long>(n) * (n - 1) * m;
  if (target > capacity)
    throw Error("erdos_graph: requested " + std::to_string(target) +
                " edges but only " + std::to_string(capacity) + " possible");
  Rng rng(seed);
  std::vector<NodeType> phi(n, NodeType::Other);
  phi[0] = NodeType::Question;
  phi[n - 1] = NodeType::Answer;
  for (int v = 1; v + 1 < n; ++v) {
    double u = rng.next_double();
    if (u < 0.1)
      phi[v] = NodeType::Question;
    else if (u < 0.2)
      phi[v] = NodeType::Answer;
  }
  std::set<std::tuple<int, int, int>> seen;
  std::vector<Edge> edges;
  while (static_cast<long>(edges.size()) < target) {
    int src = static_cast<int>(rng.next_below(n));
    int dst = static_cast<int>(rng.next_below(n));
    int rel = 1 + static_cast<int>(rng.next_below(m));
    if (src == dst) continue;
    if (!seen.insert({src, rel, dst}).second) continue;
    edges.push_back({src, rel, dst});
  }
  return make_graph(n, std::move(phi), {}, std::move(edges), m);
}

}  // namespace mhgrn
