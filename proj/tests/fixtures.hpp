#pragma once

#include <random>
#include <vector>

#include "ktg/graph.hpp"

namespace ktg::testing {

// sample graph: a=0 b=1 c=2 d=3 e=4 f=5
enum : NodeId { A = 0, B = 1, C = 2, D = 3, E = 4, F = 5 };

inline DiGraph sample_graph() {
  DiGraph g(6);
  g.add_edge(A, B);
  g.add_edge(B, C);
  g.add_edge(B, D);
  g.add_edge(C, D);
  g.add_edge(D, F);
  g.add_edge(E, D);
  return g;
}

/// Each ordered pair kept with probability p.
inline DiGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  DiGraph g(n);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v && coin(rng)) g.add_edge(u, v);
    }
  }
  return g;
}

/// Connectivity of `nodes` ignoring direction, by plain BFS.
inline bool brute_connected(const DiGraph& g, const std::vector<NodeId>& nodes) {
  if (nodes.empty()) return false;
  std::vector<NodeId> seen{nodes[0]};
  for (std::size_t i = 0; i < seen.size(); ++i) {
    for (NodeId w : nodes) {
      if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
      if (g.has_edge(seen[i], w) || g.has_edge(w, seen[i])) seen.push_back(w);
    }
  }
  return seen.size() == nodes.size();
}

}  // namespace ktg::testing
