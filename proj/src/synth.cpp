#include "ktg/synth.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "ktg/error.hpp"

namespace ktg {

std::uint64_t Rng::below(std::uint64_t bound) {
  // rejection sampling keeps the draw unbiased and portable
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % bound;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t stream_seed(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

DiGraph gen_binary_tree(std::size_t n_nodes) {
  DiGraph g(n_nodes);
  for (std::size_t i = 1; i < n_nodes; ++i) {
    g.add_edge(static_cast<NodeId>((i - 1) / 2), static_cast<NodeId>(i));
  }
  return g;
}

DiGraph gen_tree_of_rings(std::size_t branching, std::size_t ring_size, std::size_t n_nodes) {
  if (ring_size < 3) throw Error(ErrorCode::ParamInvalid, "ring size must be at least 3");
  if (branching < 1) throw Error(ErrorCode::ParamInvalid, "branching must be at least 1");
  const std::size_t t = std::max<std::size_t>(1, n_nodes / ring_size);
  DiGraph g(t * ring_size);
  for (std::size_t s = 0; s < t; ++s) {
    const std::size_t base = s * ring_size;
    for (std::size_t j = 0; j < ring_size; ++j) {
      g.add_edge(static_cast<NodeId>(base + j), static_cast<NodeId>(base + (j + 1) % ring_size));
    }
  }
  for (std::size_t c = 1; c < t; ++c) {
    const std::size_t p = (c - 1) / branching;
    const std::size_t q = (c - 1) % branching;
    g.add_edge(static_cast<NodeId>(p * ring_size + q % ring_size),
               static_cast<NodeId>(c * ring_size));
  }
  return g;
}

DiGraph gen_ring_lattice(std::size_t n_nodes, std::size_t degree) {
  if (degree < 2 || degree % 2 != 0) {
    throw Error(ErrorCode::ParamInvalid, "degree must be even and at least 2");
  }
  if (n_nodes <= degree) throw Error(ErrorCode::ParamInvalid, "node count must exceed degree");
  DiGraph g(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    for (std::size_t d = 1; d <= degree / 2; ++d) {
      g.add_edge(static_cast<NodeId>(i), static_cast<NodeId>((i + d) % n_nodes));
    }
  }
  return g;
}

DiGraph rewire(const DiGraph& graph, const NoiseConfig& noise) {
  if (!(noise.r >= 0.0 && noise.r <= 1.0)) {
    throw Error(ErrorCode::ParamInvalid, "rewiring probability must be in [0, 1]");
  }
  Rng rng(noise.seed);
  std::vector<std::pair<NodeId, NodeId>> moved;
  for (auto e : graph.edges()) {
    if (rng.chance(noise.r)) moved.push_back(e);
  }
  DiGraph g = graph;
  if (moved.empty()) return g;
  for (auto [u, v] : moved) g.remove_edge(u, v);
  const NodeSet nodes = graph.active_nodes();
  const std::uint64_t n = nodes.size();
  if (graph.edge_count() > n * (n - 1)) throw Error(ErrorCode::ParamInvalid, "graph too dense");
  for (std::size_t i = 0; i < moved.size(); ++i) {
    for (;;) {
      const NodeId u = nodes[rng.below(n)];
      const NodeId v = nodes[rng.below(n)];
      if (u == v || g.has_edge(u, v)) continue;
      g.add_edge(u, v);
      break;
    }
  }
  return g;
}

DiGraph gen_er(std::size_t n_nodes, std::size_t n_edges, std::uint64_t seed) {
  const std::uint64_t cap = std::uint64_t(n_nodes) * (n_nodes > 0 ? n_nodes - 1 : 0);
  if (n_edges > cap) throw Error(ErrorCode::ParamInvalid, "too many edges for node count");
  DiGraph g(n_nodes);
  Rng rng(seed);
  if (n_edges * 2 > cap) {
    // dense: shuffle all pairs and take a prefix
    std::vector<std::pair<NodeId, NodeId>> all;
    for (std::size_t u = 0; u < n_nodes; ++u) {
      for (std::size_t v = 0; v < n_nodes; ++v) {
        if (u != v) all.emplace_back(NodeId(u), NodeId(v));
      }
    }
    for (std::size_t i = 0; i < n_edges; ++i) {
      std::swap(all[i], all[i + rng.below(all.size() - i)]);
      g.add_edge(all[i].first, all[i].second);
    }
    return g;
  }
  while (g.edge_count() < n_edges) {
    const auto u = static_cast<NodeId>(rng.below(n_nodes));
    const auto v = static_cast<NodeId>(rng.below(n_nodes));
    if (u != v && !g.has_edge(u, v)) g.add_edge(u, v);
  }
  return g;
}

DiGraph gen_chung_lu_directed(const std::vector<std::uint64_t>& out_degrees,
                              const std::vector<std::uint64_t>& in_degrees, std::uint64_t seed) {
  if (out_degrees.size() != in_degrees.size()) {
    throw Error(ErrorCode::ParamInvalid, "degree sequences differ in length");
  }
  const std::uint64_t m = std::accumulate(out_degrees.begin(), out_degrees.end(), std::uint64_t{0});
  const std::uint64_t m_in = std::accumulate(in_degrees.begin(), in_degrees.end(), std::uint64_t{0});
  if (m == 0 || m != m_in) {
    throw Error(ErrorCode::ParamInvalid, "degree sums must be equal and positive");
  }
  const std::size_t n = out_degrees.size();
  DiGraph g(n);
  Rng rng(seed);
  const double md = static_cast<double>(m);
  for (std::size_t u = 0; u < n; ++u) {
    if (out_degrees[u] == 0) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v || in_degrees[v] == 0) continue;
      const double p = std::min(
          1.0, static_cast<double>(out_degrees[u]) * static_cast<double>(in_degrees[v]) / md);
      if (rng.chance(p)) g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }
  return g;
}

}  // namespace ktg
