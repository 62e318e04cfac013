#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ktg/graph.hpp"

namespace ktg {

/// Seeded 64-bit engine with a bounded draw that does not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, 1).
  double unit();
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Seed of a named sub-stream of `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view name);

struct NoiseConfig {
  double r = 0.0;
  std::uint64_t seed = 0;
};

/// Node 0 is the root; node i has children 2i+1 and 2i+2.
DiGraph gen_binary_tree(std::size_t n_nodes);

/// An N-ary tree of directed rings. Skeleton node t owns ids
/// [t*ring_size, (t+1)*ring_size). Throws ParamInvalid.
DiGraph gen_tree_of_rings(std::size_t branching, std::size_t ring_size, std::size_t n_nodes);

/// Node i points to i+1 .. i+degree/2 (mod n). Throws ParamInvalid.
DiGraph gen_ring_lattice(std::size_t n_nodes, std::size_t degree);

/// Moves each edge with probability r to a uniform random free pair.
DiGraph rewire(const DiGraph& graph, const NoiseConfig& noise);

/// Uniform simple digraph with exactly n_edges edges. Throws ParamInvalid.
DiGraph gen_er(std::size_t n_nodes, std::size_t n_edges, std::uint64_t seed);

/// Edge (u,v) kept with probability min(1, out_u * in_v / m). Throws
/// ParamInvalid.
DiGraph gen_chung_lu_directed(const std::vector<std::uint64_t>& out_degrees,
                              const std::vector<std::uint64_t>& in_degrees, std::uint64_t seed);

}  // namespace ktg
