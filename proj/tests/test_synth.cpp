#include <gtest/gtest.h>

#include <map>
#include <set>

#include "ktg/error.hpp"
#include "ktg/synth.hpp"

using namespace ktg;

namespace {

bool simple(const DiGraph& g) {
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& [u, v] : g.edges()) {
    if (u == v || !seen.insert({u, v}).second) return false;
  }
  return seen.size() == g.edge_count();
}

}  // namespace

TEST(BinaryTree, Shape) {
  const DiGraph t = gen_binary_tree(7);
  EXPECT_EQ(t.edge_count(), 6u);
  EXPECT_EQ(t.out_degree(0), 2u);
  for (NodeId v = 3; v < 7; ++v) EXPECT_EQ(t.out_degree(v), 0u);
  for (NodeId v = 1; v < 7; ++v) {
    EXPECT_EQ(t.in_degree(v), 1u);
    EXPECT_TRUE(t.has_edge((v - 1) / 2, v));
  }
  EXPECT_EQ(gen_binary_tree(1).edge_count(), 0u);
  EXPECT_EQ(gen_binary_tree(3000).edge_count(), 2999u);
  EXPECT_TRUE((weak_components(gen_binary_tree(3000)).size() == 1));
}

TEST(TreeOfRings, Counts) {
  const DiGraph one = gen_tree_of_rings(3, 15, 15);
  EXPECT_EQ(one.node_count(), 15u);
  EXPECT_EQ(one.edge_count(), 15u);
  for (std::size_t t : {2u, 4u, 13u, 40u}) {
    const DiGraph g = gen_tree_of_rings(3, 15, t * 15);
    EXPECT_EQ(g.node_count(), t * 15);
    EXPECT_EQ(g.edge_count(), t * 15 + t - 1);
    EXPECT_TRUE((weak_components(g).size() == 1));
    EXPECT_TRUE(simple(g));
  }
}

TEST(TreeOfRings, RingsAndAttachment) {
  const std::size_t ring = 5;
  const DiGraph g = gen_tree_of_rings(3, ring, 13 * ring);
  for (std::size_t t = 0; t < 13; ++t) {
    for (std::size_t j = 0; j < ring; ++j) {
      EXPECT_TRUE(g.has_edge(NodeId(t * ring + j), NodeId(t * ring + (j + 1) % ring)));
    }
  }
  // children of one skeleton node hang off distinct ring positions
  for (std::size_t p = 0; p < 4; ++p) {
    std::set<NodeId> sources;
    for (std::size_t c = 3 * p + 1; c <= 3 * p + 3; ++c) {
      for (NodeId u : g.in_neighbors(NodeId(c * ring))) {
        if (u / ring != c) {
          EXPECT_EQ(u / ring, p);
          sources.insert(u);
        }
      }
    }
    EXPECT_EQ(sources.size(), 3u);
  }
}

TEST(TreeOfRings, Invalid) {
  EXPECT_THROW(gen_tree_of_rings(3, 2, 30), Error);
  EXPECT_THROW(gen_tree_of_rings(0, 15, 30), Error);
}

TEST(RingLattice, Shape) {
  const DiGraph g = gen_ring_lattice(10, 4);
  EXPECT_EQ(g.edge_count(), 20u);
  for (NodeId v = 0; v < 10; ++v) {
    EXPECT_EQ(g.in_degree(v), 2u);
    EXPECT_EQ(g.out_degree(v), 2u);
    EXPECT_TRUE(g.has_edge(v, (v + 1) % 10));
    EXPECT_TRUE(g.has_edge(v, (v + 2) % 10));
  }
  EXPECT_EQ(gen_ring_lattice(3000, 4).edge_count(), 6000u);
  EXPECT_THROW(gen_ring_lattice(10, 3), Error);
  EXPECT_THROW(gen_ring_lattice(4, 4), Error);
  EXPECT_THROW(gen_ring_lattice(10, 0), Error);
}

TEST(Rewire, ZeroIsIdentity) {
  const DiGraph g = gen_ring_lattice(50, 4);
  EXPECT_EQ(rewire(g, {0.0, 9}), g);
}

TEST(Rewire, PreservesEdgeCountAndSimplicity) {
  const DiGraph g = gen_binary_tree(200);
  for (double r : {0.1, 0.5, 1.0}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DiGraph h = rewire(g, {r, seed});
      EXPECT_EQ(h.edge_count(), g.edge_count());
      EXPECT_EQ(h.node_count(), g.node_count());
      EXPECT_TRUE(simple(h));
    }
  }
  EXPECT_EQ(rewire(g, {0.4, 3}), rewire(g, {0.4, 3}));
  EXPECT_NE(rewire(g, {0.4, 3}), rewire(g, {0.4, 4}));
}

TEST(Rewire, MovedFractionTracksR) {
  const DiGraph g = gen_ring_lattice(1000, 4);
  const DiGraph h = rewire(g, {0.3, 17});
  std::size_t kept = 0;
  for (const auto& [u, v] : g.edges()) kept += h.has_edge(u, v) ? 1 : 0;
  const double moved = 1.0 - double(kept) / double(g.edge_count());
  EXPECT_NEAR(moved, 0.3, 0.03);
}

TEST(Rewire, FullNoiseSpreadsUniformly) {
  // a 4-node path under r = 1: every ordered pair ends up equally likely
  DiGraph g(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  std::map<std::pair<NodeId, NodeId>, int> hits;
  const int trials = 6000;
  for (int s = 0; s < trials; ++s) {
    for (const auto& e : rewire(g, {1.0, std::uint64_t(s)}).edges()) ++hits[e];
  }
  EXPECT_EQ(hits.size(), 12u);
  for (const auto& [pair, count] : hits) EXPECT_NEAR(count, trials * 3 / 12.0, 250);
}

TEST(Er, ExactCountsAndSaturation) {
  const DiGraph full = gen_er(5, 20, 1);
  EXPECT_EQ(full.edge_count(), 20u);
  for (NodeId u = 0; u < 5; ++u) {
    for (NodeId v = 0; v < 5; ++v) EXPECT_EQ(full.has_edge(u, v), u != v);
  }
  EXPECT_EQ(gen_er(9, 0, 1).edge_count(), 0u);
  EXPECT_EQ(gen_er(300, 900, 4).edge_count(), 900u);
  EXPECT_TRUE(simple(gen_er(300, 900, 4)));
  EXPECT_EQ(gen_er(300, 900, 4), gen_er(300, 900, 4));
  EXPECT_THROW(gen_er(5, 21, 1), Error);
}

TEST(Er, PairsEquallyLikely) {
  std::map<std::pair<NodeId, NodeId>, int> hits;
  const int trials = 6000;
  for (int s = 0; s < trials; ++s) {
    for (const auto& e : gen_er(4, 3, std::uint64_t(s)).edges()) ++hits[e];
  }
  EXPECT_EQ(hits.size(), 12u);
  for (const auto& [pair, count] : hits) EXPECT_NEAR(count, trials * 3 / 12.0, 200);
}

TEST(ChungLu, ForcedTarget) {
  const std::vector<std::uint64_t> out{1, 1, 1, 1, 0};
  const std::vector<std::uint64_t> in{0, 0, 0, 0, 4};
  const DiGraph g = gen_chung_lu_directed(out, in, 7);
  EXPECT_EQ(g.edge_count(), 4u);
  for (NodeId u = 0; u < 4; ++u) EXPECT_TRUE(g.has_edge(u, 4));
}

TEST(ChungLu, MeanDegreesMatch) {
  const std::size_t n = 50;
  std::vector<std::uint64_t> out(n, 2), in(n, 2);
  out[0] = 6;
  in[0] = 0;
  in[1] = 8;
  const double m = 2.0 * double(n) + 4.0;
  std::vector<double> sum_out(n, 0.0);
  const int seeds = 4000;
  for (int s = 0; s < seeds; ++s) {
    const DiGraph g = gen_chung_lu_directed(out, in, std::uint64_t(s));
    for (NodeId u = 0; u < n; ++u) sum_out[u] += double(g.out_degree(u));
  }
  for (NodeId u = 0; u < n; ++u) {
    double expect = 0;
    for (NodeId v = 0; v < n; ++v) {
      if (v != u) expect += std::min(1.0, double(out[u]) * double(in[v]) / m);
    }
    EXPECT_NEAR(sum_out[u] / seeds, expect, 0.05 * expect);
    EXPECT_NEAR(expect, double(out[u]), 0.05 * double(out[u]) + 0.1);
  }
}

TEST(ChungLu, Invalid) {
  EXPECT_THROW(gen_chung_lu_directed({1, 2}, {2, 2}, 0), Error);
  EXPECT_THROW(gen_chung_lu_directed({0, 0}, {0, 0}, 0), Error);
  EXPECT_THROW(gen_chung_lu_directed({1, 2, 3}, {3, 3}, 0), Error);
  EXPECT_EQ(gen_chung_lu_directed({3, 3, 3}, {3, 3, 3}, 5),
            gen_chung_lu_directed({3, 3, 3}, {3, 3, 3}, 5));
}

TEST(Rng, BelowStaysInRange) {
  Rng r(1);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[r.below(7)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(stream_seed(5, "rewire"), stream_seed(5, "er"));
  EXPECT_EQ(stream_seed(5, "rewire"), stream_seed(5, "rewire"));
}
