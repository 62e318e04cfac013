#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "ktg/engine.hpp"
#include "ktg/enumeration.hpp"

using namespace ktg;
using namespace ktg::testing;

namespace {

ExtractConfig exhaustive(int kmin, int kmax) {
  ExtractConfig c;
  c.k_min = kmin;
  c.k_max = kmax;
  c.shortcut.reset();
  return c;
}

std::vector<NodeSet> brute_sets(const DiGraph& g, int kmin, int kmax) {
  const std::vector<NodeId> nodes = g.active_nodes();
  const std::size_t n = nodes.size();
  std::vector<NodeSet> out;
  for (std::uint64_t m = 1; m < (std::uint64_t(1) << n); ++m) {
    const int size = std::popcount(m);
    if (size < kmin || size > kmax) continue;
    std::vector<NodeId> s;
    for (std::size_t j = 0; j < n; ++j) {
      if ((m >> j) & 1u) s.push_back(nodes[j]);
    }
    if (brute_connected(g, s)) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Enumerate, SampleGraphPairs) {
  const auto sets = enumerate_connected_sets(sample_graph(), exhaustive(2, 2));
  const std::vector<NodeSet> want{{A, B}, {B, C}, {B, D}, {C, D}, {D, E}, {D, F}};
  EXPECT_EQ(sets, want);
}

TEST(Enumerate, SampleGraphTriples) {
  const auto sets = enumerate_connected_sets(sample_graph(), exhaustive(3, 3));
  const std::vector<NodeSet> want{{A, B, C}, {A, B, D}, {B, C, D}, {B, D, E},
                                  {B, D, F}, {C, D, E}, {C, D, F}, {D, E, F}};
  EXPECT_EQ(sets, want);
  EXPECT_EQ(enumerate_connected_sets(sample_graph(), exhaustive(2, 3)).size(), 14u);
}

TEST(Enumerate, MatchesSubsetFilter) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 4 + seed % 9;
    const double p = 0.08 + 0.04 * double(seed % 5);
    const DiGraph g = random_graph(n, p, seed + 77);
    const int kmax = 2 + static_cast<int>(seed % 4);
    const auto got = enumerate_connected_sets(g, exhaustive(2, kmax));
    ASSERT_EQ(got, brute_sets(g, 2, kmax)) << "seed " << seed;
    ASSERT_TRUE(std::adjacent_find(got.begin(), got.end()) == got.end());
  }
}

TEST(Enumerate, RespectsKMin) {
  const DiGraph g = random_graph(10, 0.2, 5);
  EXPECT_EQ(enumerate_connected_sets(g, exhaustive(3, 4)), brute_sets(g, 3, 4));
}

TEST(Enumerate, ShortcutYieldsSubset) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DiGraph g = random_graph(11, 0.2, seed + 300);
    ExtractConfig c = exhaustive(2, 5);
    const auto all = enumerate_connected_sets(g, c);
    std::vector<NodeSet> prev;
    for (int s : {0, 1, 2, 6}) {
      c.shortcut = s;
      const auto some = enumerate_connected_sets(g, c);
      EXPECT_TRUE(std::includes(all.begin(), all.end(), some.begin(), some.end()));
      // every pair survives, pruning only cuts supersets
      for (const auto& set : all) {
        if (set.size() == 2) {
          EXPECT_TRUE(std::binary_search(some.begin(), some.end(), set));
        }
      }
      EXPECT_GE(some.size(), prev.size());
      prev = some;
    }
  }
}

TEST(ShouldExtend, Examples) {
  ExtractConfig c;
  c.k_max = 5;
  c.shortcut = 1;
  EXPECT_TRUE(should_extend(2, 0, 3, c));
  EXPECT_FALSE(should_extend(3, 0, 3, c));
  for (int k = 2; k < 5; ++k) EXPECT_TRUE(should_extend(4, 4, k, c));
  EXPECT_TRUE(should_extend(100, kNoCost, 3, c));
  c.shortcut.reset();
  EXPECT_TRUE(should_extend(100, 0, 3, c));
}

TEST(ShouldExtend, MonotoneInShortcut) {
  ExtractConfig c;
  c.k_max = 8;
  for (int k = 2; k < 8; ++k) {
    for (int cost = 0; cost < 12; ++cost) {
      bool before = false;
      for (int s = 0; s < 10; ++s) {
        c.shortcut = s;
        const bool now = should_extend(cost, 1, k, c);
        EXPECT_TRUE(!before || now);
        before = now;
      }
      // large s leaves only the size arm
      c.shortcut = 1000;
      EXPECT_EQ(should_extend(cost, 1, k, c), cost <= 1 + 1 + 8 - k);
    }
  }
}

TEST(Affected, EditEndpointAndSurvivor) {
  // state before the third extraction of the sample graph
  DiGraph g(6);
  g.add_edge(0, 2);
  g.add_edge(0, 3);
  g.add_edge(2, 3);
  g.add_edge(3, 5);
  const std::vector<EdgeEdit> edits{{0, 2, EditKind::Delete}};
  const NodeSet got = affected_nodes(g, std::vector<NodeId>{0, 3}, edits);
  EXPECT_TRUE(std::binary_search(got.begin(), got.end(), 0u));
  EXPECT_TRUE(std::binary_search(got.begin(), got.end(), 2u));
}

TEST(Affected, FreeExtractionOnlySurvivor) {
  const NodeSet got = affected_nodes(sample_graph(), std::vector<NodeId>{A, B}, {});
  EXPECT_EQ(got, (NodeSet{A}));
}

TEST(Affected, MultiEdgeExternal) {
  const NodeSet got = affected_nodes(sample_graph(), std::vector<NodeId>{C, D}, {});
  EXPECT_EQ(got, (NodeSet{B, C}));
}

TEST(Update, PairLosesFreeMatchAfterFirstCollapse) {
  auto [g, survivor] = collapse(sample_graph(), std::vector<NodeId>{D, E});
  ASSERT_EQ(survivor, D);
  const KTRule one = KTRule::from_edges(2, std::vector<std::pair<int, int>>{{0, 1}}, 0b10, 0b10);
  const auto cands = best_candidates(g, std::vector<NodeId>{C, D});
  for (const auto& c : cands) {
    EXPECT_FALSE(c.cost == 0 && canonical_code(c.rule) == canonical_code(one));
  }
  // once {a,b} collapses too, its survivor pairs with d at cost 1 under the same rule
  auto [h, s2] = collapse(g, std::vector<NodeId>{A, B});
  ASSERT_EQ(s2, A);
  bool found = false;
  for (const auto& c : best_candidates(h, std::vector<NodeId>{A, D})) {
    EXPECT_EQ(c.cost, 1);
    if (canonical_code(c.rule) == canonical_code(one)) {
      found = true;
      EXPECT_EQ(c.edits, (std::vector<EdgeEdit>{{A, C, EditKind::Delete}}));
    }
  }
  EXPECT_TRUE(found);
}

TEST(Update, OtherComponentUntouched) {
  DiGraph g(12);
  for (NodeId v = 0; v < 5; ++v) g.add_edge(v, v + 1);
  for (NodeId v = 6; v < 11; ++v) g.add_edge(v + 1, v);
  g.add_edge(6, 8);
  const ExtractConfig c = exhaustive(2, 3);
  FragmentCanonicalizer canon;
  EnumState state(c, canon);
  state.rebuild(g);
  auto in_second = [](const std::vector<std::pair<NodeSet, int>>& snap) {
    std::vector<std::pair<NodeSet, int>> out;
    for (const auto& e : snap) {
      if (e.first.front() >= 6) out.push_back(e);
    }
    return out;
  };
  const auto before = in_second(state.snapshot());
  auto [h, survivor] = collapse(g, std::vector<NodeId>{1, 2});
  const NodeSet invalid{1, 2};
  state.update(h, invalid, std::vector<NodeId>{survivor});
  EXPECT_EQ(in_second(state.snapshot()), before);
}

TEST(Update, RestrictedRunEqualsFilteredFullRun) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const DiGraph g = random_graph(14, 0.12, seed + 900);
    const ExtractConfig c = exhaustive(2, 4);
    const std::vector<NodeId> targets{static_cast<NodeId>(seed % 14),
                                      static_cast<NodeId>((seed * 5 + 3) % 14)};
    std::vector<NodeSet> got;
    SetEnumerator en(c);
    en.run_around(
        g, targets,
        [&](const NodeSet& s, bool emit) -> std::int64_t {
          if (emit) got.push_back(s);
          return 0;
        },
        [] { return kNoCost; });
    std::sort(got.begin(), got.end());
    std::vector<NodeSet> want;
    for (const auto& s : brute_sets(g, 2, 4)) {
      for (NodeId t : targets) {
        if (std::binary_search(s.begin(), s.end(), t)) {
          want.push_back(s);
          break;
        }
      }
    }
    EXPECT_EQ(got, want) << "seed " << seed;
  }
}

TEST(Update, IncrementalEqualsRebuild) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 8 + seed % 23;
    const DiGraph g = random_graph(n, 2.5 / double(n), seed + 4242);
    const ExtractConfig c = exhaustive(2, 2 + static_cast<int>(seed % 3));
    Extractor ex(g, c);
    int steps = 0;
    while (auto sel = ex.select_best()) {
      ex.extract(*sel);
      FragmentCanonicalizer canon;
      EnumState fresh(c, canon);
      fresh.rebuild(ex.graph());
      ASSERT_EQ(ex.state().snapshot(), fresh.snapshot()) << "seed " << seed << " step " << steps;
      ASSERT_EQ(ex.state().c_best(), fresh.c_best());
      ++steps;
    }
    EXPECT_GT(steps, 0);
  }
}

TEST(State, CBestIsMinimumCost) {
  const ExtractConfig c = exhaustive(2, 3);
  FragmentCanonicalizer canon;
  EnumState state(c, canon);
  EXPECT_EQ(state.c_best(), kNoCost);
  state.rebuild(sample_graph());
  int low = 1 << 20;
  for (const auto& [set, cost] : state.snapshot()) low = std::min(low, cost);
  EXPECT_EQ(state.c_best(), low);
  EXPECT_EQ(state.size(), 14u);
}
