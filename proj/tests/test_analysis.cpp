#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ktg/analysis.hpp"
#include "ktg/engine.hpp"
#include "ktg/error.hpp"

using namespace ktg;
using namespace ktg::testing;

namespace {

CanonicalCode code_of(int which) {
  // three structurally different pair rules
  const std::vector<std::pair<int, int>> one{{0, 1}};
  const std::vector<std::pair<int, int>> both{{0, 1}, {1, 0}};
  switch (which) {
    case 0: return canonical_code(KTRule::from_edges(2, one, 0b10, 0b10));
    case 1: return canonical_code(KTRule::from_edges(2, one, 0b01, 0b10));
    default: return canonical_code(KTRule::from_edges(2, both, 0b01, 0b01));
  }
}

RuleLibrary library_with(const std::vector<std::uint64_t>& freqs) {
  RuleLibrary lib;
  for (std::size_t j = 0; j < freqs.size(); ++j) lib.insert(code_of(int(j)), freqs[j], 1);
  return lib;
}

}  // namespace

TEST(CompressionRate, Arithmetic) {
  BitAccount a;
  a.original_bits = 200;
  a.compressed_bits = 100;
  EXPECT_DOUBLE_EQ(compression_rate(a), 0.5);
  a.compressed_bits = 260;
  EXPECT_DOUBLE_EQ(compression_rate(a), -0.3);
}

TEST(CompressionRate, NothingExtractedIsZero) {
  const ExtractionResult r = extract(DiGraph(6), ExtractConfig{});
  EXPECT_DOUBLE_EQ(compression_rate(r.account), 0.0);
}

TEST(CompressionRate, OriginalBitsIgnoreLabels) {
  const DiGraph g = random_graph(30, 0.1, 4);
  std::vector<NodeId> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  DiGraph h(30);
  for (const auto& [u, v] : g.edges()) h.add_edge(perm[u], perm[v]);
  EXPECT_EQ(extract(g, ExtractConfig{}).account.original_bits,
            extract(h, ExtractConfig{}).account.original_bits);
}

TEST(Distribution, Basics) {
  const RuleDistribution single = rule_distribution(library_with({5}));
  ASSERT_EQ(single.probs.size(), 1u);
  EXPECT_DOUBLE_EQ(single.probs.begin()->second, 1.0);
  const RuleDistribution two = rule_distribution(library_with({3, 1}));
  EXPECT_DOUBLE_EQ(two.probs.at(code_of(0)), 0.75);
  EXPECT_DOUBLE_EQ(two.probs.at(code_of(1)), 0.25);
  EXPECT_EQ(two.counts.at(code_of(0)), 3u);
}

TEST(Distribution, EmptyGrammar) {
  try {
    rule_distribution(library_with({0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGrammar);
  }
}

TEST(Distribution, FromRun) {
  const ExtractionResult r = extract(sample_graph(), ExtractConfig{2, 2});
  const RuleDistribution d = rule_distribution(r.grammar);
  double sum = 0;
  std::uint64_t total = 0;
  for (const auto& [code, p] : d.probs) sum += p;
  for (const auto& [code, c] : d.counts) total += c;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(total, r.records.size());
}

TEST(Kl, IdenticalIsZero) {
  const auto p = rule_distribution(library_with({4, 2, 1}));
  const KlResult kl = kl_divergence(p, p);
  EXPECT_DOUBLE_EQ(kl.total, 0.0);
  for (const auto& t : kl.terms) EXPECT_DOUBLE_EQ(t.value, 0.0);
}

TEST(Kl, HandBuiltCase) {
  const auto p = rule_distribution(library_with({2, 1, 0}));
  RuleLibrary qlib;
  qlib.insert(code_of(1), 1, 1);
  qlib.insert(code_of(2), 2, 1);
  const auto q = rule_distribution(qlib);
  const KlResult kl = kl_divergence(p, q);
  EXPECT_NEAR(kl.total, std::log(3.0) / 3.0, 1e-12);
  ASSERT_EQ(kl.terms.size(), 3u);
  double sum = 0;
  for (const auto& t : kl.terms) {
    sum += t.value;
    EXPECT_GT(t.p, 0.0);
    EXPECT_GT(t.q, 0.0);
  }
  EXPECT_NEAR(sum, kl.total, 1e-12);
  const auto ranked = rank_interesting(kl, library_with({2, 1, 0}));
  EXPECT_EQ(ranked.front().code, code_of(0));
  EXPECT_NEAR(ranked.front().p, 0.5, 1e-12);
  EXPECT_NEAR(ranked.front().q, 1.0 / 6.0, 1e-12);
  EXPECT_EQ(ranked.back().code, code_of(2));
}

TEST(Kl, TiesFallBackToLibraryOrder) {
  RuleLibrary lib;
  lib.insert(code_of(2), 1, 1);
  lib.insert(code_of(0), 1, 1);
  lib.insert(code_of(1), 1, 1);
  const auto p = rule_distribution(lib);
  const auto ranked = rank_interesting(kl_divergence(p, p), lib);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].code, code_of(2));
  EXPECT_EQ(ranked[1].code, code_of(0));
  EXPECT_EQ(ranked[2].code, code_of(1));
}

TEST(Kl, NonNegativeOnRandomCounts) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = rule_distribution(library_with({rng() % 9 + 1, rng() % 9, rng() % 9}));
    const auto q = rule_distribution(library_with({rng() % 9, rng() % 9 + 1, rng() % 9}));
    EXPECT_GE(kl_divergence(p, q).total, -1e-12);
  }
}
