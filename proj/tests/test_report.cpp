#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ktg/error.hpp"
#include "ktg/report.hpp"
#include "ktg/synth.hpp"

using namespace ktg;
using namespace ktg::testing;
using nlohmann::json;

namespace {

ExtractionResult sample_run() {
  ExtractConfig c;
  c.k_max = 4;
  return extract(gen_tree_of_rings(3, 5, 60), c);
}

void expect_corrupt(const json& j) {
  try {
    load_run(j);
    FAIL() << "expected CorruptRecord";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorruptRecord);
  }
}

}  // namespace

TEST(Report, RunJsonDecodesToInput) {
  const ExtractionResult r = sample_run();
  const json j = run_to_json(r, json{{"seed", 7}});
  EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(j.at("manifest").at("seed"), 7);
  const ExtractionResult back = load_run(json::parse(j.dump()));
  EXPECT_EQ(back.records.size(), r.records.size());
  EXPECT_EQ(decode(back), gen_tree_of_rings(3, 5, 60));
}

TEST(Report, GrammarJsonIsReproducible) {
  EXPECT_EQ(grammar_to_json(sample_run().grammar).dump(), grammar_to_json(sample_run().grammar).dump());
}

TEST(Report, GrammarListsUsedRulesOnly) {
  const ExtractionResult r = sample_run();
  const json g = grammar_to_json(r.grammar);
  std::uint64_t total = 0;
  for (const auto& rule : g.at("rules")) {
    EXPECT_GT(rule.at("frequency").get<std::uint64_t>(), 0u);
    total += rule.at("frequency").get<std::uint64_t>();
  }
  EXPECT_EQ(total, r.records.size());
}

TEST(Report, AccountFields) {
  const json a = account_to_json(sample_run().account);
  EXPECT_EQ(a.at("compressed_bits").get<std::int64_t>(),
            a.at("rule_bits").get<std::int64_t>() + a.at("application_bits").get<std::int64_t>() +
                a.at("residual_bits").get<std::int64_t>());
  EXPECT_TRUE(a.contains("compression_rate"));
}

TEST(Report, MalformedArtifacts) {
  const json good = run_to_json(sample_run(), json::object());
  json j = good;
  j.erase("records");
  expect_corrupt(j);
  j = good;
  j["records"][0]["rule"] = 999;
  expect_corrupt(j);
  j = good;
  j["grammar"]["rules"][0]["code"] = "zz";
  expect_corrupt(j);
  j = good;
  j["records"][0]["edits"] = json::array({{{"position", 0}, {"external", 1}, {"direction", "up"}}});
  expect_corrupt(j);
}

TEST(Report, DotHasBoundaryStubs) {
  const KTRule r = KTRule::from_edges(2, std::vector<std::pair<int, int>>{{0, 1}}, 0b10, 0b01);
  const std::string dot = rule_to_dot(r, "rule_0");
  EXPECT_NE(dot.find("digraph \"rule_0\""), std::string::npos);
  EXPECT_NE(dot.find("n0 -> n1;"), std::string::npos);
  EXPECT_NE(dot.find("in -> n1 [style=dashed]"), std::string::npos);
  EXPECT_NE(dot.find("n0 -> out [style=dashed]"), std::string::npos);
  const KTRule closed = KTRule::from_edges(2, std::vector<std::pair<int, int>>{{0, 1}}, 0, 0);
  EXPECT_EQ(rule_to_dot(closed, "c").find("point"), std::string::npos);
}

TEST(Report, KlJsonKeepsRanking) {
  RuleLibrary a, b;
  const auto c0 = canonical_code(KTRule::from_edges(2, std::vector<std::pair<int, int>>{{0, 1}}, 1, 1));
  const auto c1 = canonical_code(KTRule::from_edges(2, std::vector<std::pair<int, int>>{{0, 1}}, 2, 2));
  a.insert(c0, 3, 1);
  b.insert(c1, 3, 1);
  const KlResult kl = kl_divergence(rule_distribution(a), rule_distribution(b));
  const json j = kl_to_json(kl, rank_interesting(kl, a));
  EXPECT_NEAR(j.at("total").get<double>(), kl.total, 1e-15);
  EXPECT_EQ(j.at("contributions").at(0).at("code"), c0.hex());
}
