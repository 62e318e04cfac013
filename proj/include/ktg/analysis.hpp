#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ktg/grammar.hpp"
#include "ktg/mdl.hpp"

namespace ktg {

/// Rule frequencies of a grammar keyed by canonical code.
struct RuleDistribution {
  std::map<CanonicalCode, std::uint64_t> counts;
  std::map<CanonicalCode, double> probs;
};

/// p(R) = frequency(R) / total. Throws EmptyGrammar when nothing was used.
RuleDistribution rule_distribution(const RuleLibrary& grammar);

struct KlTerm {
  CanonicalCode code;
  double p = 0;  // smoothed
  double q = 0;  // smoothed
  double value = 0;
};

struct KlResult {
  double total = 0;
  std::vector<KlTerm> terms;  // one per code of the union support, by code
};

/// Add-one smoothing over the union support, then sum of p ln(p/q).
KlResult kl_divergence(const RuleDistribution& p, const RuleDistribution& q);

/// Terms by descending contribution. Ties go to the lower id in `p_grammar`;
/// codes it does not contain come last, by code.
std::vector<KlTerm> rank_interesting(const KlResult& kl, const RuleLibrary& p_grammar);

/// 1 - compressed / original; 0 when nothing was encoded.
double compression_rate(const BitAccount& account);

}  // namespace ktg
