#include "ktg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ktg/error.hpp"

namespace ktg {

RuleDistribution rule_distribution(const RuleLibrary& grammar) {
  RuleDistribution d;
  std::uint64_t total = 0;
  for (RuleId id = 0; id < grammar.size(); ++id) {
    const std::uint64_t f = grammar.frequency(id);
    if (f == 0) continue;
    d.counts[grammar.code(id)] += f;
    total += f;
  }
  if (total == 0) throw Error(ErrorCode::EmptyGrammar, "grammar has no used rules");
  for (const auto& [code, c] : d.counts) {
    d.probs[code] = static_cast<double>(c) / static_cast<double>(total);
  }
  return d;
}

KlResult kl_divergence(const RuleDistribution& p, const RuleDistribution& q) {
  std::map<CanonicalCode, std::pair<std::uint64_t, std::uint64_t>> support;
  for (const auto& [code, c] : p.counts) support[code].first = c;
  for (const auto& [code, c] : q.counts) support[code].second = c;
  double p_total = 0;
  double q_total = 0;
  for (const auto& [code, pq] : support) {
    p_total += static_cast<double>(pq.first + 1);
    q_total += static_cast<double>(pq.second + 1);
  }
  KlResult r;
  for (const auto& [code, pq] : support) {
    KlTerm t;
    t.code = code;
    t.p = static_cast<double>(pq.first + 1) / p_total;
    t.q = static_cast<double>(pq.second + 1) / q_total;
    t.value = t.p * std::log(t.p / t.q);
    r.total += t.value;
    r.terms.push_back(t);
  }
  return r;
}

std::vector<KlTerm> rank_interesting(const KlResult& kl, const RuleLibrary& p_grammar) {
  auto id_of = [&](const CanonicalCode& c) {
    auto id = p_grammar.find(c);
    return id ? std::uint64_t{*id} : std::numeric_limits<std::uint64_t>::max();
  };
  std::vector<KlTerm> out = kl.terms;
  std::stable_sort(out.begin(), out.end(), [&](const KlTerm& a, const KlTerm& b) {
    if (a.value != b.value) return a.value > b.value;
    const auto ia = id_of(a.code);
    const auto ib = id_of(b.code);
    if (ia != ib) return ia < ib;
    return a.code < b.code;
  });
  return out;
}

double compression_rate(const BitAccount& account) { return account.compression_rate(); }

}  // namespace ktg
