#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ktg/grammar.hpp"
#include "ktg/graph.hpp"

namespace ktg {

/// ceil(log2(n)), with ceil(log2(0)) = ceil(log2(1)) = 0.
int ceil_log2(std::uint64_t n);

/// How the nodes of a candidate set (sorted, local index = position in the
/// sorted list) connect to each other and to the rest of the graph.
struct BoundaryProfile {
  int k = 0;
  FragmentAdjacency adj{};
  /// External node -> local mask of set nodes it points to (sorted by node).
  std::vector<std::pair<NodeId, Mask>> in_ext;
  /// External node -> local mask of set nodes pointing to it.
  std::vector<std::pair<NodeId, Mask>> out_ext;
};

/// Requires 1 <= |nodes| <= kMaxRuleSize, nodes sorted and active.
BoundaryProfile boundary_profile(const DiGraph& graph, std::span<const NodeId> nodes);

/// Mask an external node's boundary edges are edited to. Keeping the rule's
/// mask and dropping every edge are the only minimal options; dropping wins
/// ties.
inline Mask resolve_boundary(Mask actual, Mask rule_mask) {
  const int rewire = __builtin_popcount(unsigned(actual ^ rule_mask));
  return rewire < __builtin_popcount(actual) ? rule_mask : Mask{0};
}

/// Edit count of one side: sum over externals of min(|A|, |A xor M|).
int side_cost(std::span<const std::pair<NodeId, Mask>> externals, Mask mask);

/// Minimum-cost masks for one boundary side. `any` marks a side without
/// external edges, where every mask costs zero.
struct SideScan {
  int cost = 0;
  bool any = false;
  std::vector<Mask> masks;  // ascending; empty when any
};

struct MaskScan {
  int cost = 0;
  SideScan in;
  SideScan out;
};

SideScan scan_side(std::span<const std::pair<NodeId, Mask>> externals, int k);
MaskScan scan_masks(const BoundaryProfile& profile);

struct EditCostResult {
  int cost = 0;
  std::vector<EdgeEdit> edits;  // sorted
};

/// Minimum edits making `nodes` an exact occurrence of the rule given by the
/// local masks (bit j = j-th smallest node).
EditCostResult edit_cost(const DiGraph& graph, std::span<const NodeId> nodes, Mask in_mask,
                         Mask out_mask);
EditCostResult edit_cost(const BoundaryProfile& profile, std::span<const NodeId> nodes,
                         Mask in_mask, Mask out_mask);

struct CandidateOccurrence {
  NodeSet nodes;
  KTRule rule;  // local positions: fragment = induced subgraph
  int cost = 0;
  std::vector<EdgeEdit> edits;
};

/// Every (in, out) mask pair at the minimum edit cost for `nodes`.
/// Requires 2 <= |nodes| <= kMaxRuleSize and weak connectivity.
std::vector<CandidateOccurrence> best_candidates(const DiGraph& graph,
                                                 std::span<const NodeId> nodes);

/// Occurrences of one rule at one edit cost.
struct CostLevel {
  std::int64_t cost = 0;   // c_i
  std::int64_t count = 0;  // x_i
  std::int64_t nodes = 0;  // n_i
};

struct BitParams {
  std::int64_t rule = 0;  // C_R (0 once the rule is defined)
  std::int64_t id = 0;    // C_ID
  std::int64_t node = 0;  // C_node
  std::int64_t edit = 0;  // C_edit
};

/// C_R = b_rule (or 0), C_ID = ceil(log2 V0), C_node = ceil(log2 V0) + 2,
/// C_edit = ceil(log2 k) + ceil(log2 V0) + 1. With these values the predicted
/// cost of a run of extractions equals the realized application bits.
BitParams bit_params(int k, std::uint64_t original_nodes, bool rule_defined);

/// Predicted bits for extracting the n cheapest occurrences. Levels must be
/// sorted by cost. Throws NOutOfRange unless 1 <= n <= sum of counts.
std::int64_t cost_of_n(std::span<const CostLevel> table, const BitParams& params, std::int64_t n);

/// Predicted nodes covered by the n cheapest occurrences.
double nodes_of_n(std::span<const CostLevel> table, std::int64_t n);

struct PcrResult {
  double value = 0;
  std::size_t level = 0;    // index of the best prefix end
  std::int64_t nodes = 0;   // numerator
  std::int64_t bits = 0;    // denominator
};

/// Best nodes-per-bit ratio over level prefixes; smallest prefix on ties.
PcrResult pcr(std::span<const CostLevel> table, const BitParams& params);

/// Exact comparison of two ratios nodes/bits (-1, 0, 1).
int compare_ratio(std::int64_t n1, std::int64_t d1, std::int64_t n2, std::int64_t d2);

std::int64_t b_graph(std::uint64_t nodes, std::uint64_t edges);
std::int64_t b_rule(int k, std::uint64_t original_nodes);
std::int64_t b_application(int k, int edits, std::uint64_t original_nodes,
                           bool same_rule_as_previous);

struct ApplicationShape {
  RuleId rule = 0;
  int k = 0;
  int edits = 0;
};

struct BitAccount {
  std::int64_t original_bits = 0;
  std::int64_t rule_bits = 0;
  std::int64_t application_bits = 0;
  std::int64_t residual_bits = 0;
  std::int64_t compressed_bits = 0;
  std::vector<std::int64_t> per_application;
  std::map<RuleId, std::int64_t> per_rule;

  double compression_rate() const;
};

/// Realized bits: every distinct rule once, applications in order (the id is
/// paid only when the rule differs from the previous application) and the
/// residual graph.
BitAccount account_bits(std::uint64_t original_nodes, std::uint64_t original_edges,
                        std::uint64_t residual_nodes, std::uint64_t residual_edges,
                        std::span<const ApplicationShape> applications);

}  // namespace ktg
