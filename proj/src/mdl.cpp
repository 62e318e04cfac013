#include "ktg/mdl.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>

#include "ktg/error.hpp"

namespace ktg {

namespace {

int local_index(std::span<const NodeId> nodes, NodeId v) {
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (nodes[j] == v) return static_cast<int>(j);
  }
  return -1;
}

void merge_externals(std::vector<std::pair<NodeId, Mask>>& ext) {
  std::sort(ext.begin(), ext.end());
  std::size_t w = 0;
  for (std::size_t r = 0; r < ext.size(); ++r) {
    if (w > 0 && ext[w - 1].first == ext[r].first) {
      ext[w - 1].second |= ext[r].second;
    } else {
      ext[w++] = ext[r];
    }
  }
  ext.resize(w);
}

}  // namespace

int ceil_log2(std::uint64_t n) {
  if (n <= 1) return 0;
  return 64 - std::countl_zero(n - 1);
}

BoundaryProfile boundary_profile(const DiGraph& graph, std::span<const NodeId> nodes) {
  BoundaryProfile p;
  p.k = static_cast<int>(nodes.size());
  for (int j = 0; j < p.k; ++j) {
    const NodeId w = nodes[j];
    for (NodeId t : graph.out_neighbors(w)) {
      int idx = local_index(nodes, t);
      if (idx >= 0) {
        p.adj[j] |= Mask(1u << idx);
      } else {
        p.out_ext.emplace_back(t, Mask(1u << j));
      }
    }
    for (NodeId s : graph.in_neighbors(w)) {
      if (local_index(nodes, s) < 0) p.in_ext.emplace_back(s, Mask(1u << j));
    }
  }
  merge_externals(p.in_ext);
  merge_externals(p.out_ext);
  return p;
}

int side_cost(std::span<const std::pair<NodeId, Mask>> externals, Mask mask) {
  int cost = 0;
  for (const auto& [u, a] : externals) {
    cost += std::min(std::popcount(unsigned(a)), std::popcount(unsigned(a ^ mask)));
  }
  return cost;
}

SideScan scan_side(std::span<const std::pair<NodeId, Mask>> externals, int k) {
  SideScan scan;
  if (externals.empty()) {
    scan.any = true;
    return scan;
  }
  std::array<std::uint32_t, 256> counts{};
  for (const auto& e : externals) ++counts[e.second];
  std::vector<std::pair<Mask, std::uint32_t>> groups;
  for (unsigned a = 1; a < 256; ++a) {
    if (counts[a]) groups.emplace_back(static_cast<Mask>(a), counts[a]);
  }
  const unsigned limit = 1u << k;
  int best = -1;
  for (unsigned m = 0; m < limit; ++m) {
    int cost = 0;
    for (const auto& [a, cnt] : groups) {
      cost += static_cast<int>(cnt) *
              std::min(std::popcount(unsigned(a)), std::popcount(unsigned(a) ^ m));
      if (best >= 0 && cost > best) break;
    }
    if (best < 0 || cost < best) {
      best = cost;
      scan.masks.clear();
    }
    if (cost == best) scan.masks.push_back(static_cast<Mask>(m));
  }
  scan.cost = best;
  return scan;
}

MaskScan scan_masks(const BoundaryProfile& profile) {
  MaskScan s;
  s.in = scan_side(profile.in_ext, profile.k);
  s.out = scan_side(profile.out_ext, profile.k);
  s.cost = s.in.cost + s.out.cost;
  return s;
}

EditCostResult edit_cost(const BoundaryProfile& profile, std::span<const NodeId> nodes,
                         Mask in_mask, Mask out_mask) {
  EditCostResult r;
  for (const auto& [u, a] : profile.in_ext) {
    const Mask flip = a ^ resolve_boundary(a, in_mask);
    for (int j = 0; j < profile.k; ++j) {
      if (!((flip >> j) & 1u)) continue;
      r.edits.push_back({u, nodes[j], ((a >> j) & 1u) ? EditKind::Delete : EditKind::Add});
    }
  }
  for (const auto& [u, a] : profile.out_ext) {
    const Mask flip = a ^ resolve_boundary(a, out_mask);
    for (int j = 0; j < profile.k; ++j) {
      if (!((flip >> j) & 1u)) continue;
      r.edits.push_back({nodes[j], u, ((a >> j) & 1u) ? EditKind::Delete : EditKind::Add});
    }
  }
  std::sort(r.edits.begin(), r.edits.end());
  r.cost = static_cast<int>(r.edits.size());
  return r;
}

EditCostResult edit_cost(const DiGraph& graph, std::span<const NodeId> nodes, Mask in_mask,
                         Mask out_mask) {
  NodeSet set = make_node_set(nodes);
  if (set.empty() || set.size() > static_cast<std::size_t>(kMaxRuleSize)) {
    throw Error(ErrorCode::ParamInvalid, "candidate set size out of range");
  }
  for (NodeId v : set) {
    if (!graph.is_active(v)) {
      throw Error(ErrorCode::InactiveEndpoint, "node " + std::to_string(v) + " is not active");
    }
  }
  return edit_cost(boundary_profile(graph, set), set, in_mask, out_mask);
}

std::vector<CandidateOccurrence> best_candidates(const DiGraph& graph,
                                                 std::span<const NodeId> nodes) {
  NodeSet set = make_node_set(nodes);
  if (set.size() < 2 || set.size() > static_cast<std::size_t>(kMaxRuleSize)) {
    throw Error(ErrorCode::ParamInvalid, "candidate set size out of range");
  }
  for (NodeId v : set) {
    if (!graph.is_active(v)) {
      throw Error(ErrorCode::InactiveEndpoint, "node " + std::to_string(v) + " is not active");
    }
  }
  if (!is_weakly_connected(graph, set)) {
    throw Error(ErrorCode::NotConnected, "candidate set is not weakly connected");
  }
  const BoundaryProfile profile = boundary_profile(graph, set);
  const MaskScan scan = scan_masks(profile);
  const int k = profile.k;
  auto expand = [k](const SideScan& s) {
    if (!s.any) return s.masks;
    std::vector<Mask> all(std::size_t{1} << k);
    for (std::size_t m = 0; m < all.size(); ++m) all[m] = static_cast<Mask>(m);
    return all;
  };
  std::vector<CandidateOccurrence> result;
  for (Mask i : expand(scan.in)) {
    for (Mask o : expand(scan.out)) {
      CandidateOccurrence c;
      c.nodes = set;
      c.rule.k = k;
      c.rule.adj = profile.adj;
      c.rule.in_mask = i;
      c.rule.out_mask = o;
      auto ec = edit_cost(profile, set, i, o);
      c.cost = ec.cost;
      c.edits = std::move(ec.edits);
      result.push_back(std::move(c));
    }
  }
  return result;
}

BitParams bit_params(int k, std::uint64_t original_nodes, bool rule_defined) {
  const std::int64_t lv = ceil_log2(original_nodes);
  BitParams p;
  p.rule = rule_defined ? 0 : b_rule(k, original_nodes);
  p.id = lv;
  p.node = lv + 2;
  p.edit = ceil_log2(static_cast<std::uint64_t>(k)) + lv + 1;
  return p;
}

std::int64_t cost_of_n(std::span<const CostLevel> table, const BitParams& params,
                       std::int64_t n) {
  std::int64_t total = 0;
  for (const auto& lv : table) total += lv.count;
  if (n < 1 || n > total) {
    throw Error(ErrorCode::NOutOfRange, "n=" + std::to_string(n) + " outside [1, " +
                                            std::to_string(total) + "]");
  }
  std::int64_t bits = params.rule + params.id + n * params.node;
  std::int64_t left = n;
  for (const auto& lv : table) {
    const std::int64_t take = std::min(left, lv.count);
    bits += take * lv.cost * params.edit;
    left -= take;
    if (left == 0) break;
  }
  return bits;
}

double nodes_of_n(std::span<const CostLevel> table, std::int64_t n) {
  std::int64_t total = 0;
  for (const auto& lv : table) total += lv.count;
  if (n < 1 || n > total) {
    throw Error(ErrorCode::NOutOfRange, "n=" + std::to_string(n) + " outside [1, " +
                                            std::to_string(total) + "]");
  }
  double nodes = 0;
  std::int64_t left = n;
  for (const auto& lv : table) {
    if (left >= lv.count) {
      nodes += static_cast<double>(lv.nodes);
      left -= lv.count;
    } else {
      nodes += static_cast<double>(left) / static_cast<double>(lv.count) *
               static_cast<double>(lv.nodes);
      left = 0;
    }
    if (left == 0) break;
  }
  return nodes;
}

int compare_ratio(std::int64_t n1, std::int64_t d1, std::int64_t n2, std::int64_t d2) {
  const __int128 lhs = static_cast<__int128>(n1) * d2;
  const __int128 rhs = static_cast<__int128>(n2) * d1;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

PcrResult pcr(std::span<const CostLevel> table, const BitParams& params) {
  PcrResult best;
  std::int64_t nodes = 0;
  std::int64_t bits = params.rule + params.id;
  bool have = false;
  for (std::size_t j = 0; j < table.size(); ++j) {
    nodes += table[j].nodes;
    bits += table[j].count * (params.node + table[j].cost * params.edit);
    if (!have || compare_ratio(nodes, bits, best.nodes, best.bits) > 0) {
      have = true;
      best.level = j;
      best.nodes = nodes;
      best.bits = bits;
    }
  }
  best.value = best.bits > 0 ? static_cast<double>(best.nodes) / static_cast<double>(best.bits) : 0;
  return best;
}

std::int64_t b_graph(std::uint64_t nodes, std::uint64_t edges) {
  const std::int64_t lv = ceil_log2(nodes);
  const std::int64_t header = std::max<std::int64_t>(0, 2 * lv - 1);
  return header + static_cast<std::int64_t>(nodes) + static_cast<std::int64_t>(edges) * (lv + 1);
}

std::int64_t b_rule(int k, std::uint64_t original_nodes) {
  const std::int64_t lk = ceil_log2(static_cast<std::uint64_t>(k));
  return ceil_log2(original_nodes) + k * (lk + 2) + static_cast<std::int64_t>(k) * (k - 1) + 1;
}

std::int64_t b_application(int k, int edits, std::uint64_t original_nodes,
                           bool same_rule_as_previous) {
  const std::int64_t lv = ceil_log2(original_nodes);
  const std::int64_t lk = ceil_log2(static_cast<std::uint64_t>(k));
  return 2 + lv + static_cast<std::int64_t>(edits) * (lk + lv + 1) +
         (same_rule_as_previous ? 0 : lv);
}

double BitAccount::compression_rate() const {
  if (original_bits <= 0) return 0.0;
  return 1.0 - static_cast<double>(compressed_bits) / static_cast<double>(original_bits);
}

BitAccount account_bits(std::uint64_t original_nodes, std::uint64_t original_edges,
                        std::uint64_t residual_nodes, std::uint64_t residual_edges,
                        std::span<const ApplicationShape> applications) {
  BitAccount acc;
  acc.original_bits = original_nodes > 0 ? b_graph(original_nodes, original_edges) : 0;
  acc.residual_bits = residual_nodes > 0 ? b_graph(residual_nodes, residual_edges) : 0;
  const ApplicationShape* prev = nullptr;
  for (const auto& app : applications) {
    const bool same = prev != nullptr && prev->rule == app.rule;
    const std::int64_t bits = b_application(app.k, app.edits, original_nodes, same);
    acc.per_application.push_back(bits);
    acc.application_bits += bits;
    if (!acc.per_rule.contains(app.rule)) {
      const std::int64_t rb = b_rule(app.k, original_nodes);
      acc.per_rule.emplace(app.rule, rb);
      acc.rule_bits += rb;
    }
    prev = &app;
  }
  acc.compressed_bits = acc.rule_bits + acc.application_bits + acc.residual_bits;
  return acc;
}

}  // namespace ktg
