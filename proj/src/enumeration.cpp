#include "ktg/enumeration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <string>

#include "ktg/error.hpp"

namespace ktg {

void ExtractConfig::validate() const {
  if (k_min < 2) throw Error(ErrorCode::ConfigInvalid, "k_min must be at least 2");
  if (k_max > kMaxRuleSize) {
    throw Error(ErrorCode::ConfigInvalid,
                "k_max must be at most " + std::to_string(kMaxRuleSize));
  }
  if (k_min > k_max) throw Error(ErrorCode::ConfigInvalid, "k_min exceeds k_max");
  if (shortcut && *shortcut < 0) {
    throw Error(ErrorCode::ConfigInvalid, "shortcut must be non-negative");
  }
}

bool should_extend(std::int64_t c, std::int64_t c_best, int k, const ExtractConfig& config) {
  if (!config.shortcut || c_best == kNoCost) return true;
  const int gap = config.k_max - k;
  if (gap <= 0) return false;
  const auto ln_term = static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(gap))));
  const std::int64_t slack = std::min<std::int64_t>(1 + gap, *config.shortcut + ln_term);
  return c <= c_best + slack;
}

std::vector<NodeId> SetEnumerator::mark_distances(const DiGraph& graph,
                                                  std::span<const NodeId> targets) {
  if (dist_.size() < graph.id_space()) dist_.assign(graph.id_space(), kFar);
  std::deque<NodeId> queue;
  for (NodeId t : targets) {
    if (!graph.is_active(t) || dist_[t] != kFar) continue;
    dist_[t] = 0;
    touched_.push_back(t);
    queue.push_back(t);
  }
  const int reach = config_.k_max - 1;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (dist_[v] >= reach) continue;
    auto relax = [&](NodeId u) {
      if (dist_[u] != kFar) return;
      dist_[u] = static_cast<std::uint8_t>(dist_[v] + 1);
      touched_.push_back(u);
      queue.push_back(u);
    };
    for (NodeId u : graph.out_neighbors(v)) relax(u);
    for (NodeId u : graph.in_neighbors(v)) relax(u);
  }
  std::vector<NodeId> roots = touched_;
  std::sort(roots.begin(), roots.end());
  return roots;
}

void SetEnumerator::clear_distances() {
  for (NodeId v : touched_) dist_[v] = kFar;
  touched_.clear();
}

bool SetEnumerator::removable(int count, int skip) const {
  const unsigned all = ((1u << count) - 1) & ~(1u << skip);
  const int start = skip == 0 ? 1 : 0;
  unsigned seen = 1u << start;
  unsigned frontier = seen;
  while (frontier) {
    unsigned next = 0;
    for (int j = 0; j < count; ++j) {
      if ((frontier >> j) & 1u) next |= link_[j];
    }
    next &= all & ~seen;
    seen |= next;
    frontier = next;
  }
  return seen == all;
}

std::vector<NodeSet> enumerate_connected_sets(const DiGraph& graph, const ExtractConfig& config) {
  std::vector<NodeSet> out;
  std::int64_t best = kNoCost;
  SetEnumerator en(config);
  en.run(
      graph,
      [&](const NodeSet& nodes, bool emit) -> std::int64_t {
        const std::int64_t c = scan_masks(boundary_profile(graph, nodes)).cost;
        if (emit) {
          out.push_back(nodes);
          best = std::min(best, c);
        }
        return c;
      },
      [&] { return best; });
  std::sort(out.begin(), out.end());
  return out;
}

NodeSet affected_nodes(const DiGraph& before, std::span<const NodeId> collapsed,
                       std::span<const EdgeEdit> edits) {
  NodeSet set = make_node_set(collapsed);
  NodeSet out;
  if (!set.empty()) out.push_back(set.front());
  for (const auto& e : edits) {
    out.push_back(e.src);
    out.push_back(e.dst);
  }
  const BoundaryProfile p = boundary_profile(before, set);
  for (const auto& [u, m] : p.in_ext) {
    if (std::popcount(unsigned(m)) >= 2) out.push_back(u);
  }
  for (const auto& [u, m] : p.out_ext) {
    if (std::popcount(unsigned(m)) >= 2) out.push_back(u);
  }
  return make_node_set(out);
}

NodeSet boundary_neighbors(const DiGraph& graph, std::span<const NodeId> collapsed) {
  NodeSet set = make_node_set(collapsed);
  NodeSet out;
  for (NodeId v : set) {
    for (NodeId u : graph.out_neighbors(v)) {
      if (!std::binary_search(set.begin(), set.end(), u)) out.push_back(u);
    }
    for (NodeId u : graph.in_neighbors(v)) {
      if (!std::binary_search(set.begin(), set.end(), u)) out.push_back(u);
    }
  }
  return make_node_set(out);
}

EnumState::EnumState(const ExtractConfig& config, FragmentCanonicalizer& canon,
                     OccurrenceListener* listener)
    : config_(config), canon_(&canon), listener_(listener), enumerator_(config) {}

std::int64_t EnumState::c_best() const {
  return cost_counts_.empty() ? kNoCost : cost_counts_.begin()->first;
}

std::int64_t EnumState::visit(const DiGraph& graph, const NodeSet& nodes, bool emit) {
  BoundaryProfile profile = boundary_profile(graph, nodes);
  MaskScan scan = scan_masks(profile);
  if (emit) {
    Occurrence occ;
    occ.nodes = nodes;
    occ.k = profile.k;
    occ.cost = scan.cost;
    occ.adj = profile.adj;
    const auto& entry = canon_->get(profile.k, profile.adj);
    occ.form = entry.form;
    occ.shape_key = (std::uint64_t(profile.k) << 56) | entry.form->code;
    occ.in = std::move(scan.in);
    occ.out = std::move(scan.out);
    add(std::move(occ));
  }
  return scan.cost;
}

void EnumState::add(Occurrence occ) {
  occ.alive = true;
  std::uint32_t slot;
  if (!free_.empty()) {
    slot = free_.back();
    free_.pop_back();
    occ_[slot] = std::move(occ);
  } else {
    slot = static_cast<std::uint32_t>(occ_.size());
    occ_.push_back(std::move(occ));
  }
  const Occurrence& o = occ_[slot];
  for (NodeId v : o.nodes) {
    if (by_node_.size() <= v) by_node_.resize(std::size_t(v) + 1);
    by_node_[v].push_back(slot);
  }
  ++cost_counts_[o.cost];
  ++live_;
  if (listener_) listener_->on_added(slot, o);
}

void EnumState::remove(std::uint32_t slot) {
  Occurrence& o = occ_[slot];
  if (listener_) listener_->on_removed(slot, o);
  auto it = cost_counts_.find(o.cost);
  if (--it->second == 0) cost_counts_.erase(it);
  o.alive = false;
  o.nodes.clear();
  o.form.reset();
  free_.push_back(slot);
  --live_;
}

void EnumState::remove_touching(std::span<const NodeId> nodes) {
  std::vector<std::uint32_t> doomed;
  for (NodeId v : nodes) {
    if (v >= by_node_.size()) continue;
    auto& list = by_node_[v];
    for (std::uint32_t s : list) {
      const Occurrence& o = occ_[s];
      if (o.alive && std::binary_search(o.nodes.begin(), o.nodes.end(), v)) doomed.push_back(s);
    }
    list.clear();
  }
  std::sort(doomed.begin(), doomed.end());
  doomed.erase(std::unique(doomed.begin(), doomed.end()), doomed.end());
  for (std::uint32_t s : doomed) remove(s);
}

void EnumState::rebuild(const DiGraph& graph) {
  for (std::uint32_t s = 0; s < occ_.size(); ++s) {
    if (occ_[s].alive) remove(s);
  }
  occ_.clear();
  free_.clear();
  by_node_.assign(graph.id_space(), {});
  enumerator_.run(
      graph, [&](const NodeSet& nodes, bool emit) { return visit(graph, nodes, emit); },
      [&] { return c_best(); });
}

void EnumState::update(const DiGraph& graph, std::span<const NodeId> invalid,
                       std::span<const NodeId> targets) {
  remove_touching(invalid);
  std::vector<NodeId> live;
  for (NodeId t : targets) {
    if (graph.is_active(t)) live.push_back(t);
  }
  if (live.empty()) return;
  enumerator_.run_around(
      graph, live, [&](const NodeSet& nodes, bool emit) { return visit(graph, nodes, emit); },
      [&] { return c_best(); });
}

std::vector<NodeSet> EnumState::sets() const {
  std::vector<NodeSet> out;
  for (const auto& o : occ_) {
    if (o.alive) out.push_back(o.nodes);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<NodeSet, int>> EnumState::snapshot() const {
  std::vector<std::pair<NodeSet, int>> out;
  for (const auto& o : occ_) {
    if (o.alive) out.emplace_back(o.nodes, o.cost);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ktg
