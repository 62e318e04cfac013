#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ktg/grammar.hpp"
#include "ktg/graph.hpp"
#include "ktg/mdl.hpp"

namespace ktg {

/// How occurrences are invalidated after an extraction. Exact also drops
/// every set touching a boundary neighbor of the collapsed set, so the
/// incremental state equals a rebuild when the shortcut is off.
enum class Invalidation { Exact, Local };

struct ExtractConfig {
  int k_min = 2;
  int k_max = 3;
  std::optional<int> shortcut = 1;  // nullopt disables the heuristic
  std::uint64_t seed = 0;
  bool mdl_stop = false;
  bool batch = false;
  Invalidation invalidation = Invalidation::Exact;

  /// Throws ConfigInvalid.
  void validate() const;
};

inline constexpr std::int64_t kNoCost = std::numeric_limits<std::int64_t>::max();

/// Enumeration heuristic: extend a set of size k with cheapest cost c while
/// c <= c_best + min(1 + k_max - k, s + ceil(ln(k_max - k))).
bool should_extend(std::int64_t c, std::int64_t c_best, int k, const ExtractConfig& config);

/// Canonical-parent DFS over weakly connected node sets.
///
/// `visit(const NodeSet& sorted, bool emit) -> std::int64_t` is called for
/// sets of size >= 2 that are either emitted (size in [k_min, k_max], and in
/// restricted mode containing a target) or need a cost for the heuristic; it
/// returns the cheapest edit cost of the set. `c_best()` returns the current
/// bound (kNoCost when unknown).
class SetEnumerator {
 public:
  explicit SetEnumerator(const ExtractConfig& config) : config_(config) {}

  template <class Visit, class CBest>
  void run(const DiGraph& graph, Visit&& visit, CBest&& c_best) {
    graph_ = &graph;
    restricted_ = false;
    for (NodeId r : graph.active_nodes()) root(r, visit, c_best);
    graph_ = nullptr;
  }

  /// Only sets containing at least one of `targets` are emitted.
  template <class Visit, class CBest>
  void run_around(const DiGraph& graph, std::span<const NodeId> targets, Visit&& visit,
                  CBest&& c_best) {
    graph_ = &graph;
    restricted_ = true;
    std::vector<NodeId> roots = mark_distances(graph, targets);
    for (NodeId r : roots) root(r, visit, c_best);
    clear_distances();
    graph_ = nullptr;
  }

 private:
  static constexpr std::uint8_t kFar = 0xFF;

  std::vector<NodeId> mark_distances(const DiGraph& graph, std::span<const NodeId> targets);
  void clear_distances();
  bool removable(int count, int skip) const;

  template <class Visit, class CBest>
  void root(NodeId r, Visit& visit, CBest& c_best) {
    set_[0] = r;
    link_[0] = 0;
    size_ = 1;
    root_ = r;
    grow(visit, c_best);
  }

  template <class Visit, class CBest>
  void grow(Visit& visit, CBest& c_best) {
    const int k = size_;
    int near = kFar;
    if (restricted_) {
      for (int j = 0; j < k; ++j) near = std::min<int>(near, dist_of(set_[j]));
    }
    const bool has_target = near == 0;
    std::int64_t cost = 0;
    if (k >= 2) {
      const bool emit = k >= config_.k_min && (!restricted_ || has_target);
      const bool need = emit || (config_.shortcut && k < config_.k_max);
      if (need) {
        sorted_.assign(set_.begin(), set_.begin() + k);
        std::sort(sorted_.begin(), sorted_.end());
        cost = visit(static_cast<const NodeSet&>(sorted_), emit);
      }
    }
    if (k == config_.k_max) return;
    if (restricted_ && k + near > config_.k_max) return;
    if (k >= 2 && !should_extend(cost, c_best(), k, config_)) return;

    std::vector<NodeId> cand;
    for (int j = 0; j < k; ++j) {
      const NodeId v = set_[j];
      for (NodeId u : graph_->out_neighbors(v)) {
        if (u > root_) cand.push_back(u);
      }
      for (NodeId u : graph_->in_neighbors(v)) {
        if (u > root_) cand.push_back(u);
      }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (NodeId u : cand) {
      if (std::find(set_.begin(), set_.begin() + k, u) != set_.begin() + k) continue;
      // undirected links between u and the current set
      Mask links = 0;
      for (int j = 0; j < k; ++j) {
        if (graph_->has_edge(u, set_[j]) || graph_->has_edge(set_[j], u)) {
          links |= Mask(1u << j);
        }
      }
      set_[k] = u;
      link_[k] = links;
      for (int j = 0; j < k; ++j) {
        if ((links >> j) & 1u) link_[j] |= Mask(1u << k);
      }
      size_ = k + 1;
      bool canonical = true;
      for (int j = 1; j < k && canonical; ++j) {
        if (set_[j] > u && removable(k + 1, j)) canonical = false;
      }
      if (canonical) grow(visit, c_best);
      size_ = k;
      for (int j = 0; j < k; ++j) link_[j] &= Mask(~(1u << k));
    }
  }

  std::uint8_t dist_of(NodeId v) const { return v < dist_.size() ? dist_[v] : kFar; }

  ExtractConfig config_;
  const DiGraph* graph_ = nullptr;
  bool restricted_ = false;
  NodeId root_ = 0;
  int size_ = 0;
  std::array<NodeId, kMaxRuleSize> set_{};
  std::array<Mask, kMaxRuleSize> link_{};  // undirected adjacency inside set_
  NodeSet sorted_;
  std::vector<std::uint8_t> dist_;
  std::vector<NodeId> touched_;
};

/// Every weakly connected set with k_min <= |S| <= k_max reachable under the
/// heuristic, sorted. The bound is the cheapest cost among sets seen so far.
std::vector<NodeSet> enumerate_connected_sets(const DiGraph& graph, const ExtractConfig& config);

/// Nodes whose occurrences an extraction invalidates: the survivor, edit
/// endpoints, and external nodes with two or more edges into (or out of) the
/// collapsed set. `before` is the graph before edits were applied.
NodeSet affected_nodes(const DiGraph& before, std::span<const NodeId> collapsed,
                       std::span<const EdgeEdit> edits);

/// Every node outside `collapsed` adjacent to it.
NodeSet boundary_neighbors(const DiGraph& graph, std::span<const NodeId> collapsed);

/// A stored candidate set with its cheapest masks.
struct Occurrence {
  NodeSet nodes;
  int k = 0;
  int cost = 0;
  FragmentAdjacency adj{};
  std::uint64_t shape_key = 0;  // (k << 56) | canonical fragment code
  std::shared_ptr<const FragmentForm> form;
  SideScan in;
  SideScan out;
  bool alive = false;
};

class OccurrenceListener {
 public:
  virtual ~OccurrenceListener() = default;
  virtual void on_added(std::uint32_t slot, const Occurrence& occ) = 0;
  virtual void on_removed(std::uint32_t slot, const Occurrence& occ) = 0;
};

/// Registered occurrences plus the running cheapest cost.
class EnumState {
 public:
  EnumState(const ExtractConfig& config, FragmentCanonicalizer& canon,
            OccurrenceListener* listener = nullptr);

  /// Drops everything and enumerates the whole graph.
  void rebuild(const DiGraph& graph);

  /// Removes occurrences containing any of `invalid`, then enumerates the
  /// sets containing at least one active node of `targets`.
  void update(const DiGraph& graph, std::span<const NodeId> invalid,
              std::span<const NodeId> targets);

  void remove_touching(std::span<const NodeId> nodes);

  /// kNoCost when empty.
  std::int64_t c_best() const;

  std::size_t size() const { return live_; }
  std::size_t slot_count() const { return occ_.size(); }
  const Occurrence& at(std::uint32_t slot) const { return occ_.at(slot); }

  /// Sorted node sets of all live occurrences.
  std::vector<NodeSet> sets() const;

  /// Sorted (nodes, cost) pairs of all live occurrences.
  std::vector<std::pair<NodeSet, int>> snapshot() const;

 private:
  std::int64_t visit(const DiGraph& graph, const NodeSet& nodes, bool emit);
  void add(Occurrence occ);
  void remove(std::uint32_t slot);

  ExtractConfig config_;
  FragmentCanonicalizer* canon_;
  OccurrenceListener* listener_;
  SetEnumerator enumerator_;
  std::vector<Occurrence> occ_;
  std::vector<std::uint32_t> free_;
  std::vector<std::vector<std::uint32_t>> by_node_;
  std::map<int, std::size_t> cost_counts_;
  std::size_t live_ = 0;
};

}  // namespace ktg
