#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace ktg {

/// Index into the fixed id space of a graph. Ids are never grown; a collapse
/// retires all but the smallest id of the collapsed set.
using NodeId = std::uint32_t;

/// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<NodeId>;

NodeSet make_node_set(std::span<const NodeId> nodes);

enum class EditKind : std::uint8_t { Add, Delete };

struct EdgeEdit {
  NodeId src = 0;
  NodeId dst = 0;
  EditKind kind = EditKind::Add;

  friend bool operator==(const EdgeEdit&, const EdgeEdit&) = default;
  friend auto operator<=>(const EdgeEdit&, const EdgeEdit&) = default;
};

EdgeEdit inverse(const EdgeEdit& edit);

/// Simple directed graph (no self-loops, no parallel edges) over a fixed id
/// space. Adjacency lists are kept sorted so iteration order is deterministic.
class DiGraph {
 public:
  DiGraph() = default;
  /// Graph over ids [0, id_space), all active, no edges.
  explicit DiGraph(std::size_t id_space);

  /// Graph over ids [0, id_space) with every id inactive.
  static DiGraph empty_id_space(std::size_t id_space);

  std::size_t id_space() const { return out_.size(); }
  std::size_t node_count() const { return active_count_; }
  std::size_t edge_count() const { return edge_count_; }

  bool is_active(NodeId v) const { return v < active_.size() && active_[v] != 0; }
  NodeSet active_nodes() const;

  const std::vector<NodeId>& out_neighbors(NodeId v) const { return out_[v]; }
  const std::vector<NodeId>& in_neighbors(NodeId v) const { return in_[v]; }
  std::size_t out_degree(NodeId v) const { return out_[v].size(); }
  std::size_t in_degree(NodeId v) const { return in_[v].size(); }

  bool has_edge(NodeId u, NodeId v) const;

  /// Throws InactiveEndpoint, SelfLoop or EditContradictsState (edge exists).
  void add_edge(NodeId u, NodeId v);
  /// Throws InactiveEndpoint or EditContradictsState (edge missing).
  void remove_edge(NodeId u, NodeId v);
  /// Adds the edge if missing, removes it otherwise.
  void toggle_edge(NodeId u, NodeId v);
  void apply(const EdgeEdit& edit);

  /// Reactivates a retired id as an isolated node. Throws IdCollision if active.
  void activate(NodeId v);
  /// Retires an isolated node. Throws EditContradictsState if it has edges.
  void deactivate(NodeId v);

  /// Replaces `nodes` with their smallest id. Boundary edges are merged onto
  /// the survivor, internal edges dropped. Throws TooSmall / NotConnected /
  /// InactiveEndpoint.
  NodeId collapse(std::span<const NodeId> nodes);

  /// All edges in (src, dst) lexicographic order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  friend bool operator==(const DiGraph& a, const DiGraph& b);

 private:
  void require_active(NodeId v) const;

  std::vector<std::uint8_t> active_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::size_t active_count_ = 0;
  std::size_t edge_count_ = 0;
};

DiGraph apply_edit(const DiGraph& graph, const EdgeEdit& edit);

/// Graph on the same id space in which exactly `nodes` are active and only the
/// edges of `graph` internal to `nodes` remain.
DiGraph induced_subgraph(const DiGraph& graph, std::span<const NodeId> nodes);

struct CollapseResult {
  DiGraph graph;
  NodeId survivor = 0;
};

CollapseResult collapse(const DiGraph& graph, std::span<const NodeId> nodes);

/// For every node outside `nodes` with an edge into (out of) the set, the exact
/// subset of `nodes` it touches.
struct BoundaryMaps {
  std::map<NodeId, NodeSet> in;   // external u -> {w in nodes : u->w}
  std::map<NodeId, NodeSet> out;  // external u -> {w in nodes : w->u}
};

BoundaryMaps external_neighbors(const DiGraph& graph, std::span<const NodeId> nodes);

/// Direction-ignored connectivity of `nodes` within `graph`.
bool is_weakly_connected(const DiGraph& graph, std::span<const NodeId> nodes);

/// Weakly connected components of the active nodes, each sorted; components
/// are ordered by their smallest id.
std::vector<NodeSet> weak_components(const DiGraph& graph);

}  // namespace ktg
