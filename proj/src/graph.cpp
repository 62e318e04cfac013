#include "ktg/graph.hpp"

#include <algorithm>
#include <string>

#include "ktg/error.hpp"

namespace ktg {

namespace {

bool sorted_contains(const std::vector<NodeId>& v, NodeId x) {
  return std::binary_search(v.begin(), v.end(), x);
}

bool sorted_insert(std::vector<NodeId>& v, NodeId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) return false;
  v.insert(it, x);
  return true;
}

bool sorted_erase(std::vector<NodeId>& v, NodeId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) return false;
  v.erase(it);
  return true;
}

std::string edge_str(NodeId u, NodeId v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

}  // namespace

NodeSet make_node_set(std::span<const NodeId> nodes) {
  NodeSet s(nodes.begin(), nodes.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

EdgeEdit inverse(const EdgeEdit& edit) {
  return {edit.src, edit.dst, edit.kind == EditKind::Add ? EditKind::Delete : EditKind::Add};
}

DiGraph::DiGraph(std::size_t id_space)
    : active_(id_space, 1), out_(id_space), in_(id_space), active_count_(id_space) {}

DiGraph DiGraph::empty_id_space(std::size_t id_space) {
  DiGraph g(id_space);
  std::fill(g.active_.begin(), g.active_.end(), 0);
  g.active_count_ = 0;
  return g;
}

NodeSet DiGraph::active_nodes() const {
  NodeSet result;
  result.reserve(active_count_);
  for (NodeId v = 0; v < active_.size(); ++v) {
    if (active_[v]) result.push_back(v);
  }
  return result;
}

bool DiGraph::has_edge(NodeId u, NodeId v) const {
  if (u >= out_.size() || v >= out_.size()) return false;
  const auto& a = out_[u];
  const auto& b = in_[v];
  return a.size() <= b.size() ? sorted_contains(a, v) : sorted_contains(b, u);
}

void DiGraph::require_active(NodeId v) const {
  if (!is_active(v)) {
    throw Error(ErrorCode::InactiveEndpoint, "node " + std::to_string(v) + " is not active");
  }
}

void DiGraph::add_edge(NodeId u, NodeId v) {
  require_active(u);
  require_active(v);
  if (u == v) throw Error(ErrorCode::SelfLoop, "self-loop on node " + std::to_string(u));
  if (!sorted_insert(out_[u], v)) {
    throw Error(ErrorCode::EditContradictsState, "edge " + edge_str(u, v) + " already present");
  }
  sorted_insert(in_[v], u);
  ++edge_count_;
}

void DiGraph::remove_edge(NodeId u, NodeId v) {
  require_active(u);
  require_active(v);
  if (!sorted_erase(out_[u], v)) {
    throw Error(ErrorCode::EditContradictsState, "edge " + edge_str(u, v) + " not present");
  }
  sorted_erase(in_[v], u);
  --edge_count_;
}

void DiGraph::toggle_edge(NodeId u, NodeId v) {
  if (has_edge(u, v)) {
    remove_edge(u, v);
  } else {
    add_edge(u, v);
  }
}

void DiGraph::apply(const EdgeEdit& edit) {
  if (edit.kind == EditKind::Add) {
    add_edge(edit.src, edit.dst);
  } else {
    remove_edge(edit.src, edit.dst);
  }
}

void DiGraph::activate(NodeId v) {
  if (v >= active_.size()) {
    throw Error(ErrorCode::IdCollision, "id " + std::to_string(v) + " outside the id space");
  }
  if (active_[v]) throw Error(ErrorCode::IdCollision, "id " + std::to_string(v) + " is active");
  active_[v] = 1;
  ++active_count_;
}

void DiGraph::deactivate(NodeId v) {
  require_active(v);
  if (!out_[v].empty() || !in_[v].empty()) {
    throw Error(ErrorCode::EditContradictsState, "node " + std::to_string(v) + " still has edges");
  }
  active_[v] = 0;
  --active_count_;
}

NodeId DiGraph::collapse(std::span<const NodeId> nodes) {
  NodeSet set = make_node_set(nodes);
  if (set.size() < 2) throw Error(ErrorCode::TooSmall, "collapse needs at least two nodes");
  for (NodeId v : set) require_active(v);
  if (!is_weakly_connected(*this, set)) {
    throw Error(ErrorCode::NotConnected, "collapse set is not weakly connected");
  }

  const NodeId survivor = set.front();
  auto inside = [&](NodeId x) { return sorted_contains(set, x); };

  NodeSet ext_in;
  NodeSet ext_out;
  for (NodeId w : set) {
    for (NodeId u : in_[w]) {
      if (!inside(u)) ext_in.push_back(u);
    }
    for (NodeId u : out_[w]) {
      if (!inside(u)) ext_out.push_back(u);
    }
  }
  ext_in = make_node_set(ext_in);
  ext_out = make_node_set(ext_out);

  for (NodeId w : set) {
    for (NodeId t : out_[w]) {
      sorted_erase(in_[t], w);
      --edge_count_;
    }
    out_[w].clear();
    for (NodeId s : in_[w]) {
      sorted_erase(out_[s], w);
      --edge_count_;
    }
    in_[w].clear();
  }

  for (std::size_t i = 1; i < set.size(); ++i) {
    active_[set[i]] = 0;
    --active_count_;
  }
  for (NodeId u : ext_in) add_edge(u, survivor);
  for (NodeId u : ext_out) add_edge(survivor, u);
  return survivor;
}

std::vector<std::pair<NodeId, NodeId>> DiGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> result;
  result.reserve(edge_count_);
  for (NodeId u = 0; u < out_.size(); ++u) {
    for (NodeId v : out_[u]) result.emplace_back(u, v);
  }
  return result;
}

bool operator==(const DiGraph& a, const DiGraph& b) {
  return a.active_ == b.active_ && a.out_ == b.out_;
}

DiGraph apply_edit(const DiGraph& graph, const EdgeEdit& edit) {
  DiGraph g = graph;
  g.apply(edit);
  return g;
}

DiGraph induced_subgraph(const DiGraph& graph, std::span<const NodeId> nodes) {
  NodeSet set = make_node_set(nodes);
  DiGraph result = DiGraph::empty_id_space(graph.id_space());
  for (NodeId v : set) {
    if (!graph.is_active(v)) {
      throw Error(ErrorCode::InactiveEndpoint, "node " + std::to_string(v) + " is not active");
    }
    result.activate(v);
  }
  for (NodeId u : set) {
    for (NodeId v : graph.out_neighbors(u)) {
      if (std::binary_search(set.begin(), set.end(), v)) result.add_edge(u, v);
    }
  }
  return result;
}

CollapseResult collapse(const DiGraph& graph, std::span<const NodeId> nodes) {
  CollapseResult r{graph, 0};
  r.survivor = r.graph.collapse(nodes);
  return r;
}

BoundaryMaps external_neighbors(const DiGraph& graph, std::span<const NodeId> nodes) {
  NodeSet set = make_node_set(nodes);
  BoundaryMaps maps;
  for (NodeId w : set) {
    for (NodeId u : graph.in_neighbors(w)) {
      if (!std::binary_search(set.begin(), set.end(), u)) maps.in[u].push_back(w);
    }
    for (NodeId u : graph.out_neighbors(w)) {
      if (!std::binary_search(set.begin(), set.end(), u)) maps.out[u].push_back(w);
    }
  }
  return maps;
}

bool is_weakly_connected(const DiGraph& graph, std::span<const NodeId> nodes) {
  NodeSet set = make_node_set(nodes);
  if (set.empty()) return false;
  std::vector<char> seen(set.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  auto visit = [&](NodeId x) {
    auto it = std::lower_bound(set.begin(), set.end(), x);
    if (it == set.end() || *it != x) return;
    auto idx = static_cast<std::size_t>(it - set.begin());
    if (seen[idx]) return;
    seen[idx] = 1;
    ++reached;
    stack.push_back(idx);
  };
  while (!stack.empty()) {
    NodeId w = set[stack.back()];
    stack.pop_back();
    for (NodeId x : graph.out_neighbors(w)) visit(x);
    for (NodeId x : graph.in_neighbors(w)) visit(x);
  }
  return reached == set.size();
}

std::vector<NodeSet> weak_components(const DiGraph& graph) {
  std::vector<NodeSet> comps;
  std::vector<char> seen(graph.id_space(), 0);
  for (NodeId s = 0; s < graph.id_space(); ++s) {
    if (!graph.is_active(s) || seen[s]) continue;
    NodeSet comp;
    std::vector<NodeId> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      NodeId w = stack.back();
      stack.pop_back();
      comp.push_back(w);
      for (const auto* lst : {&graph.out_neighbors(w), &graph.in_neighbors(w)}) {
        for (NodeId x : *lst) {
          if (!seen[x]) {
            seen[x] = 1;
            stack.push_back(x);
          }
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace ktg
