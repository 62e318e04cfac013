#include "ktg/grammar.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <string>

#include "ktg/error.hpp"

namespace ktg {

namespace {

using Labeling = std::array<std::uint8_t, kMaxRuleSize>;

// Colors from degree invariants, refined by neighbor-color multisets until
// the partition stops splitting. Ranks come from sorted signatures, so equal
// shapes produce equal color sequences.
std::array<int, kMaxRuleSize> refine_colors(int k, const FragmentAdjacency& adj) {
  std::array<int, kMaxRuleSize> color{};
  std::vector<std::vector<int>> sig(k);
  for (int v = 0; v < k; ++v) {
    Mask in = 0;
    for (int u = 0; u < k; ++u) {
      if ((adj[u] >> v) & 1u) in |= Mask(1u << u);
    }
    sig[v] = {std::popcount(adj[v]), std::popcount(in), std::popcount(Mask(adj[v] & in))};
  }
  auto rank = [&] {
    std::vector<std::vector<int>> uniq = sig;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (int v = 0; v < k; ++v) {
      color[v] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), sig[v]) - uniq.begin());
    }
    return static_cast<int>(uniq.size());
  };
  int classes = rank();
  while (classes < k) {
    for (int v = 0; v < k; ++v) {
      std::vector<int> outs;
      std::vector<int> ins;
      for (int u = 0; u < k; ++u) {
        if ((adj[v] >> u) & 1u) outs.push_back(color[u]);
        if ((adj[u] >> v) & 1u) ins.push_back(color[u]);
      }
      std::sort(outs.begin(), outs.end());
      std::sort(ins.begin(), ins.end());
      std::vector<int> s{color[v], static_cast<int>(outs.size())};
      s.insert(s.end(), outs.begin(), outs.end());
      s.insert(s.end(), ins.begin(), ins.end());
      sig[v] = std::move(s);
    }
    int next = rank();
    if (next == classes) break;
    classes = next;
  }
  return color;
}

struct LabelSearch {
  int k = 0;
  const FragmentAdjacency* adj = nullptr;
  std::array<int, kMaxRuleSize> pos_cell{};
  std::array<int, kMaxRuleSize> color{};
  std::array<int, kMaxRuleSize> order{};
  std::array<std::uint64_t, kMaxRuleSize> cur_prefix{};
  std::array<std::uint64_t, kMaxRuleSize> best_prefix{};
  bool have_best = false;
  std::uint64_t best = 0;
  std::vector<Labeling> labelings;
  unsigned used = 0;

  void leaf() {
    std::uint64_t code = k > 0 ? cur_prefix[k - 1] : 0;
    if (!have_best || code < best) {
      have_best = true;
      best = code;
      best_prefix = cur_prefix;
      labelings.clear();
    } else if (code != best) {
      return;
    }
    Labeling lab{};
    for (int p = 0; p < k; ++p) lab[order[p]] = static_cast<std::uint8_t>(p);
    labelings.push_back(lab);
  }

  void rec(int p, std::uint64_t prefix) {
    if (p == k) {
      leaf();
      return;
    }
    for (int v = 0; v < k; ++v) {
      if ((used >> v) & 1u || color[v] != pos_cell[p]) continue;
      std::uint64_t next = prefix;
      for (int q = 0; q < p; ++q) {
        const int w = order[q];
        next = (next << 1) | (((*adj)[w] >> v) & 1u);
        next = (next << 1) | (((*adj)[v] >> w) & 1u);
      }
      if (have_best && next > best_prefix[p]) continue;
      order[p] = v;
      cur_prefix[p] = next;
      used |= 1u << v;
      rec(p + 1, next);
      used &= ~(1u << v);
    }
  }
};

}  // namespace

KTRule KTRule::from_edges(int k, std::span<const std::pair<int, int>> edges, Mask in_mask,
                          Mask out_mask) {
  KTRule r;
  r.k = k;
  for (auto [a, b] : edges) r.adj[a] |= Mask(1u << b);
  r.in_mask = in_mask;
  r.out_mask = out_mask;
  return r;
}

std::vector<std::pair<int, int>> KTRule::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (has_edge(a, b)) e.emplace_back(a, b);
    }
  }
  return e;
}

int KTRule::edge_count() const {
  int n = 0;
  for (int a = 0; a < k; ++a) n += std::popcount(adj[a]);
  return n;
}

bool KTRule::is_valid() const {
  if (k < 1 || k > kMaxRuleSize) return false;
  const unsigned full = (1u << k) - 1u;
  if ((in_mask & ~full) || (out_mask & ~full)) return false;
  for (int a = 0; a < kMaxRuleSize; ++a) {
    if (a >= k && adj[a] != 0) return false;
    if (a < k && ((adj[a] >> a) & 1u)) return false;
    if (adj[a] & ~full) return false;
  }
  // weak connectivity
  unsigned seen = 1u;
  unsigned frontier = 1u;
  while (frontier) {
    unsigned next = 0;
    for (int a = 0; a < k; ++a) {
      if (!((frontier >> a) & 1u)) continue;
      next |= adj[a];
      for (int b = 0; b < k; ++b) {
        if ((adj[b] >> a) & 1u) next |= 1u << b;
      }
    }
    frontier = next & ~seen;
    seen |= next;
  }
  return seen == full;
}

KTRule permute(const KTRule& rule, std::span<const int> perm) {
  KTRule r;
  r.k = rule.k;
  r.frequency = rule.frequency;
  for (int a = 0; a < rule.k; ++a) {
    for (int b = 0; b < rule.k; ++b) {
      if (rule.has_edge(a, b)) r.adj[perm[a]] |= Mask(1u << perm[b]);
    }
    if (rule.in_bit(a)) r.in_mask |= Mask(1u << perm[a]);
    if (rule.out_bit(a)) r.out_mask |= Mask(1u << perm[a]);
  }
  return r;
}

std::vector<std::uint8_t> CanonicalCode::bytes() const {
  std::vector<std::uint8_t> b;
  b.reserve(11);
  b.push_back(k);
  for (int s = 56; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(adjacency >> s));
  b.push_back(in_mask);
  b.push_back(out_mask);
  return b;
}

std::string CanonicalCode::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  for (std::uint8_t byte : bytes()) {
    s.push_back(digits[byte >> 4]);
    s.push_back(digits[byte & 15]);
  }
  return s;
}

std::optional<CanonicalCode> CanonicalCode::from_hex(std::string_view text) {
  if (text.size() != 22) return std::nullopt;
  std::array<std::uint8_t, 11> b{};
  for (std::size_t i = 0; i < 11; ++i) {
    int v = 0;
    for (int h = 0; h < 2; ++h) {
      char c = text[2 * i + h];
      int d = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
      if (d < 0) return std::nullopt;
      v = v * 16 + d;
    }
    b[i] = static_cast<std::uint8_t>(v);
  }
  CanonicalCode c;
  c.k = b[0];
  for (int i = 1; i <= 8; ++i) c.adjacency = (c.adjacency << 8) | b[i];
  c.in_mask = b[9];
  c.out_mask = b[10];
  return c;
}

std::size_t CanonicalCodeHash::operator()(const CanonicalCode& c) const noexcept {
  std::uint64_t h = c.adjacency * 0x9E3779B97F4A7C15ull;
  h ^= (std::uint64_t(c.k) << 16 | std::uint64_t(c.in_mask) << 8 | c.out_mask) + 0x7F4A7C15ull +
       (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

std::uint64_t encode_fragment(int k, const FragmentAdjacency& adj) {
  std::uint64_t code = 0;
  for (int p = 1; p < k; ++p) {
    for (int q = 0; q < p; ++q) {
      code = (code << 1) | ((adj[q] >> p) & 1u);
      code = (code << 1) | ((adj[p] >> q) & 1u);
    }
  }
  return code;
}

FragmentAdjacency decode_fragment(int k, std::uint64_t code) {
  FragmentAdjacency adj{};
  int bit = k * (k - 1);
  auto next = [&] { return (code >> --bit) & 1u; };
  for (int p = 1; p < k; ++p) {
    for (int q = 0; q < p; ++q) {
      if (next()) adj[q] |= Mask(1u << p);
      if (next()) adj[p] |= Mask(1u << q);
    }
  }
  return adj;
}

FragmentForm canonical_fragment(int k, const FragmentAdjacency& adj) {
  LabelSearch s;
  s.k = k;
  s.adj = &adj;
  s.color = refine_colors(k, adj);
  std::array<int, kMaxRuleSize> sorted_colors = s.color;
  std::sort(sorted_colors.begin(), sorted_colors.begin() + k);
  for (int p = 0; p < k; ++p) s.pos_cell[p] = sorted_colors[p];
  s.rec(0, 0);

  FragmentForm form;
  form.k = k;
  form.code = s.best;
  form.labelings = std::move(s.labelings);
  return form;
}

Mask map_mask(Mask mask, const std::array<std::uint8_t, kMaxRuleSize>& labeling, int k) {
  Mask out = 0;
  for (int v = 0; v < k; ++v) {
    if ((mask >> v) & 1u) out |= Mask(1u << labeling[v]);
  }
  return out;
}

std::pair<std::uint16_t, std::size_t> canonical_masks(const FragmentForm& form, Mask in_mask,
                                                      Mask out_mask) {
  std::uint16_t best = 0xFFFF;
  std::size_t best_idx = 0;
  for (std::size_t l = 0; l < form.labelings.size(); ++l) {
    const auto& lab = form.labelings[l];
    auto key = static_cast<std::uint16_t>(map_mask(in_mask, lab, form.k) << 8 |
                                          map_mask(out_mask, lab, form.k));
    if (key < best) {
      best = key;
      best_idx = l;
    }
  }
  return {best, best_idx};
}

CanonicalCode canonical_code(const KTRule& rule) { return canonicalize(rule).code; }

CanonicalRule canonicalize(const KTRule& rule) {
  FragmentForm form = canonical_fragment(rule.k, rule.adj);
  auto [masks, idx] = canonical_masks(form, rule.in_mask, rule.out_mask);
  CanonicalRule out;
  out.code.k = static_cast<std::uint8_t>(rule.k);
  out.code.adjacency = form.code;
  out.code.in_mask = static_cast<std::uint8_t>(masks >> 8);
  out.code.out_mask = static_cast<std::uint8_t>(masks & 0xFF);
  out.labeling = form.labelings[idx];
  out.rule = rule_from_code(out.code);
  out.rule.frequency = rule.frequency;
  return out;
}

KTRule rule_from_code(const CanonicalCode& code) {
  KTRule r;
  r.k = code.k;
  r.adj = decode_fragment(code.k, code.adjacency);
  r.in_mask = code.in_mask;
  r.out_mask = code.out_mask;
  return r;
}

const FragmentCanonicalizer::Entry& FragmentCanonicalizer::get(int k,
                                                               const FragmentAdjacency& local_adj) {
  const std::uint64_t key = (std::uint64_t(k) << 56) | encode_fragment(k, local_adj);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  auto form = std::make_shared<FragmentForm>(canonical_fragment(k, local_adj));
  const std::uint64_t shape_key = (std::uint64_t(k) << 56) | form->code;
  auto [sit, inserted] = shapes_.try_emplace(shape_key, static_cast<std::uint32_t>(shapes_.size()));
  return memo_.emplace(key, Entry{sit->second, std::move(form)}).first->second;
}

RuleLibrary::InternResult RuleLibrary::intern(const KTRule& rule) {
  return intern(canonical_code(rule));
}

RuleLibrary::InternResult RuleLibrary::intern(const CanonicalCode& code) {
  auto it = index_.find(code);
  if (it != index_.end()) {
    ++discoveries_[it->second];
    return {it->second, false};
  }
  RuleId id = insert(code, 0, 1);
  return {id, true};
}

std::optional<RuleId> RuleLibrary::find(const CanonicalCode& code) const {
  auto it = index_.find(code);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RuleId RuleLibrary::insert(const CanonicalCode& code, std::uint64_t frequency,
                           std::uint64_t discoveries) {
  auto id = static_cast<RuleId>(rules_.size());
  KTRule r = rule_from_code(code);
  r.frequency = frequency;
  rules_.push_back(r);
  codes_.push_back(code);
  discoveries_.push_back(discoveries);
  index_.emplace(code, id);
  return id;
}

std::vector<RuleId> RuleLibrary::order() const {
  std::vector<RuleId> ids(rules_.size());
  for (RuleId i = 0; i < ids.size(); ++i) ids[i] = i;
  std::stable_sort(ids.begin(), ids.end(),
                   [&](RuleId a, RuleId b) { return discoveries_[a] > discoveries_[b]; });
  return ids;
}

std::vector<RuleId> RuleLibrary::used_rules() const {
  std::vector<RuleId> ids;
  for (RuleId id : order()) {
    if (rules_[id].frequency > 0) ids.push_back(id);
  }
  return ids;
}

void apply_rule_in_place(DiGraph& graph, NodeId target, const KTRule& rule,
                         std::span<const NodeId> id_assignment) {
  if (static_cast<int>(id_assignment.size()) != rule.k || rule.k < 1) {
    throw Error(ErrorCode::IdCollision, "id assignment size does not match rule size");
  }
  if (!graph.is_active(target)) {
    throw Error(ErrorCode::InactiveEndpoint, "target " + std::to_string(target) + " is not active");
  }
  int target_slots = 0;
  for (std::size_t p = 0; p < id_assignment.size(); ++p) {
    NodeId id = id_assignment[p];
    for (std::size_t q = 0; q < p; ++q) {
      if (id_assignment[q] == id) throw Error(ErrorCode::IdCollision, "duplicate id in assignment");
    }
    if (id == target) {
      ++target_slots;
    } else if (id >= graph.id_space() || graph.is_active(id)) {
      throw Error(ErrorCode::IdCollision, "id " + std::to_string(id) + " is not free");
    }
  }
  if (target_slots != 1) throw Error(ErrorCode::IdCollision, "target id missing from assignment");

  const std::vector<NodeId> ins = graph.in_neighbors(target);
  const std::vector<NodeId> outs = graph.out_neighbors(target);
  if (!ins.empty() && rule.in_mask == 0) {
    throw Error(ErrorCode::TargetHasInEdgesButNoIMask,
                "node " + std::to_string(target) + " has incoming edges");
  }
  if (!outs.empty() && rule.out_mask == 0) {
    throw Error(ErrorCode::TargetHasOutEdgesButNoOMask,
                "node " + std::to_string(target) + " has outgoing edges");
  }

  for (NodeId u : ins) graph.remove_edge(u, target);
  for (NodeId v : outs) graph.remove_edge(target, v);
  for (NodeId id : id_assignment) {
    if (id != target) graph.activate(id);
  }
  for (int a = 0; a < rule.k; ++a) {
    for (int b = 0; b < rule.k; ++b) {
      if (rule.has_edge(a, b)) graph.add_edge(id_assignment[a], id_assignment[b]);
    }
  }
  for (int p = 0; p < rule.k; ++p) {
    if (rule.in_bit(p)) {
      for (NodeId u : ins) graph.add_edge(u, id_assignment[p]);
    }
    if (rule.out_bit(p)) {
      for (NodeId v : outs) graph.add_edge(id_assignment[p], v);
    }
  }
}

DiGraph apply_rule(const DiGraph& graph, NodeId target, const KTRule& rule,
                   std::span<const NodeId> id_assignment) {
  DiGraph g = graph;
  apply_rule_in_place(g, target, rule, id_assignment);
  return g;
}

}  // namespace ktg
