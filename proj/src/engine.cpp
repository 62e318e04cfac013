#include "ktg/engine.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "ktg/error.hpp"

namespace ktg {

namespace {

int position_of(const NodeSet& nodes, NodeId v) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) return -1;
  return static_cast<int>(it - nodes.begin());
}

/// Local mask whose image under `labeling` is `canonical`.
Mask pull_mask(Mask canonical, const std::array<std::uint8_t, kMaxRuleSize>& labeling, int k) {
  Mask out = 0;
  for (int j = 0; j < k; ++j) {
    if ((canonical >> labeling[j]) & 1u) out |= Mask(1u << j);
  }
  return out;
}

ApplicationRecord make_record(RuleId rule, const NodeSet& nodes,
                              const std::array<std::uint8_t, kMaxRuleSize>& labeling,
                              std::span<const EdgeEdit> edits) {
  ApplicationRecord rec;
  rec.rule = rule;
  rec.survivor = nodes.front();
  rec.placement.resize(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) rec.placement[labeling[j]] = nodes[j];
  for (const auto& e : edits) {
    RecordEdit re;
    const int s = position_of(nodes, e.src);
    if (s >= 0) {
      re.position = labeling[s];
      re.external = e.dst;
      re.direction = EditDirection::Out;
    } else {
      re.position = labeling[position_of(nodes, e.dst)];
      re.external = e.src;
      re.direction = EditDirection::In;
    }
    rec.edits.push_back(re);
  }
  return rec;
}

/// Edge count after applying the edits implied by (in, out) and collapsing.
std::uint64_t edges_after(const DiGraph& graph, const BoundaryProfile& p, Mask in, Mask out) {
  std::int64_t e = static_cast<std::int64_t>(graph.edge_count());
  for (int j = 0; j < p.k; ++j) e -= std::popcount(unsigned(p.adj[j]));
  for (const auto& [u, a] : p.in_ext) {
    e -= std::popcount(unsigned(a));
    if (resolve_boundary(a, in) != 0) ++e;
  }
  for (const auto& [u, a] : p.out_ext) {
    e -= std::popcount(unsigned(a));
    if (resolve_boundary(a, out) != 0) ++e;
  }
  return static_cast<std::uint64_t>(e);
}

}  // namespace

std::vector<NodeId> ApplicationRecord::freed_ids() const {
  std::vector<NodeId> out;
  for (NodeId v : placement) {
    if (v != survivor) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Extractor::Extractor(DiGraph graph, const ExtractConfig& config)
    : graph_(std::move(graph)),
      config_(config),
      state_(config, canon_, this) {
  config_.validate();
  original_nodes_ = graph_.id_space();
  original_edges_ = graph_.edge_count();
  state_.rebuild(graph_);
}

Extractor::~Extractor() = default;

void Extractor::attach(std::uint32_t slot, RuleId rule) {
  if (tables_.size() <= rule) tables_.resize(std::size_t(rule) + 1);
  const Occurrence& occ = state_.at(slot);
  Table& t = tables_[rule];
  t.entries.insert(Entry{occ.cost, occ.nodes, slot});
  ++t.hist[occ.cost];
  t.dirty = true;
  occ_rules_[slot].push_back(rule);
}

bool Extractor::compatible(const Occurrence& occ, const CanonicalCode& code) const {
  if (occ.in.any && occ.out.any) return true;
  const bool in_side = !occ.in.any;
  const auto& masks = in_side ? occ.in.masks : occ.out.masks;
  const Mask want = in_side ? code.in_mask : code.out_mask;
  for (const auto& lab : occ.form->labelings) {
    for (Mask m : masks) {
      if (map_mask(m, lab, occ.k) == want) return true;
    }
  }
  return false;
}

void Extractor::on_added(std::uint32_t slot, const Occurrence& occ) {
  if (occ_rules_.size() <= slot) occ_rules_.resize(std::size_t(slot) + 1);
  occ_rules_[slot].clear();
  const std::vector<Mask> zero{0};
  const auto& ins = occ.in.any ? zero : occ.in.masks;
  const auto& outs = occ.out.any ? zero : occ.out.masks;

  std::vector<CanonicalCode> codes;
  for (Mask i : ins) {
    for (Mask o : outs) {
      auto [packed, idx] = canonical_masks(*occ.form, i, o);
      codes.push_back(CanonicalCode{static_cast<std::uint8_t>(occ.k), occ.form->code,
                                    static_cast<std::uint8_t>(packed >> 8),
                                    static_cast<std::uint8_t>(packed & 0xFF)});
    }
  }
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());

  std::vector<RuleId> mine;
  for (const auto& code : codes) {
    auto [id, is_new] = library_.intern(code);
    mine.push_back(id);
    if (!is_new) continue;
    rules_by_shape_[occ.shape_key].push_back(id);
    // wildcard occurrences of this shape may also match the new rule
    auto wit = wild_by_shape_.find(occ.shape_key);
    if (wit == wild_by_shape_.end()) continue;
    auto& list = wit->second;
    std::size_t w = 0;
    for (std::uint32_t s : list) {
      const Occurrence& other = state_.at(s);
      if (!other.alive || other.shape_key != occ.shape_key || (!other.in.any && !other.out.any)) {
        continue;
      }
      list[w++] = s;
      auto& rs = occ_rules_[s];
      if (std::find(rs.begin(), rs.end(), id) != rs.end()) continue;
      if (compatible(other, code)) attach(s, id);
    }
    list.resize(w);
  }
  if (occ.in.any || occ.out.any) {
    for (RuleId id : rules_by_shape_[occ.shape_key]) {
      if (compatible(occ, library_.code(id))) mine.push_back(id);
    }
    wild_by_shape_[occ.shape_key].push_back(slot);
  }
  std::sort(mine.begin(), mine.end());
  mine.erase(std::unique(mine.begin(), mine.end()), mine.end());
  for (RuleId id : mine) attach(slot, id);
}

void Extractor::on_removed(std::uint32_t slot, const Occurrence& occ) {
  for (RuleId id : occ_rules_[slot]) {
    Table& t = tables_[id];
    t.entries.erase(Entry{occ.cost, occ.nodes, slot});
    auto it = t.hist.find(occ.cost);
    if (--it->second == 0) t.hist.erase(it);
    t.dirty = true;
  }
  occ_rules_[slot].clear();
}

const PcrResult& Extractor::table_pcr(RuleId rule) const {
  const Table& t = tables_[rule];
  if (t.dirty) {
    const int k = library_.code(rule).k;
    std::vector<CostLevel> levels;
    levels.reserve(t.hist.size());
    for (const auto& [c, x] : t.hist) levels.push_back(CostLevel{c, x, x * k});
    t.pcr = pcr(levels, bit_params(k, original_nodes_, library_.frequency(rule) > 0));
    t.dirty = false;
  }
  return t.pcr;
}

std::optional<Selection> Extractor::select_best() const {
  std::optional<RuleId> best;
  for (RuleId id = 0; id < tables_.size(); ++id) {
    const Table& t = tables_[id];
    if (t.entries.empty()) continue;
    if (!best) {
      best = id;
      continue;
    }
    const PcrResult& a = table_pcr(id);
    const PcrResult& b = table_pcr(*best);
    const int cmp = compare_ratio(a.nodes, a.bits, b.nodes, b.bits);
    if (cmp < 0) continue;
    if (cmp == 0) {
      const int ca = t.hist.begin()->first;
      const int cb = tables_[*best].hist.begin()->first;
      if (ca > cb) continue;
      if (ca == cb && library_.code(id).k >= library_.code(*best).k) continue;
    }
    best = id;
  }
  if (!best) return std::nullopt;
  const Entry& e = *tables_[*best].entries.begin();
  return Selection{*best, e.slot, e.cost, e.nodes, table_pcr(*best)};
}

std::vector<int> Extractor::occurrence_costs(RuleId rule) const {
  std::vector<int> out;
  if (rule >= tables_.size()) return out;
  for (const auto& e : tables_[rule].entries) out.push_back(e.cost);
  return out;
}

Extractor::Plan Extractor::plan(const Occurrence& occ, RuleId rule) const {
  const CanonicalCode& code = library_.code(rule);
  for (std::size_t l = 0; l < occ.form->labelings.size(); ++l) {
    const auto& lab = occ.form->labelings[l];
    auto side = [&](const SideScan& s, Mask want) -> std::optional<Mask> {
      if (s.any) return pull_mask(want, lab, occ.k);
      for (Mask m : s.masks) {
        if (map_mask(m, lab, occ.k) == want) return m;
      }
      return std::nullopt;
    };
    auto in = side(occ.in, code.in_mask);
    auto out = side(occ.out, code.out_mask);
    if (in && out) return Plan{*in, *out, l};
  }
  throw Error(ErrorCode::StaleCandidate, "occurrence does not realize rule " + std::to_string(rule));
}

bool Extractor::exceeds_savings(const Selection& sel) const {
  const Occurrence& occ = state_.at(sel.slot);
  const Plan p = plan(occ, sel.rule);
  const BoundaryProfile profile = boundary_profile(graph_, occ.nodes);
  const std::uint64_t e_after = edges_after(graph_, profile, p.in, p.out);
  const std::uint64_t v_now = graph_.node_count();
  const std::uint64_t v_after = v_now - static_cast<std::uint64_t>(occ.k) + 1;
  const std::int64_t saving = b_graph(v_now, graph_.edge_count()) - b_graph(v_after, e_after);
  const bool same = !records_.empty() && records_.back().rule == sel.rule;
  std::int64_t marginal = b_application(occ.k, occ.cost, original_nodes_, same);
  if (library_.frequency(sel.rule) == 0) marginal += b_rule(occ.k, original_nodes_);
  return marginal > saving;
}

const ApplicationRecord& Extractor::extract(const Selection& sel) {
  const Occurrence& occ = state_.at(sel.slot);
  if (!occ.alive || occ.nodes != sel.nodes) {
    throw Error(ErrorCode::StaleCandidate, "selected occurrence is no longer stored");
  }
  const NodeSet nodes = occ.nodes;
  const Plan p = plan(occ, sel.rule);
  const auto labeling = occ.form->labelings[p.labeling];
  const BoundaryProfile profile = boundary_profile(graph_, nodes);
  if (profile.adj != occ.adj) {
    throw Error(ErrorCode::StaleCandidate, "fragment changed since enumeration");
  }
  const EditCostResult ec = edit_cost(profile, nodes, p.in, p.out);
  if (config_.invalidation == Invalidation::Exact && ec.cost != occ.cost) {
    throw Error(ErrorCode::StaleCandidate, "edit cost changed since enumeration");
  }

  NodeSet affected = affected_nodes(graph_, nodes, ec.edits);
  if (config_.invalidation == Invalidation::Exact) {
    NodeSet around = boundary_neighbors(graph_, nodes);
    affected.insert(affected.end(), around.begin(), around.end());
    affected = make_node_set(affected);
  }

  records_.push_back(make_record(sel.rule, nodes, labeling, ec.edits));
  for (const auto& e : ec.edits) graph_.apply(e);
  graph_.collapse(nodes);

  library_.increment_frequency(sel.rule);
  tables_[sel.rule].dirty = true;
  RuleStats& st = stats_[sel.rule];
  ++st.frequency;
  ++st.cost_histogram[ec.cost];
  st.edges_edited += ec.edits.size();

  NodeSet invalid = affected;
  invalid.insert(invalid.end(), nodes.begin(), nodes.end());
  invalid = make_node_set(invalid);
  state_.update(graph_, invalid, affected);
  if (state_.size() == 0) refill();
  return records_.back();
}

void Extractor::refill() {
  for (const auto& comp : weak_components(graph_)) {
    if (comp.size() >= static_cast<std::size_t>(config_.k_min)) {
      state_.rebuild(graph_);
      return;
    }
  }
}

void Extractor::run() {
  while (auto sel = select_best()) {
    if (config_.mdl_stop && exceeds_savings(*sel)) break;
    const RuleId rule = sel->rule;
    const int cost = sel->cost;
    extract(*sel);
    if (!config_.batch) continue;
    while (!tables_[rule].entries.empty()) {
      const Entry& e = *tables_[rule].entries.begin();
      if (e.cost > cost) break;
      Selection same{rule, e.slot, e.cost, e.nodes, table_pcr(rule)};
      if (config_.mdl_stop && exceeds_savings(same)) break;
      extract(same);
    }
  }
}

ExtractionResult Extractor::finish() && {
  ExtractionResult r;
  r.config = config_;
  r.original_nodes = original_nodes_;
  r.original_edges = original_edges_;
  r.grammar = std::move(library_);
  r.records = std::move(records_);
  r.residual = std::move(graph_);
  r.stats = std::move(stats_);
  r.account = account_for(r);
  return r;
}

ExtractionResult extract(const DiGraph& graph, const ExtractConfig& config) {
  config.validate();
  Extractor ex(graph, config);
  ex.run();
  return std::move(ex).finish();
}

BitAccount account_for(const ExtractionResult& result) {
  std::vector<ApplicationShape> shapes;
  shapes.reserve(result.records.size());
  for (const auto& rec : result.records) {
    shapes.push_back(ApplicationShape{rec.rule, static_cast<int>(rec.placement.size()),
                                      static_cast<int>(rec.edits.size())});
  }
  return account_bits(result.original_nodes, result.original_edges, result.residual.node_count(),
                      result.residual.edge_count(), shapes);
}

ExtractOneResult extract_one(const DiGraph& graph, const CandidateOccurrence& candidate,
                             RuleLibrary& library) {
  const NodeSet nodes = make_node_set(candidate.nodes);
  const KTRule& rule = candidate.rule;
  if (nodes.size() != candidate.nodes.size() || rule.k != static_cast<int>(nodes.size())) {
    throw Error(ErrorCode::StaleCandidate, "candidate size does not match its rule");
  }
  for (NodeId v : nodes) {
    if (!graph.is_active(v)) throw Error(ErrorCode::StaleCandidate, "candidate node is inactive");
  }
  const BoundaryProfile profile = boundary_profile(graph, nodes);
  for (int j = 0; j < rule.k; ++j) {
    if (profile.adj[j] != rule.adj[j]) {
      throw Error(ErrorCode::StaleCandidate, "candidate fragment does not match the graph");
    }
  }
  const EditCostResult ec = edit_cost(profile, nodes, rule.in_mask, rule.out_mask);
  if (ec.cost != candidate.cost || ec.edits != candidate.edits) {
    throw Error(ErrorCode::StaleCandidate, "candidate edits do not match the graph");
  }
  const CanonicalRule canon = canonicalize(rule);
  const RuleId id = library.intern(canon.code).id;
  library.increment_frequency(id);

  ExtractOneResult out;
  out.record = make_record(id, nodes, canon.labeling, ec.edits);
  out.graph = graph;
  for (const auto& e : ec.edits) out.graph.apply(e);
  out.graph.collapse(nodes);
  return out;
}

DiGraph decode(const DiGraph& residual, const RuleLibrary& grammar,
               std::span<const ApplicationRecord> records) {
  DiGraph g = residual;
  for (std::size_t r = records.size(); r-- > 0;) {
    const ApplicationRecord& rec = records[r];
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::CorruptRecord, "record " + std::to_string(r) + ": " + why);
    };
    if (rec.rule >= grammar.size()) throw fail("unknown rule id");
    const KTRule rule = rule_from_code(grammar.code(rec.rule));
    if (rec.placement.size() != static_cast<std::size_t>(rule.k)) {
      throw fail("placement size does not match rule");
    }
    for (NodeId v : rec.placement) {
      if (v >= g.id_space()) throw fail("id out of range");
    }
    if (*std::min_element(rec.placement.begin(), rec.placement.end()) != rec.survivor) {
      throw fail("survivor is not the smallest placed id");
    }
    try {
      apply_rule_in_place(g, rec.survivor, rule, rec.placement);
      for (const auto& e : rec.edits) {
        if (e.position >= rule.k) throw fail("edit position out of range");
        if (std::find(rec.placement.begin(), rec.placement.end(), e.external) !=
            rec.placement.end()) {
          throw fail("edit touches a fragment edge");
        }
        const NodeId w = rec.placement[e.position];
        if (e.direction == EditDirection::In) {
          g.toggle_edge(e.external, w);
        } else {
          g.toggle_edge(w, e.external);
        }
      }
    } catch (const Error& err) {
      if (err.code() == ErrorCode::CorruptRecord) throw;
      throw fail(err.what());
    }
  }
  return g;
}

DiGraph decode(const ExtractionResult& result) {
  return decode(result.residual, result.grammar, result.records);
}

}  // namespace ktg
