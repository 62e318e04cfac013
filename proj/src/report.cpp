#include "ktg/report.hpp"

#include <sstream>

#include "ktg/error.hpp"

namespace ktg {

using nlohmann::json;

namespace {

json mask_bits(Mask m, int k) {
  json a = json::array();
  for (int p = 0; p < k; ++p) a.push_back(((m >> p) & 1u) ? 1 : 0);
  return a;
}

}  // namespace

json config_to_json(const ExtractConfig& config) {
  json j;
  j["k_min"] = config.k_min;
  j["k_max"] = config.k_max;
  if (config.shortcut) {
    j["shortcut"] = *config.shortcut;
  } else {
    j["shortcut"] = "off";
  }
  j["seed"] = config.seed;
  j["mdl_stop"] = config.mdl_stop;
  j["batch"] = config.batch;
  j["invalidation"] = config.invalidation == Invalidation::Exact ? "exact" : "local";
  return j;
}

json rule_to_json(const RuleLibrary& grammar, RuleId id) {
  const CanonicalCode& code = grammar.code(id);
  const KTRule rule = rule_from_code(code);
  json edges = json::array();
  for (auto [a, b] : rule.edges()) edges.push_back({a, b});
  return json{{"id", id},
              {"code", code.hex()},
              {"k", rule.k},
              {"edges", edges},
              {"i_mask", mask_bits(rule.in_mask, rule.k)},
              {"o_mask", mask_bits(rule.out_mask, rule.k)},
              {"frequency", grammar.frequency(id)},
              {"discoveries", grammar.discovery_count(id)}};
}

json grammar_to_json(const RuleLibrary& grammar) {
  json rules = json::array();
  json order = json::array();
  for (RuleId id : grammar.used_rules()) {
    rules.push_back(rule_to_json(grammar, id));
    order.push_back(id);
  }
  return json{{"schema_version", kSchemaVersion}, {"rules", rules}, {"order", order}};
}

json account_to_json(const BitAccount& a) {
  return json{{"original_bits", a.original_bits},       {"rule_bits", a.rule_bits},
              {"application_bits", a.application_bits}, {"residual_bits", a.residual_bits},
              {"compressed_bits", a.compressed_bits},   {"compression_rate", a.compression_rate()}};
}

json record_to_json(const ApplicationRecord& rec) {
  json edits = json::array();
  for (const auto& e : rec.edits) {
    edits.push_back({{"position", e.position},
                     {"external", e.external},
                     {"direction", e.direction == EditDirection::In ? "in" : "out"}});
  }
  return json{{"rule", rec.rule},
              {"survivor", rec.survivor},
              {"placement", rec.placement},
              {"freed_ids", rec.freed_ids()},
              {"edits", edits}};
}

json kl_to_json(const KlResult& kl, const std::vector<KlTerm>& ranked) {
  json contributions = json::array();
  for (const auto& t : ranked) {
    contributions.push_back({{"code", t.code.hex()}, {"value", t.value}, {"p", t.p}, {"q", t.q}});
  }
  return json{{"total", kl.total}, {"contributions", contributions}};
}

json run_to_json(const ExtractionResult& result, const json& manifest) {
  json records = json::array();
  for (const auto& rec : result.records) records.push_back(record_to_json(rec));
  json residual = json::array();
  for (auto [u, v] : result.residual.edges()) residual.push_back({u, v});
  json stats = json::array();
  for (const auto& [id, st] : result.stats) {
    json hist = json::object();
    for (const auto& [c, n] : st.cost_histogram) hist[std::to_string(c)] = n;
    stats.push_back({{"rule", id},
                     {"frequency", st.frequency},
                     {"cost_histogram", hist},
                     {"edges_edited", st.edges_edited}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"manifest", manifest},
              {"config", config_to_json(result.config)},
              {"original", {{"nodes", result.original_nodes}, {"edges", result.original_edges}}},
              {"grammar", grammar_to_json(result.grammar)},
              {"records", records},
              {"residual", {{"nodes", result.residual.active_nodes()}, {"edges", residual}}},
              {"bits", account_to_json(result.account)},
              {"rule_stats", stats}};
}

ExtractionResult load_run(const json& artifact) {
  try {
    ExtractionResult r;
    r.original_nodes = artifact.at("original").at("nodes").get<std::uint64_t>();
    r.original_edges = artifact.at("original").at("edges").get<std::uint64_t>();
    std::map<RuleId, RuleId> remap;
    for (const auto& rule : artifact.at("grammar").at("rules")) {
      auto code = CanonicalCode::from_hex(rule.at("code").get<std::string>());
      if (!code) throw Error(ErrorCode::CorruptRecord, "bad rule code");
      const RuleId id = r.grammar.insert(*code, rule.at("frequency").get<std::uint64_t>(),
                                         rule.value("discoveries", std::uint64_t{0}));
      remap[rule.at("id").get<RuleId>()] = id;
    }
    for (const auto& j : artifact.at("records")) {
      ApplicationRecord rec;
      auto it = remap.find(j.at("rule").get<RuleId>());
      if (it == remap.end()) throw Error(ErrorCode::CorruptRecord, "record names unknown rule");
      rec.rule = it->second;
      rec.survivor = j.at("survivor").get<NodeId>();
      rec.placement = j.at("placement").get<std::vector<NodeId>>();
      for (const auto& e : j.at("edits")) {
        RecordEdit re;
        re.position = e.at("position").get<std::uint8_t>();
        re.external = e.at("external").get<NodeId>();
        const auto dir = e.at("direction").get<std::string>();
        if (dir != "in" && dir != "out") throw Error(ErrorCode::CorruptRecord, "bad direction");
        re.direction = dir == "in" ? EditDirection::In : EditDirection::Out;
        rec.edits.push_back(re);
      }
      r.records.push_back(std::move(rec));
    }
    DiGraph g = DiGraph::empty_id_space(r.original_nodes);
    for (const auto& v : artifact.at("residual").at("nodes")) g.activate(v.get<NodeId>());
    for (const auto& e : artifact.at("residual").at("edges")) {
      g.add_edge(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
    }
    r.residual = std::move(g);
    r.account = account_for(r);
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptRecord, std::string("malformed artifact: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptRecord) throw;
    throw Error(ErrorCode::CorruptRecord, std::string("malformed artifact: ") + e.what());
  }
}

std::string rule_to_dot(const KTRule& rule, std::string_view name) {
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n";
  out << "  node [shape=circle];\n";
  for (int p = 0; p < rule.k; ++p) out << "  n" << p << " [label=\"" << p << "\"];\n";
  if (rule.in_mask) out << "  in [shape=point];\n";
  if (rule.out_mask) out << "  out [shape=point];\n";
  for (auto [a, b] : rule.edges()) out << "  n" << a << " -> n" << b << ";\n";
  for (int p = 0; p < rule.k; ++p) {
    if (rule.in_bit(p)) out << "  in -> n" << p << " [style=dashed];\n";
    if (rule.out_bit(p)) out << "  n" << p << " -> out [style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace ktg
