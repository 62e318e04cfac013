// ktg: grammar extraction, round-trip checks, null-model comparison and sweeps.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ktg/analysis.hpp"
#include "ktg/edge_list.hpp"
#include "ktg/engine.hpp"
#include "ktg/error.hpp"
#include "ktg/report.hpp"
#include "ktg/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ktg;

namespace {

constexpr int kExitParse = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMismatch = 3;

struct Options {
  std::string input;
  std::string generator;
  std::size_t nodes = 1000;
  std::size_t branching = 3;
  std::size_t ring_size = 15;
  std::size_t degree = 4;
  double rewire = 0.0;
  std::uint64_t seed = 0;
  int kmin = 2;
  int kmax = 3;
  std::string shortcut = "1";
  bool mdl_stop = false;
  bool batch = false;
  bool local_invalidation = false;
  std::string out = "ktg-out";
  std::string emit = "json,dot";
  // roundtrip
  std::string artifact;
  // compare
  std::string against;
  std::size_t top = 5;
  // sweep
  std::string axis;
  std::vector<std::string> values;
};

ExtractConfig make_config(const Options& o) {
  ExtractConfig c;
  c.k_min = o.kmin;
  c.k_max = o.kmax;
  if (o.shortcut == "off") {
    c.shortcut.reset();
  } else {
    try {
      std::size_t used = 0;
      c.shortcut = std::stoi(o.shortcut, &used);
      if (used != o.shortcut.size()) throw std::invalid_argument(o.shortcut);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigInvalid, "--shortcut expects an integer or 'off'");
    }
  }
  c.seed = o.seed;
  c.mdl_stop = o.mdl_stop;
  c.batch = o.batch;
  c.invalidation = o.local_invalidation ? Invalidation::Local : Invalidation::Exact;
  c.validate();
  return c;
}

DiGraph generate(const Options& o, std::size_t nodes) {
  const std::uint64_t gseed = stream_seed(o.seed, "generator");
  if (o.generator == "bintree") return gen_binary_tree(nodes);
  if (o.generator == "treerings") return gen_tree_of_rings(o.branching, o.ring_size, nodes);
  if (o.generator == "ringlat") return gen_ring_lattice(nodes, o.degree);
  if (o.generator == "er") {
    // same density as a ring lattice of the configured degree
    return gen_er(nodes, nodes * o.degree / 2, gseed);
  }
  if (o.generator == "chunglu") {
    Rng rng(gseed);
    std::vector<std::uint64_t> out(nodes), in(nodes);
    const std::size_t m = nodes * o.degree / 2;
    for (std::size_t i = 0; i < m; ++i) {
      ++out[rng.below(nodes)];
      ++in[rng.below(nodes)];
    }
    return gen_chung_lu_directed(out, in, gseed);
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown generator '" + o.generator + "'");
}

DiGraph source_graph(const Options& o, std::optional<std::size_t> nodes = std::nullopt,
                     std::optional<double> rewire_r = std::nullopt) {
  if (!o.input.empty() && !o.generator.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "--input and --generator are exclusive");
  }
  DiGraph g;
  if (!o.input.empty()) {
    g = load_edge_list(o.input);
  } else if (!o.generator.empty()) {
    g = generate(o, nodes.value_or(o.nodes));
  } else {
    throw Error(ErrorCode::ConfigInvalid, "one of --input or --generator is required");
  }
  const double r = rewire_r.value_or(o.rewire);
  if (r > 0.0) g = rewire(g, NoiseConfig{r, stream_seed(o.seed, "rewire")});
  return g;
}

json manifest(const std::string& cmd, const Options& o) {
  json m;
  m["subcommand"] = cmd;
  if (!o.input.empty()) {
    m["input"] = o.input;
  } else {
    m["generator"] = {{"name", o.generator},   {"nodes", o.nodes},   {"branching", o.branching},
                      {"ring_size", o.ring_size}, {"degree", o.degree}};
  }
  m["noise"] = {{"rewire", o.rewire}, {"seed", stream_seed(o.seed, "rewire")}};
  m["seed"] = o.seed;
  m["out"] = o.out;
  m["emit"] = o.emit;
  return m;
}

bool emits(const Options& o, std::string_view what) {
  std::stringstream ss(o.emit);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == what) return true;
  }
  return false;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp);
    f << text;
  }
  fs::rename(tmp, path);
}

void write_rule_dots(const fs::path& dir, const RuleLibrary& g, const std::vector<RuleId>& ids) {
  for (RuleId id : ids) {
    const std::string name = "rule_" + std::to_string(id);
    write_file(dir / (name + ".dot"), rule_to_dot(rule_from_code(g.code(id)), name));
  }
}

void print_summary(const ExtractionResult& r) {
  std::cout << "nodes " << r.original_nodes << " edges " << r.original_edges << "\n"
            << "extractions " << r.records.size() << " rules " << r.grammar.used_rules().size()
            << "\n"
            << "residual nodes " << r.residual.node_count() << " edges "
            << r.residual.edge_count() << "\n"
            << "bits original " << r.account.original_bits << " compressed "
            << r.account.compressed_bits << "\n"
            << "compression_rate " << r.account.compression_rate() << "\n";
}

int cmd_extract(const Options& o) {
  const ExtractConfig config = make_config(o);
  const DiGraph g = source_graph(o);
  const ExtractionResult r = extract(g, config);
  const fs::path out(o.out);
  if (emits(o, "json")) {
    write_file(out / "run.json", run_to_json(r, manifest("extract", o)).dump(2) + "\n");
    json grammar = grammar_to_json(r.grammar);
    grammar["manifest"] = manifest("extract", o);
    write_file(out / "grammar.json", grammar.dump(2) + "\n");
  }
  if (emits(o, "dot")) write_rule_dots(out / "rules", r.grammar, r.grammar.used_rules());
  if (emits(o, "csv")) {
    std::ostringstream csv;
    csv << "rule,code,k,frequency,edges_edited\n";
    for (RuleId id : r.grammar.used_rules()) {
      const auto st = r.stats.find(id);
      csv << id << ',' << r.grammar.code(id).hex() << ',' << r.grammar.rule(id).k << ','
          << r.grammar.frequency(id) << ','
          << (st == r.stats.end() ? 0 : st->second.edges_edited) << '\n';
    }
    write_file(out / "rules.csv", csv.str());
  }
  print_summary(r);
  return 0;
}

/// First difference between two graphs, or empty.
std::string first_difference(const DiGraph& want, const DiGraph& got) {
  if (want.id_space() != got.id_space()) {
    return "id space " + std::to_string(want.id_space()) + " vs " + std::to_string(got.id_space());
  }
  for (NodeId v = 0; v < want.id_space(); ++v) {
    if (want.is_active(v) != got.is_active(v)) {
      return "node " + std::to_string(v) + (want.is_active(v) ? " missing" : " unexpected");
    }
  }
  const auto a = want.edges();
  const auto b = got.edges();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      return "edge " + std::to_string(a[i].first) + "->" + std::to_string(a[i].second) +
             " missing";
    }
    if (i == a.size() || b[j] < a[i]) {
      return "edge " + std::to_string(b[j].first) + "->" + std::to_string(b[j].second) +
             " unexpected";
    }
    ++i;
    ++j;
  }
  return {};
}

int cmd_roundtrip(const Options& o) {
  const DiGraph g = source_graph(o);
  ExtractionResult r;
  if (!o.artifact.empty()) {
    std::ifstream f(o.artifact);
    if (!f) throw Error(ErrorCode::ParseError, "cannot open " + o.artifact);
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::CorruptRecord, std::string("unreadable artifact: ") + e.what());
    }
    r = load_run(j);
  } else {
    r = extract(g, make_config(o));
  }
  DiGraph back;
  try {
    back = decode(r);
  } catch (const Error& e) {
    std::cerr << "decode failed: " << e.what() << "\n";
    return kExitMismatch;
  }
  const std::string diff = first_difference(g, back);
  if (!diff.empty()) {
    std::cerr << "mismatch: " << diff << "\n";
    return kExitMismatch;
  }
  std::cout << "roundtrip ok: " << g.node_count() << " nodes, " << g.edge_count() << " edges, "
            << r.records.size() << " records\n";
  return 0;
}

struct NullRun {
  std::string name;
  KlResult kl;
  std::vector<KlTerm> ranked;
};

int cmd_compare(const Options& o) {
  const ExtractConfig config = make_config(o);
  const DiGraph g = source_graph(o);
  const ExtractionResult base = extract(g, config);
  const RuleDistribution p = rule_distribution(base.grammar);

  std::vector<std::pair<std::string, DiGraph>> nulls;
  if (!o.against.empty()) {
    nulls.emplace_back("against", load_edge_list(o.against));
  } else {
    nulls.emplace_back("er", gen_er(g.id_space(), g.edge_count(), stream_seed(o.seed, "null-er")));
    std::vector<std::uint64_t> out(g.id_space()), in(g.id_space());
    for (NodeId v = 0; v < g.id_space(); ++v) {
      if (!g.is_active(v)) continue;
      out[v] = g.out_degree(v);
      in[v] = g.in_degree(v);
    }
    nulls.emplace_back("chunglu",
                       gen_chung_lu_directed(out, in, stream_seed(o.seed, "null-chunglu")));
  }

  json report;
  report["schema_version"] = kSchemaVersion;
  report["manifest"] = manifest("compare", o);
  report["config"] = config_to_json(config);
  report["compression_rate"] = base.account.compression_rate();
  json rules = json::array();
  for (RuleId id : base.grammar.used_rules()) {
    const auto& code = base.grammar.code(id);
    rules.push_back({{"id", id},
                     {"code", code.hex()},
                     {"frequency", base.grammar.frequency(id)},
                     {"probability", p.probs.at(code)}});
  }
  report["rules"] = rules;
  const fs::path out(o.out);
  for (const auto& [name, h] : nulls) {
    const ExtractionResult other = extract(h, config);
    RuleDistribution q;
    if (!other.grammar.used_rules().empty()) q = rule_distribution(other.grammar);
    const KlResult kl = kl_divergence(p, q);
    const auto ranked = rank_interesting(kl, base.grammar);
    report["kl"][name] = kl_to_json(kl, ranked);
    report["kl"][name]["compression_rate"] = other.account.compression_rate();
    std::cout << "kl " << name << " " << kl.total << "\n";
    if (emits(o, "dot")) {
      for (std::size_t i = 0; i < ranked.size() && i < o.top; ++i) {
        const std::string file = name + "_top" + std::to_string(i + 1);
        write_file(out / "interesting" / (file + ".dot"),
                   rule_to_dot(rule_from_code(ranked[i].code), file));
      }
    }
  }
  if (emits(o, "json")) write_file(out / "compare.json", report.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Options& o) {
  if (o.axis != "nodes" && o.axis != "kmax" && o.axis != "rewire") {
    throw Error(ErrorCode::ConfigInvalid, "--axis must be nodes, kmax or rewire");
  }
  if (o.values.empty()) throw Error(ErrorCode::ConfigInvalid, "--values is required");
  std::ostringstream csv;
  csv << "param,value,compression_rate,runtime_seconds,rules,extractions\n";
  for (const auto& value : o.values) {
    Options point = o;
    std::optional<std::size_t> nodes;
    std::optional<double> r;
    try {
      if (o.axis == "nodes") nodes = std::stoul(value);
      if (o.axis == "kmax") point.kmax = std::stoi(value);
      if (o.axis == "rewire") r = std::stod(value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigInvalid, "bad sweep value '" + value + "'");
    }
    const ExtractConfig config = make_config(point);
    const DiGraph g = source_graph(point, nodes, r);
    const auto t0 = std::chrono::steady_clock::now();
    const ExtractionResult res = extract(g, config);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    csv << o.axis << ',' << value << ',' << res.account.compression_rate() << ',' << secs << ','
        << res.grammar.used_rules().size() << ',' << res.records.size() << '\n';
  }
  std::cout << csv.str();
  write_file(fs::path(o.out) / "sweep.csv", csv.str());
  return 0;
}

void add_source(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "edge list file");
  cmd->add_option("--generator", o.generator, "bintree|treerings|ringlat|er|chunglu");
  cmd->add_option("--nodes", o.nodes, "generated node count");
  cmd->add_option("--branching", o.branching, "tree-of-rings branching");
  cmd->add_option("--ring-size", o.ring_size, "tree-of-rings ring size");
  cmd->add_option("--degree", o.degree, "ring lattice degree");
  cmd->add_option("--rewire", o.rewire, "rewiring probability");
  cmd->add_option("--seed", o.seed, "master seed");
}

void add_extraction(CLI::App* cmd, Options& o) {
  cmd->add_option("--kmin", o.kmin, "smallest rule size");
  cmd->add_option("--kmax", o.kmax, "largest rule size");
  cmd->add_option("-s,--shortcut", o.shortcut, "shortcut parameter or 'off'");
  cmd->add_flag("--mdl-stop", o.mdl_stop, "stop when an extraction no longer saves bits");
  cmd->add_flag("--batch", o.batch, "extract every equally cheap occurrence of the chosen rule");
  cmd->add_flag("--local-invalidation", o.local_invalidation,
                "invalidate only the survivor, edit endpoints and multi-edge externals");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--emit", o.emit, "comma list of dot,json,csv (sweep always writes its csv)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KT-grammar extraction"};
  app.require_subcommand(1);
  Options o;
  auto* ex = app.add_subcommand("extract", "extract a grammar and write the run artifact");
  auto* rt = app.add_subcommand("roundtrip", "extract, decode and compare");
  auto* cmp = app.add_subcommand("compare", "rank rules against null models");
  auto* sw = app.add_subcommand("sweep", "compression over a parameter grid");
  for (auto* cmd : {ex, rt, cmp, sw}) {
    add_source(cmd, o);
    add_extraction(cmd, o);
  }
  rt->add_option("--artifact", o.artifact, "decode this run.json instead of extracting");
  cmp->add_option("--against", o.against, "compare with this edge list instead of null models");
  cmp->add_option("--top", o.top, "DOT files for the top ranked rules");
  sw->add_option("--axis", o.axis, "nodes|kmax|rewire")->required();
  sw->add_option("--values", o.values, "sweep values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*ex) return cmd_extract(o);
    if (*rt) return cmd_roundtrip(o);
    if (*cmp) return cmd_compare(o);
    if (*sw) return cmd_sweep(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ParseError:
        return kExitParse;
      case ErrorCode::CorruptRecord:
        return kExitMismatch;
      default:
        return kExitConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
