#include "ktg/edge_list.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ktg/error.hpp"

namespace ktg {

namespace {

bool parse_id(std::string_view tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

DiGraph read_edge_list(std::istream& in) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::uint64_t id_space = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0].front() == '#') {
      // optional "# nodes N" header fixes the id space
      if (toks.size() == 3 && toks[0] == "#" && toks[1] == "nodes") {
        std::uint64_t n = 0;
        if (parse_id(toks[2], n)) id_space = std::max(id_space, n);
      }
      continue;
    }
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    if (toks.size() != 2 || !parse_id(toks[0], u) || !parse_id(toks[1], v)) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected two non-negative integers");
    }
    if (u > 0xFFFFFFFEull || v > 0xFFFFFFFEull) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": node id too large");
    }
    if (u == v) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": self-loop on node " + std::to_string(u));
    }
    id_space = std::max({id_space, u + 1, v + 1});
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  DiGraph g(static_cast<std::size_t>(id_space));
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

DiGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const DiGraph& graph) {
  out << "# nodes " << graph.id_space() << '\n';
  for (auto [u, v] : graph.edges()) out << u << ' ' << v << '\n';
}

}  // namespace ktg
