#pragma once

#include <filesystem>
#include <iosfwd>

#include "ktg/graph.hpp"

namespace ktg {

/// Reads `src dst` pairs, one per line. Blank lines and lines starting with
/// '#' are skipped, duplicates are merged, self-loops are rejected
/// (ParseError naming the line). The id space is [0, max id], widened by an
/// optional `# nodes N` line; every id in it is an active node.
DiGraph read_edge_list(std::istream& in);
DiGraph load_edge_list(const std::filesystem::path& path);

/// Writes a `# nodes N` header followed by one edge per line.
void write_edge_list(std::ostream& out, const DiGraph& graph);

}  // namespace ktg
