#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sinv/graph.hpp"

namespace sinv {

/// A graph read from an external file together with the external node ids.
/// `original_ids[v]` is the id node v carried in the file.
struct EdgeListData {
  DirectedGraph graph;
  std::vector<long long> original_ids;

  /// Dense id for an external id; throws Error(InvalidIOConfig) if unknown.
  NodeId dense_id(long long original) const;
};

/// Edge-list text format: one "source target" integer pair per line, '#'
/// starts a comment. A "# nodes: N" comment declares N dense ids [0, N) and
/// disables remapping (isolated nodes survive). Without it, ids are remapped
/// to [0, N) in ascending order of the external id. Duplicate lines collapse.
EdgeListData read_edge_list(std::istream& in);
EdgeListData read_edge_list(const std::filesystem::path& path);

/// Writes the "# nodes: N" header followed by the sorted edge list.
void write_edge_list(const DirectedGraph& g, std::ostream& out);
void write_edge_list(const DirectedGraph& g, const std::filesystem::path& path);

/// JSON graph document {"n": N, "edges": [[s, t], ...], "S": [...], "Z": [...]}.
/// "S" and "Z" are optional.
struct GraphDocument {
  DirectedGraph graph;
  IOConfig io;
};

GraphDocument parse_graph_json(const std::string& text);
std::string to_graph_json(const DirectedGraph& g, const IOConfig* io = nullptr);

/// Reads either format, picking JSON when the file extension is ".json".
EdgeListData read_graph_file(const std::filesystem::path& path);

}  // namespace sinv
