#include "sinv/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sinv/error.hpp"

namespace sinv {

NodeId EdgeListData::dense_id(long long original) const {
  auto it = std::lower_bound(original_ids.begin(), original_ids.end(), original);
  if (it == original_ids.end() || *it != original) {
    throw Error(ErrorCode::InvalidIOConfig, "unknown node id " + std::to_string(original));
  }
  return static_cast<NodeId>(it - original_ids.begin());
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// "# nodes: N" or "# nodes N"
std::optional<long long> node_count_header(std::string_view comment) {
  comment = trim(comment.substr(1));
  if (comment.rfind("nodes", 0) != 0) return std::nullopt;
  comment.remove_prefix(5);
  if (!comment.empty() && comment.front() == ':') comment.remove_prefix(1);
  std::istringstream ss{std::string(comment)};
  long long n = -1;
  std::string rest;
  if (!(ss >> n) || (ss >> rest) || n < 0) return std::nullopt;
  return n;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

EdgeListData read_edge_list(std::istream& in) {
  std::optional<long long> declared_n;
  std::vector<std::pair<long long, long long>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (auto n = node_count_header(view)) declared_n = n;
      continue;
    }
    std::istringstream ss{std::string(view)};
    long long s = 0, t = 0;
    std::string extra;
    if (!(ss >> s >> t)) parse_error(line_no, "expected two integer node ids");
    if (ss >> extra) parse_error(line_no, "unexpected token '" + extra + "'");
    raw.emplace_back(s, t);
  }

  if (raw.empty() && !declared_n) {
    throw Error(ErrorCode::EmptyGraph, "no edges and no node-count header");
  }

  EdgeListData data;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  if (declared_n) {
    const long long n = *declared_n;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto [s, t] = raw[i];
      if (s < 0 || t < 0 || s >= n || t >= n) {
        throw Error(ErrorCode::ParseError, "edge (" + std::to_string(s) + ", " + std::to_string(t) +
                                               ") outside declared node range [0, " +
                                               std::to_string(n) + ")");
      }
      edges.push_back({static_cast<NodeId>(s), static_cast<NodeId>(t)});
    }
    data.original_ids.resize(static_cast<std::size_t>(n));
    for (long long v = 0; v < n; ++v) data.original_ids[static_cast<std::size_t>(v)] = v;
  } else {
    for (auto [s, t] : raw) {
      data.original_ids.push_back(s);
      data.original_ids.push_back(t);
    }
    std::sort(data.original_ids.begin(), data.original_ids.end());
    data.original_ids.erase(std::unique(data.original_ids.begin(), data.original_ids.end()),
                            data.original_ids.end());
    for (auto [s, t] : raw) edges.push_back({data.dense_id(s), data.dense_id(t)});
  }

  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  data.graph = DirectedGraph(data.original_ids.size(), std::move(edges));
  return data;
}

EdgeListData read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return read_edge_list(in);
}

void write_edge_list(const DirectedGraph& g, std::ostream& out) {
  out << "# nodes: " << g.n_nodes() << '\n';
  for (const Edge& e : g.sorted_edges()) out << e.source << ' ' << e.target << '\n';
}

void write_edge_list(const DirectedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  write_edge_list(g, out);
}

GraphDocument parse_graph_json(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  auto fail = [](const std::string& msg) -> void { throw Error(ErrorCode::ParseError, msg); };
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer()) {
    fail("graph JSON needs an integer field \"n\"");
  }
  const long long n = doc["n"].get<long long>();
  if (n < 0) fail("\"n\" must be non-negative");

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    for (const auto& pair : doc["edges"]) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          !pair[1].is_number_integer()) {
        fail("each edge must be a [source, target] integer pair");
      }
      edges.push_back({pair[0].get<NodeId>(), pair[1].get<NodeId>()});
    }
  }
  GraphDocument out{DirectedGraph(static_cast<std::size_t>(n), std::move(edges)), {}};
  auto read_ids = [&](const char* key, std::vector<NodeId>& dst) {
    if (!doc.contains(key)) return;
    for (const auto& id : doc[key]) {
      if (!id.is_number_integer()) fail(std::string("\"") + key + "\" must hold integers");
      dst.push_back(id.get<NodeId>());
    }
  };
  read_ids("S", out.io.inputs);
  read_ids("Z", out.io.sensors);
  validate(out.io, out.graph);
  return out;
}

std::string to_graph_json(const DirectedGraph& g, const IOConfig* io) {
  nlohmann::json doc;
  doc["n"] = g.n_nodes();
  doc["edges"] = nlohmann::json::array();
  for (const Edge& e : g.sorted_edges()) doc["edges"].push_back({e.source, e.target});
  if (io) {
    doc["S"] = io->inputs;
    doc["Z"] = io->sensors;
  }
  return doc.dump();
}

EdgeListData read_graph_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    GraphDocument doc = parse_graph_json(buf.str());
    EdgeListData data;
    data.original_ids.resize(doc.graph.n_nodes());
    for (std::size_t v = 0; v < doc.graph.n_nodes(); ++v) data.original_ids[v] = static_cast<long long>(v);
    data.graph = std::move(doc.graph);
    return data;
  }
  return read_edge_list(path);
}

}  // namespace sinv
