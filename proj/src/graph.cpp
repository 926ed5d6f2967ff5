#include "sinv/graph.hpp"

#include <algorithm>
#include <string>

#include "sinv/error.hpp"

namespace sinv {

DirectedGraph::DirectedGraph(std::size_t n_nodes, std::vector<Edge> edges)
    : n_nodes_(n_nodes), edges_(std::move(edges)) {
  std::vector<std::size_t> counts(n_nodes_ + 1, 0);
  for (const Edge& e : edges_) {
    if (e.source < 0 || e.target < 0 || static_cast<std::size_t>(e.source) >= n_nodes_ ||
        static_cast<std::size_t>(e.target) >= n_nodes_) {
      throw Error(ErrorCode::InvalidGraph, "edge (" + std::to_string(e.source) + ", " +
                                               std::to_string(e.target) +
                                               ") outside node range [0, " +
                                               std::to_string(n_nodes_) + ")");
    }
    ++counts[e.source + 1];
    if (e.source == e.target) ++n_self_loops_;
  }
  out_offsets_.assign(n_nodes_ + 1, 0);
  for (std::size_t v = 0; v < n_nodes_; ++v) out_offsets_[v + 1] = out_offsets_[v] + counts[v + 1];

  out_targets_.resize(edges_.size());
  std::vector<std::size_t> fill(out_offsets_.begin(), out_offsets_.end() - 1);
  for (const Edge& e : edges_) out_targets_[fill[e.source]++] = e.target;

  for (std::size_t v = 0; v < n_nodes_; ++v) {
    auto first = out_targets_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[v]);
    auto last = out_targets_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[v + 1]);
    std::sort(first, last);
    if (auto dup = std::adjacent_find(first, last); dup != last) {
      throw Error(ErrorCode::InvalidGraph, "duplicate edge (" + std::to_string(v) + ", " +
                                               std::to_string(*dup) + ")");
    }
  }
}

bool DirectedGraph::has_edge(NodeId source, NodeId target) const noexcept {
  if (source < 0 || static_cast<std::size_t>(source) >= n_nodes_) return false;
  auto row = out_neighbors(source);
  return std::binary_search(row.begin(), row.end(), target);
}

std::vector<Edge> DirectedGraph::sorted_edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (std::size_t v = 0; v < n_nodes_; ++v) {
    for (NodeId t : out_neighbors(static_cast<NodeId>(v))) out.push_back({static_cast<NodeId>(v), t});
  }
  return out;
}

namespace {

void check_set(const std::vector<NodeId>& ids, std::size_t n, const char* name) {
  std::vector<char> seen(n, 0);
  for (NodeId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= n) {
      throw Error(ErrorCode::InvalidIOConfig,
                  std::string(name) + " node " + std::to_string(id) + " out of range");
    }
    if (seen[id]) {
      throw Error(ErrorCode::InvalidIOConfig,
                  std::string(name) + " node " + std::to_string(id) + " listed twice");
    }
    seen[id] = 1;
  }
}

}  // namespace

void validate(const IOConfig& io, const DirectedGraph& g) {
  check_set(io.inputs, g.n_nodes(), "input");
  check_set(io.sensors, g.n_nodes(), "sensor");
}

NodeDegrees degrees(const DirectedGraph& g) {
  NodeDegrees d;
  const std::size_t n = g.n_nodes();
  d.in_degree.assign(n, 0);
  d.out_degree.assign(n, 0);
  d.total_degree.assign(n, 0);
  for (const Edge& e : g.edges()) {
    ++d.out_degree[e.source];
    ++d.in_degree[e.target];
  }
  for (std::size_t v = 0; v < n; ++v) d.total_degree[v] = d.in_degree[v] + d.out_degree[v];
  d.mean_degree = n == 0 ? 0.0 : 2.0 * static_cast<double>(g.n_edges()) / static_cast<double>(n);
  return d;
}

namespace {

// Index of the single unit entry of a selection vector, or -1.
template <typename Vec>
Eigen::Index selected_index(const Vec& v) {
  Eigen::Index hit = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    if (v[i] != 1.0 || hit >= 0) return -1;
    hit = i;
  }
  return hit;
}

}  // namespace

LinearStructure from_linear_system(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D,
                                   const Eigen::MatrixXd& C) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || D.rows() != n || C.cols() != n) {
    throw Error(ErrorCode::InvalidSystem, "inconsistent matrix dimensions");
  }
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (A(j, i) != 0.0) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }

  IOConfig io;
  for (Eigen::Index k = 0; k < D.cols(); ++k) {
    Eigen::Index idx = selected_index(D.col(k));
    if (idx < 0) {
      throw Error(ErrorCode::NonSelectionMatrix,
                  "column " + std::to_string(k) + " of D is not a canonical basis vector");
    }
    io.inputs.push_back(static_cast<NodeId>(idx));
  }
  for (Eigen::Index k = 0; k < C.rows(); ++k) {
    Eigen::Index idx = selected_index(C.row(k));
    if (idx < 0) {
      throw Error(ErrorCode::NonSelectionMatrix,
                  "row " + std::to_string(k) + " of C is not a canonical basis vector");
    }
    io.sensors.push_back(static_cast<NodeId>(idx));
  }

  DirectedGraph g(static_cast<std::size_t>(n), std::move(edges));
  try {
    validate(io, g);
  } catch (const Error& e) {
    throw Error(ErrorCode::NonSelectionMatrix, e.detail());
  }
  return {std::move(g), std::move(io)};
}

}  // namespace sinv
