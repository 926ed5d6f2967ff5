#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sinv {

using NodeId = std::int32_t;

struct Edge {
  NodeId source;
  NodeId target;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Influence graph of a dynamic system: node i is state x_i, edge i -> j
/// means x_i enters the right-hand side of x_j.
///
/// Simple digraph on dense ids [0, n). Self-loops are allowed (diagonal
/// Jacobian terms). Immutable after construction; out-neighbours are kept in
/// compressed row form for the flow and generator kernels.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Throws Error(InvalidGraph) on out-of-range ids or duplicate edges.
  DirectedGraph(std::size_t n_nodes, std::vector<Edge> edges);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const NodeId> out_neighbors(NodeId v) const noexcept {
    return {out_targets_.data() + out_offsets_[v],
            out_targets_.data() + out_offsets_[v + 1]};
  }

  bool has_edge(NodeId source, NodeId target) const noexcept;
  std::size_t n_self_loops() const noexcept { return n_self_loops_; }

  /// Edges sorted lexicographically; the canonical form used for comparisons.
  std::vector<Edge> sorted_edges() const;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeId> out_targets_;  // sorted within each row
  std::size_t n_self_loops_ = 0;
};

/// Input node set S and sensor node set Z. S and Z may intersect.
struct IOConfig {
  std::vector<NodeId> inputs;
  std::vector<NodeId> sensors;

  std::size_t n_inputs() const noexcept { return inputs.size(); }
  std::size_t n_sensors() const noexcept { return sensors.size(); }
};

/// Throws Error(InvalidIOConfig) if an id is out of range for g or repeated
/// within S or within Z.
void validate(const IOConfig& io, const DirectedGraph& g);

struct NodeDegrees {
  std::vector<std::size_t> in_degree;
  std::vector<std::size_t> out_degree;
  std::vector<std::size_t> total_degree;
  double mean_degree = 0.0;  // 2E/N
};

NodeDegrees degrees(const DirectedGraph& g);

struct LinearStructure {
  DirectedGraph graph;
  IOConfig io;
};

/// Edge i -> j iff A(j, i) != 0. D (N x M) and C (P x N) must be 0/1
/// selection matrices: each column of D and each row of C a canonical basis
/// vector, no node selected twice. Throws Error(NonSelectionMatrix).
LinearStructure from_linear_system(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D,
                                   const Eigen::MatrixXd& C);

}  // namespace sinv
