#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "sinv/graph.hpp"

namespace sinv {

namespace detail {
struct UnitFlowNetwork;
}

struct FlowArc {
  std::int32_t from;
  std::int32_t to;
  std::int32_t capacity;
};

/// Node-split flow network for the disjoint-path count.
///
/// Node i of the influence graph becomes an in-copy (2i) and an out-copy
/// (2i + 1) joined by a unit arc, so vertex-disjoint paths in the influence
/// graph become arc-disjoint paths here. Each edge i -> j becomes
/// out(i) -> in(j); self-loops are dropped since they never lie on a simple
/// source-sink path. The super-source feeds in(s) for s in S, out(z) feeds the
/// super-sink for z in Z. All capacities are 1.
struct FlowGraph {
  std::size_t n_original = 0;
  std::vector<FlowArc> arcs;

  static constexpr std::int32_t in_copy(NodeId v) noexcept { return 2 * v; }
  static constexpr std::int32_t out_copy(NodeId v) noexcept { return 2 * v + 1; }
  std::int32_t source() const noexcept { return static_cast<std::int32_t>(2 * n_original); }
  std::int32_t sink() const noexcept { return static_cast<std::int32_t>(2 * n_original + 1); }
  std::size_t node_count() const noexcept { return 2 * n_original + 2; }
};

/// Validates io against g (Error(InvalidIOConfig)).
FlowGraph split_transform(const DirectedGraph& g, const IOConfig& io);

/// Exact maximum source-sink flow of a unit-capacity network (Dinic).
std::size_t max_flow(const FlowGraph& fg);

/// Maximum number of pairwise node-disjoint directed S -> Z paths. A node in
/// S and Z counts as a zero-length path. Always in [0, min(M, P)].
std::size_t max_disjoint_paths(const DirectedGraph& g, const IOConfig& io);

/// True iff max_disjoint_paths == M. Returns false without building a flow
/// network when P < M.
bool is_structurally_invertible(const DirectedGraph& g, const IOConfig& io);

/// One maximum family of node-disjoint paths, each listed from its input
/// node to its sensor node.
std::vector<std::vector<NodeId>> disjoint_path_family(const DirectedGraph& g, const IOConfig& io);

/// Disjoint-path counts for a fixed graph and input set while the sensor set
/// ranges over subsets of a fixed candidate set. The residual network is
/// built once; each query only toggles sink-arc capacities and recomputes
/// the flow from zero, so results equal a fresh max_disjoint_paths call.
class SensorSubsetFlow {
 public:
  SensorSubsetFlow(const DirectedGraph& g, std::vector<NodeId> inputs,
                   std::vector<NodeId> candidates);
  ~SensorSubsetFlow();
  SensorSubsetFlow(SensorSubsetFlow&&) noexcept;
  SensorSubsetFlow& operator=(SensorSubsetFlow&&) noexcept;

  std::size_t n_candidates() const noexcept { return candidates_.size(); }
  const std::vector<NodeId>& candidates() const noexcept { return candidates_; }

  /// `active[k]` selects candidates()[k].
  std::size_t disjoint_paths(std::span<const char> active);

 private:
  std::vector<NodeId> candidates_;
  std::vector<std::size_t> sink_arc_;  // residual index of each candidate's sink arc
  std::unique_ptr<detail::UnitFlowNetwork> net_;
};

}  // namespace sinv
