#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sinv/graph.hpp"

namespace sinv {

enum class DeletionOrder {
  random_order,
  satellite_first,  // ascending total degree
  hub_first,        // descending total degree
};

std::string to_string(DeletionOrder order);
DeletionOrder parse_deletion_order(const std::string& name);  // Error(InvalidArgument)

struct DeletionStrategy {
  DeletionOrder order = DeletionOrder::random_order;
  std::uint64_t seed = 0;  // shuffle for random_order, tie-break for the degree orders
};

struct PlacementStep {
  NodeId node = 0;
  bool deleted = false;
  std::size_t sensors_after = 0;
};

struct PlacementTrace {
  std::vector<PlacementStep> steps;  // one per deletion test
  std::vector<NodeId> sensors;       // Z*, in the order of Z_0

  std::size_t iterations() const noexcept { return steps.size(); }
  std::size_t deletions() const noexcept;
};

/// Order in which the candidates of Z_0 are offered for deletion.
std::vector<NodeId> deletion_order(const DirectedGraph& g, std::span<const NodeId> candidates,
                                   const DeletionStrategy& strategy);

/// Greedy minimum sensor set for fixed inputs. A single pass over Z_0 in
/// strategy order: each node is removed if the remaining set still carries
/// M disjoint paths, and the pass stops as soon as |Z| = M. Linked sensor
/// sets form a matroid, so a rejected node stays essential for every later
/// subset and the result always has exactly M sensors.
///
/// Throws Error(NotInvertible) if (S, g, Z_0) is not structurally invertible.
PlacementTrace greedy_sensor_placement(const DirectedGraph& g, const std::vector<NodeId>& inputs,
                                       const std::vector<NodeId>& candidates,
                                       const DeletionStrategy& strategy);

struct StrategyStats {
  DeletionOrder order = DeletionOrder::random_order;
  std::vector<std::size_t> iterations;  // one per seed
  double mean_iterations = 0.0;
};

/// Runs every deletion order once per seed; seeds run in parallel.
std::vector<StrategyStats> compare_strategies(const DirectedGraph& g, const std::vector<NodeId>& inputs,
                                              const std::vector<NodeId>& candidates,
                                              std::span<const std::uint64_t> seeds);

/// CSV with header "iteration,node,action,sensors". `labels`, when given,
/// maps dense ids to the external ids written in the node column.
void write_trace_csv(const PlacementTrace& trace, std::ostream& out,
                     std::span<const long long> labels = {});

}  // namespace sinv
