#include "sinv/placement.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>

#include "sinv/error.hpp"
#include "sinv/flow.hpp"

namespace sinv {

std::string to_string(DeletionOrder order) {
  switch (order) {
    case DeletionOrder::random_order: return "random";
    case DeletionOrder::satellite_first: return "satellite";
    case DeletionOrder::hub_first: return "hub";
  }
  return "unknown";
}

DeletionOrder parse_deletion_order(const std::string& name) {
  if (name == "random" || name == "random_order") return DeletionOrder::random_order;
  if (name == "satellite" || name == "satellite_first") return DeletionOrder::satellite_first;
  if (name == "hub" || name == "hub_first") return DeletionOrder::hub_first;
  throw Error(ErrorCode::InvalidArgument, "unknown deletion strategy '" + name + "'");
}

std::size_t PlacementTrace::deletions() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const PlacementStep& s) { return s.deleted; }));
}

std::vector<NodeId> deletion_order(const DirectedGraph& g, std::span<const NodeId> candidates,
                                   const DeletionStrategy& strategy) {
  std::vector<NodeId> order(candidates.begin(), candidates.end());
  std::mt19937_64 rng(strategy.seed);
  std::shuffle(order.begin(), order.end(), rng);
  if (strategy.order == DeletionOrder::random_order) return order;

  const NodeDegrees deg = degrees(g);
  const bool ascending = strategy.order == DeletionOrder::satellite_first;
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return ascending ? deg.total_degree[a] < deg.total_degree[b]
                     : deg.total_degree[a] > deg.total_degree[b];
  });
  return order;
}

PlacementTrace greedy_sensor_placement(const DirectedGraph& g, const std::vector<NodeId>& inputs,
                                       const std::vector<NodeId>& candidates,
                                       const DeletionStrategy& strategy) {
  const std::size_t m = inputs.size();
  SensorSubsetFlow flow(g, inputs, candidates);
  std::vector<char> active(candidates.size(), 1);
  if (candidates.size() < m || flow.disjoint_paths(active) != m) {
    throw Error(ErrorCode::NotInvertible,
                "the inputs cannot be reconstructed even with every candidate sensor");
  }

  std::vector<std::size_t> slot(g.n_nodes(), 0);
  for (std::size_t k = 0; k < candidates.size(); ++k) slot[candidates[k]] = k;

  PlacementTrace trace;
  std::size_t remaining = candidates.size();
  for (NodeId z : deletion_order(g, candidates, strategy)) {
    if (remaining == m) break;
    active[slot[z]] = 0;
    const bool deleted = flow.disjoint_paths(active) == m;
    if (deleted) {
      --remaining;
    } else {
      active[slot[z]] = 1;
    }
    trace.steps.push_back({z, deleted, remaining});
  }
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (active[k]) trace.sensors.push_back(candidates[k]);
  }
  return trace;
}

std::vector<StrategyStats> compare_strategies(const DirectedGraph& g, const std::vector<NodeId>& inputs,
                                              const std::vector<NodeId>& candidates,
                                              std::span<const std::uint64_t> seeds) {
  const DeletionOrder orders[] = {DeletionOrder::satellite_first, DeletionOrder::random_order,
                                  DeletionOrder::hub_first};
  std::vector<StrategyStats> stats;
  for (DeletionOrder order : orders) {
    StrategyStats s;
    s.order = order;
    s.iterations.assign(seeds.size(), 0);
    stats.push_back(std::move(s));
  }

  // Fail on a non-invertible triple before spawning workers.
  greedy_sensor_placement(g, inputs, candidates, {DeletionOrder::satellite_first, 0});

  const auto n_jobs = static_cast<std::int64_t>(seeds.size() * 3);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t job = 0; job < n_jobs; ++job) {
    const auto k = static_cast<std::size_t>(job) / 3;
    const auto which = static_cast<std::size_t>(job) % 3;
    stats[which].iterations[k] =
        greedy_sensor_placement(g, inputs, candidates, {orders[which], seeds[k]}).iterations();
  }

  for (StrategyStats& s : stats) {
    s.mean_iterations =
        s.iterations.empty()
            ? 0.0
            : static_cast<double>(std::accumulate(s.iterations.begin(), s.iterations.end(), std::size_t{0})) /
                  static_cast<double>(s.iterations.size());
  }
  return stats;
}

void write_trace_csv(const PlacementTrace& trace, std::ostream& out, std::span<const long long> labels) {
  out << "iteration,node,action,sensors\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const PlacementStep& step = trace.steps[i];
    const long long label = labels.empty() ? step.node : labels[step.node];
    out << i + 1 << ',' << label << ',' << (step.deleted ? "deleted" : "kept") << ','
        << step.sensors_after << '\n';
  }
}

}  // namespace sinv
