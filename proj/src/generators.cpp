#include "sinv/generators.hpp"

#include <cmath>
#include <unordered_set>
#include <vector>

#include "sinv/error.hpp"

namespace sinv {

std::string to_string(GraphModel model) {
  switch (model) {
    case GraphModel::erdos_renyi: return "erdos_renyi";
    case GraphModel::static_scale_free: return "static_scale_free";
  }
  return "unknown";
}

GraphModel parse_graph_model(const std::string& name) {
  if (name == "erdos_renyi" || name == "er") return GraphModel::erdos_renyi;
  if (name == "static_scale_free" || name == "sf") return GraphModel::static_scale_free;
  throw Error(ErrorCode::ConfigError, "unknown graph model '" + name + "'");
}

void GraphSpec::validate() const {
  if (n_nodes < 2) throw Error(ErrorCode::InvalidDegree, "graph needs at least 2 nodes");
  if (!(mean_degree >= 0.0) || mean_degree > 2.0 * static_cast<double>(n_nodes - 1)) {
    throw Error(ErrorCode::InvalidDegree, "mean degree must lie in [0, 2(N-1)]");
  }
  if (model == GraphModel::static_scale_free && !(gamma > 1.0)) {
    throw Error(ErrorCode::InvalidGamma, "gamma must exceed 1");
  }
}

namespace {

std::uint64_t edge_key(NodeId s, NodeId t) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) |
         static_cast<std::uint32_t>(t);
}

}  // namespace

DirectedGraph erdos_renyi(std::size_t n_nodes, double mean_degree, Rng& rng) {
  if (n_nodes < 2) {
    if (mean_degree == 0.0) return DirectedGraph(n_nodes, {});
    throw Error(ErrorCode::InvalidDegree, "a graph with fewer than 2 nodes has no edges");
  }
  const double p = mean_degree / (2.0 * static_cast<double>(n_nodes - 1));
  if (!(p >= 0.0) || p > 1.0) {
    throw Error(ErrorCode::InvalidDegree, "edge probability " + std::to_string(p) + " outside [0, 1]");
  }
  const std::uint64_t n = n_nodes;
  const std::uint64_t pairs = n * (n - 1);
  std::vector<Edge> edges;
  auto push_pair = [&](std::uint64_t k) {
    const auto s = static_cast<NodeId>(k / (n - 1));
    auto t = static_cast<NodeId>(k % (n - 1));
    if (t >= s) ++t;
    edges.push_back({s, t});
  };

  if (p == 1.0) {
    edges.reserve(pairs);
    for (std::uint64_t k = 0; k < pairs; ++k) push_pair(k);
  } else if (p > 0.0) {
    edges.reserve(static_cast<std::size_t>(p * static_cast<double>(pairs) * 1.1) + 16);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double log_q = std::log1p(-p);
    std::uint64_t k = 0;
    while (true) {
      const double skip = std::floor(std::log1p(-unit(rng)) / log_q);
      if (skip >= static_cast<double>(pairs - k)) break;
      k += static_cast<std::uint64_t>(skip);
      push_pair(k);
      if (++k >= pairs) break;
    }
  }
  return DirectedGraph(n_nodes, std::move(edges));
}

DirectedGraph static_scale_free(std::size_t n_nodes, double mean_degree, double gamma, Rng& rng,
                                std::size_t attempt_budget) {
  GraphSpec{GraphModel::static_scale_free, n_nodes, mean_degree, gamma}.validate();
  const auto target =
      static_cast<std::size_t>(std::floor(static_cast<double>(n_nodes) * mean_degree / 2.0));
  if (attempt_budget == 0) attempt_budget = 100 * target + 1000;

  const double alpha = 1.0 / (gamma - 1.0);
  std::vector<double> weights(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) weights[i] = std::pow(static_cast<double>(i + 1), -alpha);
  std::discrete_distribution<NodeId> pick(weights.begin(), weights.end());

  std::vector<Edge> edges;
  edges.reserve(target);
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * target + 1);
  std::size_t attempts = 0;
  while (edges.size() < target) {
    if (attempts++ >= attempt_budget) {
      throw Error(ErrorCode::Stall, "placed " + std::to_string(edges.size()) + " of " +
                                        std::to_string(target) + " edges within " +
                                        std::to_string(attempt_budget) + " draws");
    }
    const NodeId s = pick(rng);
    const NodeId t = pick(rng);
    if (s == t || !present.insert(edge_key(s, t)).second) continue;
    edges.push_back({s, t});
  }
  return DirectedGraph(n_nodes, std::move(edges));
}

DirectedGraph generate(const GraphSpec& spec, Rng& rng) {
  spec.validate();
  switch (spec.model) {
    case GraphModel::erdos_renyi: return erdos_renyi(spec.n_nodes, spec.mean_degree, rng);
    case GraphModel::static_scale_free:
      return static_scale_free(spec.n_nodes, spec.mean_degree, spec.gamma, rng);
  }
  throw Error(ErrorCode::ConfigError, "unknown graph model");
}

RewireResult degree_preserving_rewire(const DirectedGraph& g, std::size_t n_swaps, Rng& rng) {
  RewireResult out;
  std::vector<Edge> edges = g.edges();
  if (edges.size() < 2 || n_swaps == 0) {
    out.graph = g;
    out.budget_exhausted = n_swaps > 0;
    return out;
  }
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * edges.size());
  for (const Edge& e : edges) present.insert(edge_key(e.source, e.target));

  std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
  const std::size_t budget = 100 * n_swaps;
  while (out.swaps < n_swaps && out.attempts < budget) {
    ++out.attempts;
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    if (i == j) continue;
    const auto [a, b] = edges[i];
    const auto [c, d] = edges[j];
    if (a == c || b == d) continue;  // swap would reproduce the same edges
    if (a == d || c == b) continue;  // self-loop
    if (present.count(edge_key(a, d)) || present.count(edge_key(c, b))) continue;
    present.erase(edge_key(a, b));
    present.erase(edge_key(c, d));
    present.insert(edge_key(a, d));
    present.insert(edge_key(c, b));
    edges[i] = {a, d};
    edges[j] = {c, b};
    ++out.swaps;
  }
  out.budget_exhausted = out.swaps < n_swaps;
  out.graph = DirectedGraph(g.n_nodes(), std::move(edges));
  return out;
}

double fit_power_law_exponent(std::span<const std::size_t> values, std::size_t k_min) {
  if (k_min < 1) throw Error(ErrorCode::InvalidArgument, "k_min must be >= 1");
  double log_sum = 0.0;
  std::size_t count = 0;
  const double shift = static_cast<double>(k_min) - 0.5;
  for (std::size_t k : values) {
    if (k < k_min) continue;
    log_sum += std::log(static_cast<double>(k) / shift);
    ++count;
  }
  if (count == 0 || log_sum <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "no tail values at or above k_min");
  }
  return 1.0 + static_cast<double>(count) / log_sum;
}

}  // namespace sinv
