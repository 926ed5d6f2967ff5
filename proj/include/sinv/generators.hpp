#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>

#include "sinv/graph.hpp"

namespace sinv {

using Rng = std::mt19937_64;

enum class GraphModel { erdos_renyi, static_scale_free };

std::string to_string(GraphModel model);
GraphModel parse_graph_model(const std::string& name);  // Error(ConfigError) if unknown

struct GraphSpec {
  GraphModel model = GraphModel::erdos_renyi;
  std::size_t n_nodes = 0;
  double mean_degree = 0.0;  // total degree 2E/N
  double gamma = 2.4;        // scale-free only

  /// Throws Error(InvalidDegree) or Error(InvalidGamma).
  void validate() const;
};

/// Directed G(N, p): every ordered pair (i, j), i != j, independently with
/// p = mean_degree / (2 (N - 1)), so that E[2E/N] = mean_degree. No
/// self-loops. Sampled by geometric skipping, O(N + E).
DirectedGraph erdos_renyi(std::size_t n_nodes, double mean_degree, Rng& rng);

/// Static scale-free model, directed: node i (1-based) has weight
/// i^(-1/(gamma - 1)); source and target are drawn independently from the
/// weights, self-loops and duplicates rejected, until floor(N * mean_degree / 2)
/// distinct edges exist. `attempt_budget` = 0 selects 100 E + 1000 draws;
/// exceeding it throws Error(Stall).
DirectedGraph static_scale_free(std::size_t n_nodes, double mean_degree, double gamma, Rng& rng,
                                std::size_t attempt_budget = 0);

DirectedGraph generate(const GraphSpec& spec, Rng& rng);

struct RewireResult {
  DirectedGraph graph;
  std::size_t swaps = 0;     // successful swaps
  std::size_t attempts = 0;
  bool budget_exhausted = false;  // fewer than n_swaps swaps within 100 * n_swaps attempts
};

/// Double-edge swaps a->b, c->d  =>  a->d, c->b, rejected when either new
/// edge exists or would be a self-loop. Every node keeps its in- and
/// out-degree exactly.
RewireResult degree_preserving_rewire(const DirectedGraph& g, std::size_t n_swaps, Rng& rng);

/// Discrete power-law exponent by the approximate maximum-likelihood
/// estimator 1 + n / sum(ln(k / (k_min - 1/2))) over values k >= k_min.
/// Intended for generator validation.
double fit_power_law_exponent(std::span<const std::size_t> values, std::size_t k_min);

}  // namespace sinv
