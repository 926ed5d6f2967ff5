#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sinv/generators.hpp"
#include "sinv/graph.hpp"

namespace sinv {

enum class Scenario {
  sc1_uniform,          // S and Z disjoint, both uniform
  sc1_hub_inputs,       // S = top-M total degree, Z uniform from the rest
  sc1_hub_outputs,      // Z = top-P total degree, S uniform from the rest
  sc2_complement,       // S uniform, Z_0 = every other node
  sc3_hub_inputs_min_sensors,  // S = top-M out-degree, Z_0 = every other node
};

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);  // Error(ConfigError)

struct SamplingScheme {
  Scenario scenario = Scenario::sc1_uniform;
  std::size_t n_inputs = 0;   // M
  std::size_t n_sensors = 0;  // P; ignored by the complement scenarios
};

enum class DegreeKind { total, out };

/// The k highest-degree nodes, ties broken by lower id.
std::vector<NodeId> top_degree_nodes(const DirectedGraph& g, std::size_t k, DegreeKind kind);

/// Draws a disjoint (S, Z) pair. Throws Error(TooManyNodesRequested) when
/// the scheme asks for more nodes than g has.
IOConfig sample_io(const DirectedGraph& g, const SamplingScheme& scheme, Rng& rng);

struct RhoEstimate {
  std::size_t invertible = 0;
  std::size_t n_samples = 0;
  double rho = 0.0;
  double standard_error = 0.0;  // sqrt(rho (1 - rho) / n)
};

RhoEstimate make_rho_estimate(std::size_t invertible, std::size_t n_samples);

/// splitmix64-style mixing used to give every sample its own stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Graph ensemble: sample i draws a fresh graph from `spec` and then (S, Z),
/// both from a generator seeded with derive_seed(seed, i). Samples run on
/// OpenMP threads; the result does not depend on the thread count.
RhoEstimate estimate_rho(const GraphSpec& spec, const SamplingScheme& scheme, std::size_t n_samples,
                         std::uint64_t seed);
/// Fixed graph: fresh (S, Z) per sample. With rewire_swaps_per_edge > 0
/// every sample first applies round(rewire_swaps_per_edge * E) degree-
/// preserving swaps to its own copy of g.
RhoEstimate estimate_rho(const DirectedGraph& g, const SamplingScheme& scheme, std::size_t n_samples,
                         std::uint64_t seed, double rewire_swaps_per_edge = 0.0);

/// Single-threaded references for the two kernels above; identical results.
RhoEstimate estimate_rho_serial(const GraphSpec& spec, const SamplingScheme& scheme,
                                std::size_t n_samples, std::uint64_t seed);
RhoEstimate estimate_rho_serial(const DirectedGraph& g, const SamplingScheme& scheme,
                                std::size_t n_samples, std::uint64_t seed,
                                double rewire_swaps_per_edge = 0.0);

/// Largest M such that the top-M out-degree nodes as inputs and all other
/// nodes as sensors give an invertible triple, scanning M = 1, 2, ... and
/// stopping at the first failure. 0 if M = 1 already fails.
std::size_t hub_input_mmax(const DirectedGraph& g);

struct ExperimentRow {
  std::string model;
  std::size_t n_nodes = 0;
  double gamma = 0.0;  // 0 when not applicable
  Scenario scenario = Scenario::sc1_uniform;
  std::size_t n_inputs = 0;
  std::size_t n_sensors = 0;
  double mean_degree = 0.0;
  RhoEstimate estimate;
  double wall_seconds = 0.0;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t n_samples = 100;
  bool from_file = false;
  GraphSpec spec;                        // when !from_file; mean_degree taken from the grid
  std::filesystem::path graph_file;      // when from_file
  double rewire_swaps_per_edge = 0.0;    // file graphs only
  std::vector<double> mean_degrees;
  std::vector<std::size_t> inputs;       // M grid
  long long sensors = -1;                // P; -1 means P = M
  std::vector<Scenario> scenarios;
  bool timing = false;                   // add a wall_seconds column
};

/// Parses the JSON experiment config. Relative graph paths resolve against
/// `base_dir`. Throws Error(ConfigError) naming the JSON path at fault.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir = {});

/// One row per (scenario, M, mean degree) grid point. Row order and values
/// depend only on the config and its seed.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_experiment_csv(const std::vector<ExperimentRow>& rows, std::ostream& out, bool timing);

}  // namespace sinv
