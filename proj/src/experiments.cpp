#include "sinv/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "sinv/error.hpp"
#include "sinv/flow.hpp"
#include "sinv/graph_io.hpp"

namespace sinv {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::sc1_uniform: return "sc1_uniform";
    case Scenario::sc1_hub_inputs: return "sc1_hub_inputs";
    case Scenario::sc1_hub_outputs: return "sc1_hub_outputs";
    case Scenario::sc2_complement: return "sc2_complement";
    case Scenario::sc3_hub_inputs_min_sensors: return "sc3_hub_inputs_min_sensors";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  if (key == "sc1_uniform" || key == "uniform" || key == "sc1") return Scenario::sc1_uniform;
  if (key == "sc1_hub_inputs" || key == "hub_inputs") return Scenario::sc1_hub_inputs;
  if (key == "sc1_hub_outputs" || key == "hub_outputs") return Scenario::sc1_hub_outputs;
  if (key == "sc2_complement" || key == "sc2_complement_z0" || key == "sc2") return Scenario::sc2_complement;
  if (key == "sc3_hub_inputs_min_sensors" || key == "sc3") return Scenario::sc3_hub_inputs_min_sensors;
  throw Error(ErrorCode::ConfigError, "unknown scenario '" + name + "'");
}

std::vector<NodeId> top_degree_nodes(const DirectedGraph& g, std::size_t k, DegreeKind kind) {
  if (k > g.n_nodes()) {
    throw Error(ErrorCode::TooManyNodesRequested,
                std::to_string(k) + " hub nodes requested from " + std::to_string(g.n_nodes()));
  }
  const NodeDegrees deg = degrees(g);
  const auto& key = kind == DegreeKind::total ? deg.total_degree : deg.out_degree;
  std::vector<NodeId> nodes(g.n_nodes());
  std::iota(nodes.begin(), nodes.end(), 0);
  std::stable_sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) { return key[a] > key[b]; });
  nodes.resize(k);
  return nodes;
}

namespace {

// Moves `count` uniformly chosen entries of pool[first..] to the front of
// that range (partial Fisher-Yates).
void partial_shuffle(std::vector<NodeId>& pool, std::size_t first, std::size_t count, Rng& rng) {
  for (std::size_t i = first; i < first + count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
}

std::vector<NodeId> all_except(const DirectedGraph& g, const std::vector<NodeId>& excluded) {
  std::vector<char> skip(g.n_nodes(), 0);
  for (NodeId v : excluded) skip[v] = 1;
  std::vector<NodeId> out;
  out.reserve(g.n_nodes() - excluded.size());
  for (std::size_t v = 0; v < g.n_nodes(); ++v) {
    if (!skip[v]) out.push_back(static_cast<NodeId>(v));
  }
  return out;
}

void require_nodes(const DirectedGraph& g, std::size_t wanted) {
  if (wanted > g.n_nodes()) {
    throw Error(ErrorCode::TooManyNodesRequested, std::to_string(wanted) + " nodes requested from a graph with " +
                                                      std::to_string(g.n_nodes()));
  }
}

}  // namespace

IOConfig sample_io(const DirectedGraph& g, const SamplingScheme& scheme, Rng& rng) {
  const std::size_t m = scheme.n_inputs;
  const std::size_t p = scheme.n_sensors;
  IOConfig io;
  switch (scheme.scenario) {
    case Scenario::sc1_uniform: {
      require_nodes(g, m + p);
      std::vector<NodeId> pool(g.n_nodes());
      std::iota(pool.begin(), pool.end(), 0);
      partial_shuffle(pool, 0, m + p, rng);
      io.inputs.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
      io.sensors.assign(pool.begin() + static_cast<std::ptrdiff_t>(m),
                        pool.begin() + static_cast<std::ptrdiff_t>(m + p));
      break;
    }
    case Scenario::sc1_hub_inputs:
    case Scenario::sc1_hub_outputs: {
      require_nodes(g, m + p);
      const bool hub_inputs = scheme.scenario == Scenario::sc1_hub_inputs;
      const std::size_t hubs = hub_inputs ? m : p;
      const std::size_t drawn = hub_inputs ? p : m;
      std::vector<NodeId> top = top_degree_nodes(g, hubs, DegreeKind::total);
      std::vector<NodeId> pool = all_except(g, top);
      partial_shuffle(pool, 0, drawn, rng);
      std::vector<NodeId> others(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(drawn));
      io.inputs = hub_inputs ? std::move(top) : std::move(others);
      io.sensors = hub_inputs ? std::move(others) : std::move(top);
      break;
    }
    case Scenario::sc2_complement: {
      require_nodes(g, m);
      std::vector<NodeId> pool(g.n_nodes());
      std::iota(pool.begin(), pool.end(), 0);
      partial_shuffle(pool, 0, m, rng);
      io.inputs.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
      io.sensors = all_except(g, io.inputs);
      break;
    }
    case Scenario::sc3_hub_inputs_min_sensors: {
      io.inputs = top_degree_nodes(g, m, DegreeKind::out);
      io.sensors = all_except(g, io.inputs);
      break;
    }
  }
  return io;
}

RhoEstimate make_rho_estimate(std::size_t invertible, std::size_t n_samples) {
  RhoEstimate e;
  e.invertible = invertible;
  e.n_samples = n_samples;
  if (n_samples > 0) {
    e.rho = static_cast<double>(invertible) / static_cast<double>(n_samples);
    e.standard_error = std::sqrt(e.rho * (1.0 - e.rho) / static_cast<double>(n_samples));
  }
  return e;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ a) ^ b);
}

namespace {

void check_samples(std::size_t n_samples) {
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
}

bool generated_sample(const GraphSpec& spec, const SamplingScheme& scheme, std::uint64_t seed,
                      std::size_t index) {
  Rng rng(derive_seed(seed, index));
  const DirectedGraph g = generate(spec, rng);
  return is_structurally_invertible(g, sample_io(g, scheme, rng));
}

bool fixed_sample(const DirectedGraph& g, const SamplingScheme& scheme, std::uint64_t seed,
                  std::size_t index, double rewire_swaps_per_edge) {
  Rng rng(derive_seed(seed, index));
  if (rewire_swaps_per_edge > 0.0) {
    const auto swaps = static_cast<std::size_t>(
        std::llround(rewire_swaps_per_edge * static_cast<double>(g.n_edges())));
    const DirectedGraph rewired = degree_preserving_rewire(g, swaps, rng).graph;
    return is_structurally_invertible(rewired, sample_io(rewired, scheme, rng));
  }
  return is_structurally_invertible(g, sample_io(g, scheme, rng));
}

// Validates the scheme against a representative graph before any worker
// runs; exceptions must not escape an OpenMP region.
void precheck(const DirectedGraph& g, const SamplingScheme& scheme) {
  Rng rng(0);
  (void)sample_io(g, scheme, rng);
}

}  // namespace

RhoEstimate estimate_rho(const GraphSpec& spec, const SamplingScheme& scheme, std::size_t n_samples,
                         std::uint64_t seed) {
  check_samples(n_samples);
  spec.validate();
  {
    Rng rng(derive_seed(seed, 0));
    precheck(generate(spec, rng), scheme);
  }
  std::size_t count = 0;
  const auto n = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(dynamic) reduction(+ : count)
  for (std::int64_t i = 0; i < n; ++i) {
    if (generated_sample(spec, scheme, seed, static_cast<std::size_t>(i))) ++count;
  }
  return make_rho_estimate(count, n_samples);
}

RhoEstimate estimate_rho(const DirectedGraph& g, const SamplingScheme& scheme, std::size_t n_samples,
                         std::uint64_t seed, double rewire_swaps_per_edge) {
  check_samples(n_samples);
  precheck(g, scheme);
  std::size_t count = 0;
  const auto n = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(dynamic) reduction(+ : count)
  for (std::int64_t i = 0; i < n; ++i) {
    if (fixed_sample(g, scheme, seed, static_cast<std::size_t>(i), rewire_swaps_per_edge)) ++count;
  }
  return make_rho_estimate(count, n_samples);
}

RhoEstimate estimate_rho_serial(const GraphSpec& spec, const SamplingScheme& scheme,
                                std::size_t n_samples, std::uint64_t seed) {
  check_samples(n_samples);
  spec.validate();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_samples; ++i) count += generated_sample(spec, scheme, seed, i) ? 1 : 0;
  return make_rho_estimate(count, n_samples);
}

RhoEstimate estimate_rho_serial(const DirectedGraph& g, const SamplingScheme& scheme,
                                std::size_t n_samples, std::uint64_t seed, double rewire_swaps_per_edge) {
  check_samples(n_samples);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    count += fixed_sample(g, scheme, seed, i, rewire_swaps_per_edge) ? 1 : 0;
  }
  return make_rho_estimate(count, n_samples);
}

std::size_t hub_input_mmax(const DirectedGraph& g) {
  std::size_t best = 0;
  const std::vector<NodeId> ranked = top_degree_nodes(g, g.n_nodes(), DegreeKind::out);
  for (std::size_t m = 1; 2 * m <= g.n_nodes(); ++m) {
    IOConfig io;
    io.inputs.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(m));
    io.sensors = all_except(g, io.inputs);
    if (!is_structurally_invertible(g, io)) break;
    best = m;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Config-driven runs

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& path, std::size_t min_value) {
  if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min_value)) {
    config_error(path, "expected an integer >= " + std::to_string(min_value));
  }
  return j.get<std::size_t>();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("/: ") + e.what());
  }
  if (!doc.is_object()) config_error("/", "expected an object");

  ExperimentConfig cfg;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) config_error("/seed", "expected a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (!doc.contains("n_samples")) config_error("/n_samples", "missing");
  cfg.n_samples = get_count(doc["n_samples"], "/n_samples", 1);
  if (doc.contains("timing")) {
    if (!doc["timing"].is_boolean()) config_error("/timing", "expected a boolean");
    cfg.timing = doc["timing"].get<bool>();
  }

  if (!doc.contains("graph") || !doc["graph"].is_object()) config_error("/graph", "missing or not an object");
  const json& graph = doc["graph"];
  if (graph.contains("file")) {
    if (!graph["file"].is_string()) config_error("/graph/file", "expected a path string");
    cfg.from_file = true;
    cfg.graph_file = graph["file"].get<std::string>();
    if (cfg.graph_file.is_relative() && !base_dir.empty()) cfg.graph_file = base_dir / cfg.graph_file;
    if (graph.contains("rewire_swaps_per_edge")) {
      cfg.rewire_swaps_per_edge = get_number(graph["rewire_swaps_per_edge"], "/graph/rewire_swaps_per_edge");
      if (cfg.rewire_swaps_per_edge < 0) config_error("/graph/rewire_swaps_per_edge", "must be >= 0");
    }
  } else {
    if (!graph.contains("model") || !graph["model"].is_string()) config_error("/graph/model", "expected a string");
    try {
      cfg.spec.model = parse_graph_model(graph["model"].get<std::string>());
    } catch (const Error& e) {
      config_error("/graph/model", e.detail());
    }
    if (!graph.contains("n")) config_error("/graph/n", "missing");
    cfg.spec.n_nodes = get_count(graph["n"], "/graph/n", 2);
    if (graph.contains("gamma")) cfg.spec.gamma = get_number(graph["gamma"], "/graph/gamma");
    if (cfg.spec.model == GraphModel::static_scale_free && !(cfg.spec.gamma > 1.0)) {
      config_error("/graph/gamma", "must exceed 1");
    }
    if (!doc.contains("mean_degrees") || !doc["mean_degrees"].is_array() || doc["mean_degrees"].empty()) {
      config_error("/mean_degrees", "expected a non-empty array for generated graphs");
    }
    for (std::size_t i = 0; i < doc["mean_degrees"].size(); ++i) {
      const std::string path = "/mean_degrees/" + std::to_string(i);
      const double d = get_number(doc["mean_degrees"][i], path);
      GraphSpec probe = cfg.spec;
      probe.mean_degree = d;
      try {
        probe.validate();
      } catch (const Error& e) {
        config_error(path, e.detail());
      }
      cfg.mean_degrees.push_back(d);
    }
  }

  if (!doc.contains("inputs")) config_error("/inputs", "missing");
  if (doc["inputs"].is_array()) {
    if (doc["inputs"].empty()) config_error("/inputs", "expected at least one value");
    for (std::size_t i = 0; i < doc["inputs"].size(); ++i) {
      cfg.inputs.push_back(get_count(doc["inputs"][i], "/inputs/" + std::to_string(i), 0));
    }
  } else {
    cfg.inputs.push_back(get_count(doc["inputs"], "/inputs", 0));
  }
  if (doc.contains("sensors") && !doc["sensors"].is_null()) {
    cfg.sensors = static_cast<long long>(get_count(doc["sensors"], "/sensors", 0));
  }

  if (!doc.contains("scenario")) {
    cfg.scenarios.push_back(Scenario::sc1_uniform);
  } else {
    const json& sc = doc["scenario"];
    auto parse_one = [&](const json& j, const std::string& path) {
      if (!j.is_string()) config_error(path, "expected a scenario name");
      try {
        cfg.scenarios.push_back(parse_scenario(j.get<std::string>()));
      } catch (const Error& e) {
        config_error(path, e.detail());
      }
    };
    if (sc.is_array()) {
      if (sc.empty()) config_error("/scenario", "expected at least one scenario");
      for (std::size_t i = 0; i < sc.size(); ++i) parse_one(sc[i], "/scenario/" + std::to_string(i));
    } else {
      parse_one(sc, "/scenario");
    }
  }
  return cfg;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  if (config.n_samples == 0) throw Error(ErrorCode::ConfigError, "/n_samples: expected an integer >= 1");
  std::vector<ExperimentRow> rows;

  EdgeListData file_graph;
  std::vector<double> grid = config.mean_degrees;
  if (config.from_file) {
    file_graph = read_graph_file(config.graph_file);
    grid = {degrees(file_graph.graph).mean_degree};
  }

  for (Scenario scenario : config.scenarios) {
    for (std::size_t m : config.inputs) {
      const std::size_t p = config.sensors < 0 ? m : static_cast<std::size_t>(config.sensors);
      const SamplingScheme scheme{scenario, m, p};
      for (std::size_t k = 0; k < grid.size(); ++k) {
        // The scenario is left out of the seed so that scenarios compare on
        // the same graphs and input draws.
        const std::uint64_t point_seed = derive_seed(config.seed, k, (m << 20) ^ p);
        const bool complement = scenario == Scenario::sc2_complement ||
                                scenario == Scenario::sc3_hub_inputs_min_sensors;
        ExperimentRow row;
        row.scenario = scenario;
        row.n_inputs = m;
        row.mean_degree = grid[k];
        const auto start = std::chrono::steady_clock::now();
        if (config.from_file) {
          row.model = "file:" + config.graph_file.filename().string();
          row.n_nodes = file_graph.graph.n_nodes();
          row.estimate =
              estimate_rho(file_graph.graph, scheme, config.n_samples, point_seed, config.rewire_swaps_per_edge);
        } else {
          GraphSpec spec = config.spec;
          spec.mean_degree = grid[k];
          row.model = to_string(spec.model);
          row.n_nodes = spec.n_nodes;
          row.gamma = spec.model == GraphModel::static_scale_free ? spec.gamma : 0.0;
          row.estimate = estimate_rho(spec, scheme, config.n_samples, point_seed);
        }
        row.n_sensors = complement ? row.n_nodes - m : p;
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_experiment_csv(const std::vector<ExperimentRow>& rows, std::ostream& out, bool timing) {
  out << "model,n,gamma,scenario,M,P,mean_degree,rho,se,invertible,n_samples";
  if (timing) out << ",wall_seconds";
  out << '\n';
  char buf[64];
  for (const ExperimentRow& r : rows) {
    out << r.model << ',' << r.n_nodes << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.gamma);
    out << buf << ',' << to_string(r.scenario) << ',' << r.n_inputs << ',' << r.n_sensors << ',';
    std::snprintf(buf, sizeof buf, "%.4f", r.mean_degree);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.estimate.rho, r.estimate.standard_error);
    out << buf << ',' << r.estimate.invertible << ',' << r.estimate.n_samples;
    if (timing) {
      std::snprintf(buf, sizeof buf, ",%.4f", r.wall_seconds);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace sinv
