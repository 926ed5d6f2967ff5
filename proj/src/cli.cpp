#include "sinv/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "sinv/algebraic.hpp"
#include "sinv/error.hpp"
#include "sinv/experiments.hpp"
#include "sinv/flow.hpp"
#include "sinv/generators.hpp"
#include "sinv/graph_io.hpp"
#include "sinv/placement.hpp"
#include "sinv/reconstruct.hpp"

namespace sinv::cli {

using nlohmann::json;

std::vector<long long> parse_node_list(const std::string& spec) {
  const bool inline_list = !spec.empty() && spec.find_first_not_of("0123456789,- \t") == std::string::npos;
  std::vector<long long> ids;
  auto parse_token = [&](std::string tok, const std::string& where) {
    const auto a = tok.find_first_not_of(" \t\r");
    if (a == std::string::npos) return;
    tok = tok.substr(a, tok.find_last_not_of(" \t\r") - a + 1);
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size()) throw Error(ErrorCode::ParseError, where + ": bad node id '" + tok + "'");
    ids.push_back(v);
  };
  if (inline_list) {
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) parse_token(tok, "node list");
    return ids;
  }
  std::ifstream in(spec);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open node list file " + spec);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    parse_token(line, spec + ":" + std::to_string(line_no));
  }
  return ids;
}

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SINV_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*env != '\0' && *end == '\0') return v;
    throw Error(ErrorCode::InvalidArgument, std::string("SINV_SEED is not an unsigned integer: ") + env);
  }
  return kDefaultSeed;
}

struct LoadedGraph {
  EdgeListData data;
  IOConfig embedded;  // S and Z stored in a JSON graph file
};

LoadedGraph load_graph(const std::string& path) {
  LoadedGraph g;
  if (std::filesystem::path(path).extension() == ".json") {
    GraphDocument doc = parse_graph_json(read_text(path));
    g.data.original_ids.resize(doc.graph.n_nodes());
    for (std::size_t v = 0; v < doc.graph.n_nodes(); ++v) g.data.original_ids[v] = static_cast<long long>(v);
    g.data.graph = std::move(doc.graph);
    g.embedded = std::move(doc.io);
  } else {
    g.data = read_edge_list(std::filesystem::path(path));
  }
  return g;
}

std::vector<NodeId> to_dense(const EdgeListData& data, const std::vector<long long>& ids) {
  std::vector<NodeId> out;
  out.reserve(ids.size());
  for (long long id : ids) out.push_back(data.dense_id(id));
  return out;
}

json external(const EdgeListData& data, const std::vector<NodeId>& nodes) {
  json arr = json::array();
  for (NodeId v : nodes) arr.push_back(data.original_ids[static_cast<std::size_t>(v)]);
  return arr;
}

std::vector<NodeId> complement(std::size_t n, const std::vector<NodeId>& excluded) {
  std::vector<char> skip(n, 0);
  for (NodeId v : excluded) skip[static_cast<std::size_t>(v)] = 1;
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < n; ++v) {
    if (!skip[v]) out.push_back(static_cast<NodeId>(v));
  }
  return out;
}

Eigen::MatrixXd json_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw Error(ErrorCode::ParseError, name + ": expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::ParseError, name + ": rows differ in length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw Error(ErrorCode::ParseError, name + ": non-numeric entry");
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
}

// Model file: {"model": "protein_cascade" | "linear", "A": [[...]] (linear),
// "inputs": [...], "sensors": [...], "x0": [...], "index_base": 0 | 1}.
OdeModel load_model(const std::string& path, int& index_base) {
  const json doc = parse_json(read_text(path), path);
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, path + ": expected an object");
  index_base = doc.value("index_base", 0);
  if (index_base != 0 && index_base != 1) throw Error(ErrorCode::ParseError, path + ": index_base must be 0 or 1");
  auto ids = [&](const char* key) {
    std::vector<NodeId> out;
    if (!doc.contains(key)) return out;
    if (!doc[key].is_array()) throw Error(ErrorCode::ParseError, path + ": " + key + " must be an array");
    for (const json& v : doc[key]) {
      if (!v.is_number_integer()) throw Error(ErrorCode::ParseError, path + ": " + key + " must hold integers");
      out.push_back(static_cast<NodeId>(v.get<long long>() - index_base));
    }
    return out;
  };
  std::vector<NodeId> inputs = ids("inputs");
  std::vector<NodeId> sensors = ids("sensors");
  if (!doc.contains("x0") || !doc["x0"].is_array()) throw Error(ErrorCode::ParseError, path + ": missing x0");
  Eigen::VectorXd x0(static_cast<Eigen::Index>(doc["x0"].size()));
  for (std::size_t i = 0; i < doc["x0"].size(); ++i) {
    if (!doc["x0"][i].is_number()) throw Error(ErrorCode::ParseError, path + ": x0 must be numeric");
    x0[static_cast<Eigen::Index>(i)] = doc["x0"][i].get<double>();
  }
  const std::string kind = doc.value("model", std::string());
  if (kind == "protein_cascade") return protein_cascade_model(std::move(inputs), std::move(sensors), std::move(x0));
  if (kind == "linear") {
    if (!doc.contains("A")) throw Error(ErrorCode::ParseError, path + ": linear model needs A");
    return linear_ode_model(json_matrix(doc["A"], "A"), std::move(inputs), std::move(sensors), std::move(x0));
  }
  throw Error(ErrorCode::ParseError, path + ": unknown model '" + kind + "'");
}

std::vector<std::string> node_columns(const char* prefix, const std::vector<NodeId>& nodes, int index_base) {
  std::vector<std::string> cols;
  for (NodeId v : nodes) cols.push_back(prefix + std::to_string(v + index_base));
  return cols;
}

void write_output(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  body(f);
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  std::string graph, inputs, sensors;
  bool paths = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const LoadedGraph g = load_graph(a.graph);
  IOConfig io = g.embedded;
  if (!a.inputs.empty()) io.inputs = to_dense(g.data, parse_node_list(a.inputs));
  if (!a.sensors.empty()) io.sensors = to_dense(g.data, parse_node_list(a.sensors));
  if (io.inputs.empty() || io.sensors.empty()) {
    throw Error(ErrorCode::InvalidIOConfig, "need --inputs and --sensors (or S and Z in a JSON graph)");
  }
  validate(io, g.data.graph);
  const std::size_t nu = max_disjoint_paths(g.data.graph, io);
  const bool invertible = nu == io.inputs.size();
  json verdict = {{"invertible", invertible},
                  {"M", io.inputs.size()},
                  {"P", io.sensors.size()},
                  {"disjoint_paths", nu}};
  if (a.paths) {
    json fam = json::array();
    for (const auto& path : disjoint_path_family(g.data.graph, io)) fam.push_back(external(g.data, path));
    verdict["paths"] = fam;
  }
  out << verdict.dump() << '\n';
  err << (invertible ? "structurally invertible" : "not structurally invertible") << ": " << nu << " of "
      << io.inputs.size() << " disjoint paths\n";
  return invertible ? kExitOk : kExitNegative;
}

struct PlaceArgs {
  std::string graph, inputs, candidates, strategy = "satellite", trace;
  std::optional<std::uint64_t> seed;
};

int cmd_place(const PlaceArgs& a, std::ostream& out, std::ostream& err) {
  const DeletionOrder order = parse_deletion_order(a.strategy);
  const LoadedGraph g = load_graph(a.graph);
  std::vector<NodeId> inputs = g.embedded.inputs;
  if (!a.inputs.empty()) inputs = to_dense(g.data, parse_node_list(a.inputs));
  if (inputs.empty()) throw Error(ErrorCode::InvalidIOConfig, "need --inputs");
  std::vector<NodeId> candidates = a.candidates.empty() ? complement(g.data.graph.n_nodes(), inputs)
                                                        : to_dense(g.data, parse_node_list(a.candidates));
  validate(IOConfig{inputs, candidates}, g.data.graph);
  PlacementTrace trace;
  try {
    trace = greedy_sensor_placement(g.data.graph, inputs, candidates, {order, a.seed.value_or(default_seed())});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotInvertible) throw;
    out << json{{"invertible", false}, {"sensors", json::array()}}.dump() << '\n';
    err << e.what() << '\n';
    return kExitNegative;
  }
  out << json{{"invertible", true},
              {"sensors", external(g.data, trace.sensors)},
              {"iterations", trace.iterations()},
              {"deletions", trace.deletions()},
              {"strategy", to_string(order)}}
             .dump()
      << '\n';
  if (!a.trace.empty()) {
    write_output(a.trace, out, [&](std::ostream& o) { write_trace_csv(trace, o, g.data.original_ids); });
  }
  err << "placed " << trace.sensors.size() << " sensors after " << trace.iterations() << " deletion tests\n";
  return kExitOk;
}

struct GenerateArgs {
  std::string model = "erdos_renyi", output;
  std::size_t n = 0;
  double dbar = 0.0, gamma = 2.4;
  std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  GraphSpec spec{parse_graph_model(a.model), a.n, a.dbar, a.gamma};
  Rng rng(a.seed.value_or(default_seed()));
  const DirectedGraph g = generate(spec, rng);
  write_output(a.output, out, [&](std::ostream& o) { write_edge_list(g, o); });
  err << "generated " << to_string(spec.model) << " graph: N = " << g.n_nodes() << ", E = " << g.n_edges()
      << ", mean degree = " << degrees(g).mean_degree << '\n';
  return kExitOk;
}

struct EnsembleArgs {
  std::string config, output;
  int jobs = 0;
  bool timing = false;
  std::optional<std::uint64_t> seed;
};

int cmd_ensemble(const EnsembleArgs& a, std::ostream& out, std::ostream& err) {
  const std::filesystem::path cfg_path(a.config);
  ExperimentConfig cfg = parse_experiment_config(read_text(a.config), cfg_path.parent_path());
  if (a.seed) cfg.seed = *a.seed;
  if (a.timing) cfg.timing = true;
  if (a.jobs > 0) omp_set_num_threads(a.jobs);
  const std::vector<ExperimentRow> rows = run_experiment(cfg);
  write_output(a.output, out, [&](std::ostream& o) { write_experiment_csv(rows, o, cfg.timing); });
  err << "wrote " << rows.size() << " grid points\n";
  return kExitOk;
}

struct AlgebraicArgs {
  std::string system, mode = "numeric";
  std::size_t random = 0;
  std::optional<std::uint64_t> seed;
};

LinearSystem random_system(Rng& rng) {
  std::uniform_int_distribution<int> n_dist(1, 8), mp_dist(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = n_dist(rng);
  const int m = std::min(mp_dist(rng), n), p = std::min(mp_dist(rng), n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (unit(rng) < 0.3) A(i, j) = gauss(rng);
    }
  }
  std::vector<int> nodes(static_cast<std::size_t>(n));
  std::iota(nodes.begin(), nodes.end(), 0);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, m);
  for (int k = 0; k < m; ++k) D(nodes[static_cast<std::size_t>(k)], k) = 1.0;
  std::shuffle(nodes.begin(), nodes.end(), rng);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, n);
  for (int k = 0; k < p; ++k) C(k, nodes[static_cast<std::size_t>(k)]) = 1.0;
  return LinearSystem(std::move(A), std::move(D), std::move(C));
}

int cmd_algebraic(const AlgebraicArgs& a, std::ostream& out, std::ostream& err) {
  AlgebraicOptions opts;
  if (a.mode == "numeric") {
    opts.mode = RankMode::numeric;
  } else if (a.mode == "exact") {
    opts.mode = RankMode::exact_modular;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown rank mode '" + a.mode + "'");
  }
  if (a.random > 0) {
    Rng rng(a.seed.value_or(default_seed()));
    std::size_t agree = 0, agree_structural = 0, invertible = 0;
    for (std::size_t k = 0; k < a.random; ++k) {
      const LinearSystem sys = random_system(rng);
      const bool r1 = rank_criterion(sys, opts);
      const bool r2 = recursive_criterion(sys, opts);
      const LinearStructure st = from_linear_system(sys.A(), sys.D(), sys.C());
      agree += r1 == r2;
      agree_structural += r1 == is_structurally_invertible(st.graph, st.io);
      invertible += r1;
    }
    const double n = static_cast<double>(a.random);
    out << json{{"systems", a.random},
                {"invertible", invertible},
                {"rank_recursive_agreement", static_cast<double>(agree) / n},
                {"structural_agreement", static_cast<double>(agree_structural) / n}}
               .dump()
        << '\n';
    err << agree << " of " << a.random << " systems agree between the rank and recursive criteria\n";
    return agree == a.random ? kExitOk : kExitNegative;
  }
  if (a.system.empty()) throw Error(ErrorCode::InvalidArgument, "need a system file or --random");
  const json doc = parse_json(read_text(a.system), a.system);
  if (!doc.is_object() || !doc.contains("A") || !doc.contains("D") || !doc.contains("C")) {
    throw Error(ErrorCode::ParseError, a.system + ": expected {\"A\", \"D\", \"C\"}");
  }
  const LinearSystem sys(json_matrix(doc["A"], "A"), json_matrix(doc["D"], "D"), json_matrix(doc["C"], "C"));
  const RankReport rank = rank_criterion_report(sys, opts);
  const RecursiveReport rec = recursive_criterion_report(sys, opts);
  out << json{{"N", sys.n_states()},
              {"M", sys.n_inputs()},
              {"P", sys.n_outputs()},
              {"rank_criterion", rank.invertible},
              {"rank_top", rank.rank_top},
              {"rank_prev", rank.rank_prev},
              {"recursive_criterion", rec.invertible},
              {"collapse_level", rec.collapse_level}}
             .dump()
      << '\n';
  if (rank.invertible != rec.invertible) err << "warning: the two criteria disagree\n";
  return rank.invertible && rec.invertible ? kExitOk : kExitNegative;
}

struct SimulateArgs {
  std::string model, input, output;
  double t_end = 10.0, dt = 0.01, noise = 0.0;
  std::size_t samples = 201;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  int base = 0;
  const OdeModel model = load_model(a.model, base);
  InputGrid w = InputGrid::uniform(a.t_end, 2, model.n_inputs());
  if (!a.input.empty()) {
    const TimeSeries ts = read_time_series(std::filesystem::path(a.input));
    if (static_cast<std::size_t>(ts.values.cols()) != model.n_inputs()) {
      throw Error(ErrorCode::ParseError, a.input + ": expected one column per model input");
    }
    w.times = ts.times;
    w.values = ts.values;
  }
  if (a.samples < 2) throw Error(ErrorCode::InvalidArgument, "--samples must be >= 2");
  const Trajectory traj = simulate(model, w, linspace(0.0, a.t_end, a.samples), a.dt);
  Rng rng(a.seed.value_or(default_seed()));
  TimeSeries ts{node_columns("y", model.sensors, base), traj.times, add_noise(traj.outputs, a.noise, rng)};
  write_output(a.output, out, [&](std::ostream& o) { write_time_series(ts, o); });
  err << "simulated " << a.samples << " samples, max Jacobian norm " << max_jacobian_norm(model, traj) << '\n';
  return kExitOk;
}

struct ReconstructArgs {
  std::string model, data, output, regularizer = "derivative_norm";
  std::optional<double> alpha, noise;
  bool auto_alpha = false;
  std::size_t grid_points = 101;
  double dt = 0.01;
};

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err) {
  int base = 0;
  const OdeModel model = load_model(a.model, base);
  const TimeSeries data = read_time_series(std::filesystem::path(a.data));
  if (static_cast<std::size_t>(data.values.cols()) != model.n_outputs()) {
    throw Error(ErrorCode::ParseError, a.data + ": expected one column per model sensor");
  }
  ReconstructOptions opts;
  opts.regularizer = parse_regularizer(a.regularizer);
  opts.grid_points = a.grid_points;
  opts.dt = a.dt;

  ReconstructionResult res;
  if (a.auto_alpha) {
    if (!a.noise) throw Error(ErrorCode::InvalidArgument, "--auto-alpha needs --noise");
    res = choose_alpha(model, data.values, data.times, *a.noise, opts).result;
  } else {
    if (!a.alpha) throw Error(ErrorCode::InvalidArgument, "give --alpha or --auto-alpha");
    opts.alpha = *a.alpha;
    res = reconstruct_inputs(model, data.values, data.times, opts);
  }

  TimeSeries west{node_columns("w", model.inputs, base), res.estimate.times, res.estimate.values};
  write_output(a.output, out, [&](std::ostream& o) { write_time_series(west, o); });

  // An input is flagged small when its RMS is below 10% of the largest one.
  std::vector<double> rms;
  for (std::size_t i = 0; i < model.n_inputs(); ++i) rms.push_back(input_rms(res.estimate, i));
  const double largest = rms.empty() ? 0.0 : *std::max_element(rms.begin(), rms.end());
  json inputs = json::array();
  for (std::size_t i = 0; i < rms.size(); ++i) {
    inputs.push_back({{"node", model.inputs[i] + base}, {"rms", rms[i]}, {"small", rms[i] <= 0.1 * largest}});
  }
  const json diag = {{"alpha", res.alpha},
                     {"misfit", res.misfit},
                     {"output_rms_residual", output_rms_residual(data.values, res.fitted)},
                     {"regularizer", res.regularizer},
                     {"objective", res.objective},
                     {"iterations", res.iterations},
                     {"converged", res.converged},
                     {"inputs", inputs}};
  // The estimate is on stdout unless -o is given; keep diagnostics apart.
  (a.output.empty() || a.output == "-" ? err : out) << diag.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sinv: input invertibility checks, sensor placement and input reconstruction", "sinv"};
  app.require_subcommand(1);

  auto seed_opt = [](CLI::App* sub, std::optional<std::uint64_t>& seed) {
    sub->add_option("--seed", seed, "random seed (default: $SINV_SEED or a fixed constant)");
  };

  CheckArgs check;
  auto* c = app.add_subcommand("check", "test structural invertibility of (S, graph, Z)");
  c->add_option("graph", check.graph, "edge list or JSON graph")->required();
  c->add_option("--inputs,-S", check.inputs, "input nodes: comma list or file");
  c->add_option("--sensors,-Z", check.sensors, "sensor nodes: comma list or file");
  c->add_flag("--paths", check.paths, "include one maximum disjoint path family");

  PlaceArgs place;
  auto* p = app.add_subcommand("place", "greedy minimum sensor placement");
  p->add_option("graph", place.graph, "edge list or JSON graph")->required();
  p->add_option("--inputs,-S", place.inputs, "input nodes");
  p->add_option("--candidates,-Z", place.candidates, "candidate sensors (default: every non-input node)");
  p->add_option("--strategy", place.strategy, "satellite, random or hub");
  p->add_option("--trace", place.trace, "write the deletion trace CSV here");
  seed_opt(p, place.seed);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "sample a random graph");
  g->add_option("--model", gen.model, "erdos_renyi (er) or static_scale_free (sf)");
  g->add_option("--n", gen.n, "number of nodes")->required();
  g->add_option("--dbar", gen.dbar, "mean total degree 2E/N")->required();
  g->add_option("--gamma", gen.gamma, "degree exponent (scale-free)");
  g->add_option("--output,-o", gen.output, "edge list path (default: stdout)");
  seed_opt(g, gen.seed);

  EnsembleArgs ens;
  auto* e = app.add_subcommand("ensemble", "estimate the invertible fraction over a grid");
  e->add_option("config", ens.config, "experiment JSON")->required();
  e->add_option("--output,-o", ens.output, "CSV path (default: stdout)");
  e->add_option("--jobs,-j", ens.jobs, "worker threads (results do not depend on it)");
  e->add_flag("--timing", ens.timing, "add a wall_seconds column");
  seed_opt(e, ens.seed);

  AlgebraicArgs alg;
  auto* l = app.add_subcommand("algebraic", "rank and recursive criteria for a linear system");
  l->add_option("system", alg.system, "JSON {\"A\", \"D\", \"C\"}");
  l->add_option("--mode", alg.mode, "numeric or exact");
  l->add_option("--random", alg.random, "instead compare the criteria on this many random systems");
  seed_opt(l, alg.seed);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate a model and write noisy sensor data");
  s->add_option("model", sim.model, "model JSON")->required();
  s->add_option("--input", sim.input, "input time series CSV (default: zero input)");
  s->add_option("--t-end", sim.t_end, "horizon");
  s->add_option("--samples", sim.samples, "number of sample times on [0, T]");
  s->add_option("--dt", sim.dt, "RK4 step");
  s->add_option("--noise", sim.noise, "Gaussian noise standard deviation");
  s->add_option("--output,-o", sim.output, "CSV path (default: stdout)");
  seed_opt(s, sim.seed);

  ReconstructArgs rec;
  auto* r = app.add_subcommand("reconstruct", "estimate unknown inputs from sensor data");
  r->add_option("model", rec.model, "model JSON")->required();
  r->add_option("data", rec.data, "sensor time series CSV")->required();
  auto* alpha = r->add_option("--alpha", rec.alpha, "regularization weight");
  auto* autoa = r->add_flag("--auto-alpha", rec.auto_alpha, "choose alpha by the discrepancy principle");
  alpha->excludes(autoa);
  r->add_option("--noise", rec.noise, "noise standard deviation for --auto-alpha");
  r->add_option("--regularizer", rec.regularizer, "derivative_norm or value_norm");
  r->add_option("--grid-points", rec.grid_points, "input grid size");
  r->add_option("--dt", rec.dt, "RK4 step");
  r->add_option("--output,-o", rec.output, "estimated input CSV (default: stdout)");

  std::vector<const char*> argv{"sinv"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (c->parsed()) return cmd_check(check, out, err);
    if (p->parsed()) return cmd_place(place, out, err);
    if (g->parsed()) return cmd_generate(gen, out, err);
    if (e->parsed()) return cmd_ensemble(ens, out, err);
    if (l->parsed()) return cmd_algebraic(alg, out, err);
    if (s->parsed()) return cmd_simulate(sim, out, err);
    if (r->parsed()) return cmd_reconstruct(rec, out, err);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitError;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace sinv::cli
