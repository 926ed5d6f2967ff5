#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sinv/cli.hpp"
#include "sinv/graph_io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run sinv_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sinv::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(SINV_DATA_DIR) + "/" + name; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sinv_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& body) const {
    const fs::path p = path / name;
    std::ofstream(p) << body;
    return p.string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("node list parsing") {
  CHECK(sinv::cli::parse_node_list("1, 3,7") == std::vector<long long>{1, 3, 7});
  TempDir d;
  const std::string f = d.file("nodes.txt", "# sensors\n4\n\n9\n");
  CHECK(sinv::cli::parse_node_list(f) == std::vector<long long>{4, 9});
  CHECK(code_of([&] { sinv::cli::parse_node_list((d.path / "missing").string()); }) == sinv::ErrorCode::ParseError);
}

TEST_CASE("check reports invertibility through the exit code") {
  const Run yes = sinv_run({"check", data("cascade.txt"), "-S", "1,3", "-Z", "2,4", "--paths"});
  CHECK(yes.code == sinv::cli::kExitOk);
  const json j = json::parse(yes.out);
  CHECK(j["invertible"] == true);
  CHECK(j["disjoint_paths"] == 2);
  CHECK(j["paths"].size() == 2);

  const Run no = sinv_run({"check", data("cascade.txt"), "-S", "1,3", "-Z", "3,4"});
  CHECK(no.code == sinv::cli::kExitNegative);
  CHECK(json::parse(no.out)["disjoint_paths"] == 1);

  CHECK(sinv_run({"check", data("cascade.txt"), "-S", "1,99", "-Z", "2,4"}).code == sinv::cli::kExitError);
  CHECK(sinv_run({"check", data("nope.txt"), "-S", "1", "-Z", "2"}).code == sinv::cli::kExitError);
  CHECK(sinv_run({"frobnicate"}).code == sinv::cli::kExitError);
}

TEST_CASE("check reads S and Z from a json graph") {
  TempDir d;
  const std::string g = d.file("g.json", R"({"n": 3, "edges": [[0,1],[1,2]], "S": [0], "Z": [2]})");
  CHECK(sinv_run({"check", g}).code == sinv::cli::kExitOk);
  CHECK(sinv_run({"check", g, "-Z", "0"}).code == sinv::cli::kExitOk);  // S = Z = {0}
}

TEST_CASE("place") {
  const Run r = sinv_run({"place", data("cascade.txt"), "-S", "1,3", "--strategy", "hub"});
  CHECK(r.code == sinv::cli::kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["invertible"] == true);
  CHECK(j["sensors"].size() == 2);
  CHECK(j["strategy"] == "hub");
  CHECK(sinv_run({"place", data("cascade.txt"), "-S", "1,3", "--strategy", "best"}).code == sinv::cli::kExitError);
  // a single candidate cannot carry two inputs
  CHECK(sinv_run({"place", data("cascade.txt"), "-S", "1,3", "-Z", "4"}).code == sinv::cli::kExitNegative);

  TempDir d;
  const std::string trace = (d.path / "trace.csv").string();
  CHECK(sinv_run({"place", data("cascade.txt"), "-S", "1,3", "--trace", trace}).code == sinv::cli::kExitOk);
  CHECK(slurp(trace).rfind("iteration,", 0) == 0);
}

TEST_CASE("generate is deterministic") {
  TempDir d;
  const std::string a = (d.path / "a.txt").string(), b = (d.path / "b.txt").string();
  for (const std::string& f : {a, b}) {
    CHECK(sinv_run({"generate", "--model", "sf", "--n", "200", "--dbar", "6", "--gamma", "2.5", "--seed", "9", "-o", f})
              .code == 0);
  }
  CHECK(slurp(a) == slurp(b));
  const auto g = sinv::read_edge_list(fs::path(a));
  CHECK(g.graph.n_edges() == 600);
  const Run other = sinv_run({"generate", "--model", "sf", "--n", "200", "--dbar", "6", "--seed", "10"});
  CHECK(other.out != slurp(a));
  CHECK(sinv_run({"generate", "--model", "ws", "--n", "10", "--dbar", "2"}).code == sinv::cli::kExitError);
  CHECK(sinv_run({"generate", "--model", "er", "--n", "10", "--dbar", "50"}).code == sinv::cli::kExitError);
}

TEST_CASE("SINV_SEED feeds the default seed") {
  const std::vector<std::string> args{"generate", "--model", "er", "--n", "100", "--dbar", "4"};
  ::setenv("SINV_SEED", "77", 1);
  const Run env = sinv_run(args);
  ::unsetenv("SINV_SEED");
  auto with_seed = args;
  with_seed.insert(with_seed.end(), {"--seed", "77"});
  CHECK(env.out == sinv_run(with_seed).out);
  CHECK(sinv_run(args).out != env.out);
  ::setenv("SINV_SEED", "x", 1);
  CHECK(sinv_run(args).code == sinv::cli::kExitError);
  ::unsetenv("SINV_SEED");
}

TEST_CASE("ensemble") {
  TempDir d;
  const std::string cfg = d.file("c.json", R"({
    "seed": 4, "n_samples": 30,
    "graph": {"model": "er", "n": 60},
    "mean_degrees": [2, 6],
    "inputs": [1, 3],
    "scenario": ["sc1", "sc2"]
  })");
  const Run a = sinv_run({"ensemble", cfg});
  const Run b = sinv_run({"ensemble", cfg, "--jobs", "3"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream lines(a.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "model,n,gamma,scenario,M,P,mean_degree,rho,se,invertible,n_samples");
  std::size_t rows = 0;
  for (std::string l; std::getline(lines, l);) rows += !l.empty();
  CHECK(rows == 8);
  const Run t = sinv_run({"ensemble", cfg, "--timing"});
  CHECK(t.out.substr(0, t.out.find('\n')).ends_with(",wall_seconds"));

  const std::string bad = d.file("bad.json", R"({"n_samples": 0, "graph": {"model": "er", "n": 60},
    "mean_degrees": [2], "inputs": 1})");
  const Run e = sinv_run({"ensemble", bad});
  CHECK(e.code == sinv::cli::kExitError);
  CHECK(e.err.find("/n_samples") != std::string::npos);
}

TEST_CASE("algebraic subcommand") {
  TempDir d;
  const std::string integ = d.file("integ.json", R"({"A": [[0,0],[1,0]], "D": [[1],[0]], "C": [[0,1]]})");
  const Run r = sinv_run({"algebraic", integ});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["rank_criterion"] == true);
  CHECK(j["recursive_criterion"] == true);
  const Run ex = sinv_run({"algebraic", integ, "--mode", "exact"});
  CHECK(json::parse(ex.out)["rank_criterion"] == true);

  const std::string blind = d.file("blind.json", R"({"A": [[0,0],[1,0]], "D": [[1],[0]], "C": [[0,0]]})");
  const Run b = sinv_run({"algebraic", blind});
  CHECK(b.code == sinv::cli::kExitNegative);
  CHECK(json::parse(b.out)["rank_criterion"] == false);

  const Run rnd = sinv_run({"algebraic", "--random", "40", "--seed", "3"});
  CHECK(rnd.code == 0);
  CHECK(json::parse(rnd.out)["rank_recursive_agreement"] == 1.0);

  const std::string broken = d.file("broken.json", R"({"A": [[0,0]], "D": [[1]], "C": [[1]]})");
  CHECK(sinv_run({"algebraic", broken}).code == sinv::cli::kExitError);
}

TEST_CASE("simulate and reconstruct round trip") {
  TempDir d;
  const std::string y = (d.path / "y.csv").string();
  const std::string w = (d.path / "w.csv").string();
  const Run s = sinv_run({"simulate", data("cascade_model_invertible.json"), "--input", data("cascade_input.csv"),
                          "--t-end", "10", "--samples", "201", "--noise", "0.01", "--seed", "1", "-o", y});
  CHECK(s.code == 0);
  const Run r = sinv_run({"reconstruct", data("cascade_model_invertible.json"), y, "--auto-alpha", "--noise", "0.01",
                          "-o", w});
  REQUIRE(r.code == 0);
  const json diag = json::parse(r.out);
  CHECK(diag["inputs"][0]["small"] == true);
  CHECK(diag["inputs"][1]["small"] == false);
  CHECK(slurp(w).rfind("t,", 0) == 0);

  const std::string bad = d.file("bad.csv", "t,y2,y4\n0,1\n");
  CHECK(sinv_run({"reconstruct", data("cascade_model_invertible.json"), bad, "--alpha", "1e-3"}).code ==
        sinv::cli::kExitError);
  CHECK(sinv_run({"reconstruct", data("cascade_model_invertible.json"), y}).code == sinv::cli::kExitError);
}
