#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "sinv/error.hpp"
#include "support.hpp"
#include "sinv/graph.hpp"
#include "sinv/graph_io.hpp"

using namespace sinv;


TEST_CASE("graph construction and queries") {
  DirectedGraph g(4, {{2, 1}, {0, 1}, {0, 3}, {1, 1}});
  CHECK(g.n_nodes() == 4);
  CHECK(g.n_edges() == 4);
  CHECK(g.n_self_loops() == 1);
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(1, 0));
  auto nb = g.out_neighbors(0);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0] == 1);
  CHECK(nb[1] == 3);
  CHECK(g.out_neighbors(3).empty());
  const auto sorted = g.sorted_edges();
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
}

TEST_CASE("graph rejects bad edges") {
  CHECK(code_of([] { DirectedGraph(2, {{0, 2}}); }) == ErrorCode::InvalidGraph);
  CHECK(code_of([] { DirectedGraph(2, {{-1, 0}}); }) == ErrorCode::InvalidGraph);
  CHECK(code_of([] { DirectedGraph(2, {{0, 1}, {0, 1}}); }) == ErrorCode::InvalidGraph);
}

TEST_CASE("degrees") {
  DirectedGraph g(3, {{0, 1}, {0, 2}, {1, 2}});
  const NodeDegrees d = degrees(g);
  CHECK(d.out_degree == std::vector<std::size_t>{2, 1, 0});
  CHECK(d.in_degree == std::vector<std::size_t>{0, 1, 2});
  CHECK(d.total_degree == std::vector<std::size_t>{2, 2, 2});
  CHECK(d.mean_degree == doctest::Approx(2.0));
}

TEST_CASE("io config validation") {
  DirectedGraph g(3, {{0, 1}});
  CHECK_NOTHROW(validate(IOConfig{{0}, {0, 2}}, g));
  CHECK(code_of([&] { validate(IOConfig{{3}, {0}}, g); }) == ErrorCode::InvalidIOConfig);
  CHECK(code_of([&] { validate(IOConfig{{1, 1}, {0}}, g); }) == ErrorCode::InvalidIOConfig);
}

TEST_CASE("influence graph from a linear system") {
  Eigen::MatrixXd A(3, 3);
  A << -1, 0, 0,
        2, -1, 0,
        0, 0.5, 0;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 1);
  D(0, 0) = 1;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, 3);
  C(0, 2) = 1;
  const LinearStructure s = from_linear_system(A, D, C);
  // A(j, i) != 0 means i -> j.
  CHECK(s.graph.has_edge(0, 1));
  CHECK(s.graph.has_edge(1, 2));
  CHECK(s.graph.has_edge(0, 0));
  CHECK_FALSE(s.graph.has_edge(1, 0));
  CHECK(s.graph.n_edges() == 4);
  CHECK(s.io.inputs == std::vector<NodeId>{0});
  CHECK(s.io.sensors == std::vector<NodeId>{2});

  Eigen::MatrixXd bad_d = D;
  bad_d(1, 0) = 1;
  CHECK(code_of([&] { from_linear_system(A, bad_d, C); }) == ErrorCode::NonSelectionMatrix);
  Eigen::MatrixXd scaled_c = 2 * C;
  CHECK(code_of([&] { from_linear_system(A, D, scaled_c); }) == ErrorCode::NonSelectionMatrix);
  Eigen::MatrixXd twice(3, 2);
  twice << 1, 1, 0, 0, 0, 0;
  CHECK(code_of([&] { from_linear_system(A, twice, C); }) == ErrorCode::NonSelectionMatrix);
  CHECK(code_of([&] { from_linear_system(A, Eigen::MatrixXd::Zero(2, 1), C); }) == ErrorCode::InvalidSystem);
}

TEST_CASE("edge list remaps external ids in ascending order") {
  std::istringstream in("# comment\n10 30\n30 20\n\n10 30\n  20 10  \n");
  const EdgeListData d = read_edge_list(in);
  CHECK(d.original_ids == std::vector<long long>{10, 20, 30});
  CHECK(d.graph.n_edges() == 3);  // duplicate collapsed
  CHECK(d.graph.has_edge(d.dense_id(10), d.dense_id(30)));
  CHECK(d.graph.has_edge(d.dense_id(30), d.dense_id(20)));
  CHECK(code_of([&] { (void)d.dense_id(99); }) == ErrorCode::InvalidIOConfig);
}

TEST_CASE("edge list header keeps dense ids and isolated nodes") {
  std::istringstream in("# nodes: 5\n0 1\n3 2\n");
  const EdgeListData d = read_edge_list(in);
  CHECK(d.graph.n_nodes() == 5);
  CHECK(d.graph.has_edge(3, 2));
  std::istringstream out_of_range("# nodes: 2\n0 5\n");
  CHECK(code_of([&] { read_edge_list(out_of_range); }) == ErrorCode::ParseError);
}

TEST_CASE("edge list errors") {
  std::istringstream empty("# just a comment\n");
  CHECK(code_of([&] { read_edge_list(empty); }) == ErrorCode::EmptyGraph);
  std::istringstream junk("0 1\n1 x\n");
  try {
    read_edge_list(junk);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream extra("0 1 2\n");
  CHECK(code_of([&] { read_edge_list(extra); }) == ErrorCode::ParseError);
}

TEST_CASE("edge list and JSON round trips") {
  DirectedGraph g(6, {{0, 1}, {5, 0}, {2, 2}, {3, 4}});
  std::ostringstream out;
  write_edge_list(g, out);
  std::istringstream in(out.str());
  const EdgeListData back = read_edge_list(in);
  CHECK(back.graph.sorted_edges() == g.sorted_edges());
  CHECK(back.graph.n_nodes() == 6);

  IOConfig io{{0, 3}, {4, 1}};
  const GraphDocument doc = parse_graph_json(to_graph_json(g, &io));
  CHECK(doc.graph.sorted_edges() == g.sorted_edges());
  CHECK(doc.io.inputs == io.inputs);
  CHECK(doc.io.sensors == io.sensors);
  CHECK(code_of([] { parse_graph_json("{\"edges\": []}"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_graph_json("{\"n\": 2, \"edges\": [[0, 1]], \"S\": [7]}"); }) ==
        ErrorCode::InvalidIOConfig);
  CHECK(code_of([] { parse_graph_json("not json"); }) == ErrorCode::ParseError);
}
