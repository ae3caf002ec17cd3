#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "doctest.h"

#include "elex/graph.hpp"
#include "helpers.hpp"

using namespace elex;

namespace {

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() / (stem + "-" + std::to_string(::getpid()));
}

std::filesystem::path write_temp(const std::string& stem, const std::string& content) {
  auto path = temp_file(stem);
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("edges are stored sorted and exposed per node") {
  auto g = testing::make_graph(4, {{2, 3, 0.5}, {0, 2, 1.0}, {0, 1, 1.0}});
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 3);
  CHECK(g.edge(0).source == 0);
  CHECK(g.edge(0).target == 1);
  CHECK(g.edge(2).source == 2);

  auto out0 = g.out_edges(0);
  REQUIRE(out0.size() == 2);
  CHECK(out0[0].target == 1);
  CHECK(out0[1].target == 2);
  CHECK(g.out_edges(1).empty());
  CHECK(g.out_offset(2) == 2);
}

TEST_CASE("chain fixture exposes its path structure") {
  auto g = testing::make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  REQUIRE(g.out_edges(0).size() == 1);
  CHECK(g.out_edges(0)[0].target == 1);
  CHECK(g.out_edges(0)[0].prob == 1.0);
  CHECK(g.out_edges(2).empty());
}

TEST_CASE("constructor rejects bad input") {
  CHECK_THROWS(testing::make_graph(2, {{0, 1, 1.0}, {0, 1, 0.5}}));
  CHECK_THROWS(testing::make_graph(2, {{0, 2, 1.0}}));
  CHECK_THROWS(testing::make_graph(2, {{0, 1, 1.5}}));
  CHECK_THROWS(testing::make_graph(2, {{0, 1, -0.1}}));
}

TEST_CASE("load remaps arbitrary labels in first-appearance order") {
  auto path = write_temp("labels.txt", "b a 0.5\nc a 1\n");
  auto g = DirectedGraph::load_edge_list(path);
  CHECK(g.node_count() == 3);
  CHECK(g.node_labels() == std::vector<std::string>{"b", "a", "c"});
  CHECK(g.edge(0).source == 0);
  CHECK(g.edge(0).target == 1);
  CHECK(g.edge(1).source == 2);
  std::filesystem::remove(path);
}

TEST_CASE("load applies the default probability only to bare lines") {
  auto path = write_temp("default-prob.txt", "0 1\n1 2 0.25\n");
  auto g = DirectedGraph::load_edge_list(path, 0.75);
  CHECK(g.edge(0).prob == 0.75);
  CHECK(g.edge(1).prob == 0.25);

  auto bare = write_temp("bare.txt", "0 1\n");
  CHECK_THROWS(DirectedGraph::load_edge_list(bare));
  std::filesystem::remove(path);
  std::filesystem::remove(bare);
}

TEST_CASE("symmetrize inserts the reverse of every line") {
  auto path = write_temp("sym.txt", "0 1 0.5\n");
  auto g = DirectedGraph::load_edge_list(path, std::nullopt, true);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edge(0).source == 0);
  CHECK(g.edge(1).source == 1);
  CHECK(g.edge(1).target == 0);
  CHECK(g.edge(1).prob == 0.5);
  std::filesystem::remove(path);
}

TEST_CASE("node directive preserves isolated nodes across a round trip") {
  auto g = testing::make_graph(5, {{0, 1, 0.5}});
  auto path = temp_file("round-trip.txt");
  g.write_edge_list(path);
  auto back = DirectedGraph::load_edge_list(path);
  CHECK(back.node_count() == 5);
  REQUIRE(back.edge_count() == 1);
  CHECK(back.edge(0).source == 0);
  CHECK(back.edge(0).target == 1);
  CHECK(back.edge(0).prob == 0.5);
  CHECK(back.node_labels()[4] == "4");
  std::filesystem::remove(path);
}

TEST_CASE("round trip reproduces the file byte for byte") {
  auto g = testing::make_graph(4, {{0, 1, 0.5}, {2, 3, 1.0}, {3, 0, 0.125}});
  auto first = temp_file("bytes-a.txt");
  auto second = temp_file("bytes-b.txt");
  g.write_edge_list(first);
  DirectedGraph::load_edge_list(first).write_edge_list(second);

  std::ifstream a(first), b(second);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  std::filesystem::remove(first);
  std::filesystem::remove(second);
}

TEST_CASE("comments and blank lines are skipped") {
  auto path = write_temp("comments.txt", "# header\n\n  # indented comment\n0 1 1.0\n");
  auto g = DirectedGraph::load_edge_list(path);
  CHECK(g.edge_count() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("trailing tokens after the probability are rejected") {
  auto path = write_temp("trailing.txt", "0 1 1.0 junk\n");
  CHECK_THROWS(DirectedGraph::load_edge_list(path));
  std::filesystem::remove(path);
}

TEST_CASE("malformed lines are rejected with the line number") {
  auto path = write_temp("bad-line.txt", "0 1 1.0\n0\n");
  try {
    DirectedGraph::load_edge_list(path);
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  std::filesystem::remove(path);
}

}  // TEST_SUITE
