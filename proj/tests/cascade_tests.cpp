#include <filesystem>
#include <vector>

#include "doctest.h"

#include "elex/cascade.hpp"
#include "elex/harness.hpp"
#include "helpers.hpp"

using namespace elex;

TEST_SUITE("cascade") {

TEST_CASE("batches are reproducible and independent of the worker count") {
  auto g = erdos_renyi(30, 0.2, 0.4, 77);
  auto a = sample_batch(g, 25, 42);
  auto b = sample_batch(g, 25, 42, 4);
  REQUIRE(a.size() == 25);
  REQUIRE(b.size() == 25);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.scenarios[i].index == i);
    CHECK(a.scenarios[i].live == b.scenarios[i].live);
  }

  auto c = sample_batch(g, 25, 43);
  bool all_equal = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    all_equal = all_equal && a.scenarios[i].live == c.scenarios[i].live;
  CHECK(!all_equal);
}

TEST_CASE("certain and impossible edges never vary") {
  auto g = testing::make_graph(3, {{0, 1, 1.0}, {1, 2, 0.0}});
  auto batch = sample_batch(g, 10, 5);
  for (const auto& scenario : batch.scenarios) {
    CHECK(scenario.edge_live(0));
    CHECK(!scenario.edge_live(1));
  }
}

TEST_CASE("exhaustive batches enumerate every coin-flip combination") {
  auto g = testing::make_graph(3, {{0, 1, 0.5}, {0, 2, 1.0}, {1, 2, 0.5}});
  auto batch = exhaustive_batch(g);
  REQUIRE(batch.size() == 4);
  std::vector<std::vector<bool>> seen;
  for (const auto& scenario : batch.scenarios) {
    CHECK(scenario.edge_live(1));
    seen.push_back({scenario.edge_live(0), scenario.edge_live(2)});
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::unique(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("exhaustive batches refuse non-half probabilities and wide graphs") {
  CHECK_THROWS(exhaustive_batch(testing::make_graph(2, {{0, 1, 0.3}})));

  std::vector<std::tuple<NodeId, NodeId, double>> wide;
  for (NodeId v = 1; v <= 21; ++v) wide.push_back({0, v, 0.5});
  CHECK_THROWS(exhaustive_batch(testing::make_graph(22, wide)));
}

TEST_CASE("reach follows live edges from the seeds") {
  auto problem = testing::path_problem();
  auto batch = exhaustive_batch(problem.graph);
  REQUIRE(batch.size() == 1);
  const auto& y = batch.scenarios[0];

  auto reached = reach_set(problem.graph, y, std::vector<NodeId>{0});
  CHECK(reached.count() == 3);
  CHECK(reach_set(problem.graph, y, std::vector<NodeId>{2}).count() == 1);
  CHECK(reach_set(problem.graph, y, std::vector<NodeId>{}).count() == 0);

  DynamicBitset everyone(3);
  for (NodeId v = 0; v < 3; ++v) everyone.set(v);
  CHECK(reach_count(problem.graph, y, std::vector<NodeId>{0}, everyone) == 3);
  CHECK(reach_count(problem.graph, y, std::vector<NodeId>{2}, everyone) == 1);

  CHECK(reach_indicator(problem.graph, y, 2, std::vector<NodeId>{0}));
  CHECK(!reach_indicator(problem.graph, y, 0, std::vector<NodeId>{1}));
}

TEST_CASE("the forward index, reverse sets, and direct walks agree") {
  auto g = erdos_renyi(24, 0.12, 0.5, 3);
  auto batch = sample_batch(g, 6, 9);
  for (const auto& scenario : batch.scenarios) {
    auto forward = forward_reach_index(g, scenario);
    auto reverse = reverse_reach_sets(g, scenario);
    REQUIRE(forward.size() == 24);
    REQUIRE(reverse.size() == 24);
    for (NodeId u = 0; u < 24; ++u) {
      auto direct = reach_set(g, scenario, std::vector<NodeId>{u});
      CHECK(forward[u] == direct);
      for (NodeId v = 0; v < 24; ++v) {
        CHECK(forward[u].test(v) == reverse[v].test(u));
        CHECK(forward[u].test(v) ==
              reach_indicator(g, scenario, v, std::vector<NodeId>{u}));
      }
    }
  }
}

TEST_CASE("the reach of a set is the union of its members' reach") {
  auto g = erdos_renyi(20, 0.15, 0.5, 13);
  auto batch = sample_batch(g, 4, 31);
  std::vector<NodeId> seeds{3, 7, 12};
  for (const auto& scenario : batch.scenarios) {
    auto forward = forward_reach_index(g, scenario);
    DynamicBitset expected(20);
    for (NodeId s : seeds) expected |= forward[s];
    CHECK(reach_set(g, scenario, seeds) == expected);
  }
}

TEST_CASE("scenario dumps round-trip") {
  auto g = erdos_renyi(15, 0.2, 0.5, 21);
  auto batch = sample_batch(g, 8, 17);
  auto path = testing::temp_path("scenarios");
  save_scenarios(batch, path);
  auto back = load_scenarios(g, path);
  REQUIRE(back.size() == batch.size());
  CHECK(back.master_seed == batch.master_seed);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(back.scenarios[i].index == batch.scenarios[i].index);
    CHECK(back.scenarios[i].stream_seed == batch.scenarios[i].stream_seed);
    CHECK(back.scenarios[i].live == batch.scenarios[i].live);
  }
  std::filesystem::remove(path);
}

TEST_CASE("live-edge sampling matches the configured probability") {
  auto g = testing::make_graph(2, {{0, 1, 0.5}});
  auto batch = sample_batch(g, 4000, 1234);
  std::size_t live = 0;
  for (const auto& scenario : batch.scenarios) live += scenario.edge_live(0) ? 1 : 0;
  double fraction = static_cast<double>(live) / 4000.0;
  CHECK(fraction > 0.45);
  CHECK(fraction < 0.55);
}

}  // TEST_SUITE
