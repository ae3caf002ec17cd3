#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"

#include "elex/election.hpp"
#include "elex/harness.hpp"
#include "helpers.hpp"

using namespace elex;

TEST_SUITE("election") {

TEST_CASE("voter sets read rankings off by position") {
  auto problem = testing::star_problem();
  const auto& profile = problem.profile;
  CHECK(profile.voter_set(0, 2) == std::vector<NodeId>{1, 2, 3});
  CHECK(profile.voter_set(0, 1) == std::vector<NodeId>{0, 4});
  CHECK(profile.voter_set(1, 1) == std::vector<NodeId>{1, 2, 3});
  CHECK_THROWS(profile.voter_set(0, 0));
  CHECK_THROWS(profile.voter_set(0, 3));
}

TEST_CASE("all candidates rank somewhere: position sets partition the voters") {
  auto profile = generate_profile(40, 4, 99);
  for (CandidateId rank = 1; rank <= 4; ++rank) {
    std::vector<bool> seen(40, false);
    for (CandidateId c = 0; c < 4; ++c)
      for (NodeId v : profile.voter_set(c, rank)) {
        CHECK(!seen[v]);
        seen[v] = true;
      }
    CHECK(std::count(seen.begin(), seen.end(), true) == 40);
  }
}

TEST_CASE("initial tallies count first choices") {
  auto star = testing::star_problem();
  CHECK(star.profile.initial_tally() == std::vector<std::int64_t>{2, 3});

  auto three = testing::three_way_problem();
  CHECK(three.profile.initial_tally() == std::vector<std::int64_t>{1, 1, 1});

  PreferenceProfile empty({}, 3);
  CHECK(empty.initial_tally() == std::vector<std::int64_t>{0, 0, 0});

  auto tally = generate_profile(33, 5, 7).initial_tally();
  CHECK(std::accumulate(tally.begin(), tally.end(), std::int64_t{0}) == 33);
}

TEST_CASE("a message moves candidate 0 one rank") {
  using R = std::vector<CandidateId>;
  CHECK(apply_message(R{1, 0, 2}, Mode::constructive) == R{0, 1, 2});
  CHECK(apply_message(R{0, 1}, Mode::constructive) == R{0, 1});
  CHECK(apply_message(R{0, 1, 2}, Mode::destructive) == R{1, 0, 2});
  CHECK(apply_message(R{1, 2, 0}, Mode::destructive) == R{1, 2, 0});
}

TEST_CASE("promotion then demotion restores any ranking where candidate 0 is not first") {
  auto profile = generate_profile(30, 4, 11);
  for (NodeId v = 0; v < 30; ++v) {
    auto original = std::vector<CandidateId>(profile.ranking(v).begin(), profile.ranking(v).end());
    if (original.front() == kTargetCandidate) continue;
    auto promoted = apply_message(original, Mode::constructive);
    CHECK(apply_message(promoted, Mode::destructive) == original);
  }
}

TEST_CASE("two-candidate threshold counts voters to flip") {
  auto star = testing::star_problem();
  CHECK(threshold(star) == 1);
  CHECK(required_margin(star) == 2);

  auto tied = ControlProblem(testing::make_graph(2, {}),
                             testing::make_profile({{0, 1}, {1, 0}}), Mode::constructive, 1);
  CHECK(threshold(tied) == 1);
}

TEST_CASE("multicandidate threshold works in margin units over rivals only") {
  auto three = testing::three_way_problem();
  CHECK(required_margin(three) == 1);
  CHECK(threshold(three) == 1);

  auto pair = testing::demotion_pair_problem();
  CHECK(required_margin(pair) == 1);
}

TEST_CASE("a leading target makes the constructive threshold nonpositive") {
  auto problem = ControlProblem(testing::make_graph(3, {}),
                                testing::make_profile({{0, 1}, {0, 1}, {1, 0}}),
                                Mode::constructive, 1);
  CHECK(required_margin(problem) <= 0);
}

TEST_CASE("profile validation rejects non-permutations") {
  CHECK_THROWS(PreferenceProfile({{0, 0}}));
  CHECK_THROWS(PreferenceProfile({{0, 2}}));
  CHECK_THROWS(PreferenceProfile({{0, 1}, {0}}));
}

TEST_CASE("problem construction enforces its invariants") {
  CHECK_THROWS(ControlProblem(testing::make_graph(2, {}),
                              testing::make_profile({{0, 1}, {1, 0}}), Mode::constructive, 3));
  CHECK_THROWS(ControlProblem(testing::make_graph(3, {}),
                              testing::make_profile({{0, 1}, {1, 0}}), Mode::constructive, 1));
  CHECK_THROWS(ControlProblem(testing::make_graph(1, {}), PreferenceProfile({{0}}, 1),
                              Mode::constructive, 1));
}

TEST_CASE("profiles round-trip through their text format") {
  auto profile = generate_profile(12, 3, 5);
  auto path = testing::temp_path("prefs");
  profile.save(path);
  auto back = PreferenceProfile::load(path);
  REQUIRE(back.voter_count() == 12);
  REQUIRE(back.candidate_count() == 3);
  for (NodeId v = 0; v < 12; ++v)
    CHECK(std::vector<CandidateId>(back.ranking(v).begin(), back.ranking(v).end()) ==
          std::vector<CandidateId>(profile.ranking(v).begin(), profile.ranking(v).end()));
  std::filesystem::remove(path);
}

TEST_CASE("mode names round-trip") {
  CHECK(to_string(Mode::constructive) == "constructive");
  CHECK(mode_from_string("destructive") == Mode::destructive);
  CHECK_THROWS(mode_from_string("sideways"));
}

}  // TEST_SUITE
