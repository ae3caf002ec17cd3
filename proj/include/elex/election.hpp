#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "elex/graph.hpp"

namespace elex {

using CandidateId = std::uint32_t;

/// Candidate 0 is always the one the attacker promotes (constructive) or
/// demotes (destructive); the others are its rivals.
inline constexpr CandidateId kTargetCandidate = 0;

enum class Mode { constructive, destructive };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view name);

/// Strict rankings, one per voter. Voter ids coincide with graph node ids;
/// every node votes for its current first choice under plurality.
class PreferenceProfile {
 public:
  PreferenceProfile() = default;
  /// Candidate count is taken from the first ranking; rankings must all be
  /// permutations of 0..candidates-1.
  explicit PreferenceProfile(std::vector<std::vector<CandidateId>> rankings);
  /// Same, with an explicit candidate count (required when there are no
  /// voters at all).
  PreferenceProfile(std::vector<std::vector<CandidateId>> rankings, CandidateId candidates);

  /// Reads one voter per line: candidate ids in rank order, first token is
  /// the top choice. '#' starts a comment; line order gives voter ids.
  static PreferenceProfile load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  NodeId voter_count() const { return voters_; }
  CandidateId candidate_count() const { return candidates_; }
  CandidateId rival_count() const { return candidates_ - 1; }

  std::span<const CandidateId> ranking(NodeId voter) const;
  /// Candidate at 1-based position `rank` of voter's list.
  CandidateId choice(NodeId voter, CandidateId rank) const;
  /// 1-based position candidate c holds in voter's list.
  CandidateId rank_of(NodeId voter, CandidateId c) const;

  /// Voters that put candidate c at 1-based position `rank`, ascending.
  std::vector<NodeId> voter_set(CandidateId c, CandidateId rank) const;
  /// First-choice counts per candidate before any influence spreads.
  std::vector<std::int64_t> initial_tally() const;

 private:
  void validate() const;

  std::vector<CandidateId> flat_;  // voter-major, candidate ids in rank order
  NodeId voters_ = 0;
  CandidateId candidates_ = 0;
};

/// The one-position swap an influence message causes: constructive moves
/// candidate 0 up one rank (no-op when already first), destructive moves it
/// down one (no-op when already last).
std::vector<CandidateId> apply_message(std::span<const CandidateId> ranking, Mode mode);

struct ControlProblem {
  DirectedGraph graph;
  PreferenceProfile profile;
  Mode mode = Mode::constructive;
  NodeId budget = 1;

  ControlProblem(DirectedGraph g, PreferenceProfile p, Mode m, NodeId k);
};

/// Votes candidate 0 is short of an outright win, in margin units: the
/// quantity per-scenario margins are compared against. Nonpositive means
/// candidate 0 already wins strictly.
std::int64_t required_margin(const ControlProblem& problem);

/// Win threshold in the units reported to callers: with two candidates, the
/// number of relevant voters that must be influenced; with three or more,
/// identical to required_margin().
std::int64_t threshold(const ControlProblem& problem);

}  // namespace elex
