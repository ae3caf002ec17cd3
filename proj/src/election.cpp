#include "elex/election.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "elex/format.hpp"

namespace elex {

std::string_view to_string(Mode mode) {
  return mode == Mode::constructive ? "constructive" : "destructive";
}

Mode mode_from_string(std::string_view name) {
  if (name == "constructive") return Mode::constructive;
  if (name == "destructive") return Mode::destructive;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected constructive or destructive)");
}

PreferenceProfile::PreferenceProfile(std::vector<std::vector<CandidateId>> rankings) {
  if (rankings.empty())
    throw std::invalid_argument("cannot infer candidate count from an empty profile");
  candidates_ = static_cast<CandidateId>(rankings.front().size());
  voters_ = static_cast<NodeId>(rankings.size());
  flat_.reserve(static_cast<std::size_t>(voters_) * candidates_);
  for (const auto& r : rankings) {
    if (r.size() != candidates_)
      throw std::invalid_argument("ranking length does not match candidate count");
    flat_.insert(flat_.end(), r.begin(), r.end());
  }
  validate();
}

PreferenceProfile::PreferenceProfile(std::vector<std::vector<CandidateId>> rankings,
                                     CandidateId candidates)
    : voters_(static_cast<NodeId>(rankings.size())), candidates_(candidates) {
  flat_.reserve(static_cast<std::size_t>(voters_) * candidates_);
  for (const auto& r : rankings) {
    if (r.size() != candidates_)
      throw std::invalid_argument("ranking length does not match candidate count");
    flat_.insert(flat_.end(), r.begin(), r.end());
  }
  validate();
}

void PreferenceProfile::validate() const {
  if (candidates_ < 2) throw std::invalid_argument("need at least two candidates");
  std::vector<bool> seen(candidates_);
  for (NodeId v = 0; v < voters_; ++v) {
    std::fill(seen.begin(), seen.end(), false);
    for (CandidateId r = 0; r < candidates_; ++r) {
      CandidateId c = flat_[static_cast<std::size_t>(v) * candidates_ + r];
      if (c >= candidates_ || seen[c])
        throw std::invalid_argument("voter " + std::to_string(v) +
                                    ": ranking is not a permutation of 0.." +
                                    std::to_string(candidates_ - 1));
      seen[c] = true;
    }
  }
}

PreferenceProfile PreferenceProfile::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open preference file: " + file.string());
  std::vector<std::vector<CandidateId>> rankings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    if (sv.empty() || sv.front() == '#') continue;
    std::istringstream ls{std::string(sv)};
    std::vector<CandidateId> ranking;
    std::string token;
    while (ls >> token)
      ranking.push_back(static_cast<CandidateId>(parse_uint(token, "candidate id")));
    if (!rankings.empty() && ranking.size() != rankings.front().size())
      throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                               ": ranking length differs from previous voters");
    rankings.push_back(std::move(ranking));
  }
  if (rankings.empty()) throw std::runtime_error(file.string() + ": no rankings found");
  try {
    return PreferenceProfile(std::move(rankings));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
}

void PreferenceProfile::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write preference file: " + file.string());
  for (NodeId v = 0; v < voters_; ++v) {
    auto r = ranking(v);
    for (CandidateId i = 0; i < candidates_; ++i) out << (i ? " " : "") << r[i];
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::span<const CandidateId> PreferenceProfile::ranking(NodeId voter) const {
  if (voter >= voters_) throw std::out_of_range("voter id out of range");
  return {flat_.data() + static_cast<std::size_t>(voter) * candidates_, candidates_};
}

CandidateId PreferenceProfile::choice(NodeId voter, CandidateId rank) const {
  if (rank < 1 || rank > candidates_) throw std::out_of_range("rank out of range");
  return ranking(voter)[rank - 1];
}

CandidateId PreferenceProfile::rank_of(NodeId voter, CandidateId c) const {
  auto r = ranking(voter);
  for (CandidateId i = 0; i < candidates_; ++i)
    if (r[i] == c) return i + 1;
  throw std::out_of_range("candidate id out of range");
}

std::vector<NodeId> PreferenceProfile::voter_set(CandidateId c, CandidateId rank) const {
  if (c >= candidates_) throw std::out_of_range("candidate id out of range");
  if (rank < 1 || rank > candidates_) throw std::out_of_range("rank out of range");
  std::vector<NodeId> out;
  for (NodeId v = 0; v < voters_; ++v)
    if (flat_[static_cast<std::size_t>(v) * candidates_ + (rank - 1)] == c) out.push_back(v);
  return out;
}

std::vector<std::int64_t> PreferenceProfile::initial_tally() const {
  std::vector<std::int64_t> tally(candidates_, 0);
  for (NodeId v = 0; v < voters_; ++v)
    ++tally[flat_[static_cast<std::size_t>(v) * candidates_]];
  return tally;
}

std::vector<CandidateId> apply_message(std::span<const CandidateId> ranking, Mode mode) {
  std::vector<CandidateId> out(ranking.begin(), ranking.end());
  auto it = std::find(out.begin(), out.end(), kTargetCandidate);
  if (it == out.end()) throw std::invalid_argument("ranking does not contain candidate 0");
  if (mode == Mode::constructive) {
    if (it != out.begin()) std::iter_swap(it, it - 1);
  } else {
    if (it + 1 != out.end()) std::iter_swap(it, it + 1);
  }
  return out;
}

ControlProblem::ControlProblem(DirectedGraph g, PreferenceProfile p, Mode m, NodeId k)
    : graph(std::move(g)), profile(std::move(p)), mode(m), budget(k) {
  if (graph.node_count() != profile.voter_count())
    throw std::invalid_argument("graph has " + std::to_string(graph.node_count()) +
                                " nodes but profile has " +
                                std::to_string(profile.voter_count()) + " voters");
  if (budget < 1 || budget > graph.node_count())
    throw std::invalid_argument("budget must be between 1 and the node count");
}

namespace {

// floor(x / 2) for possibly negative x.
std::int64_t floor_half(std::int64_t x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

std::int64_t best_rival_tally(const std::vector<std::int64_t>& tally) {
  std::int64_t best = 0;
  for (std::size_t c = 1; c < tally.size(); ++c) best = std::max(best, tally[c]);
  return best;
}

}  // namespace

std::int64_t required_margin(const ControlProblem& problem) {
  auto tally = problem.profile.initial_tally();
  std::int64_t target = tally[kTargetCandidate];
  std::int64_t rival = best_rival_tally(tally);
  return problem.mode == Mode::constructive ? rival - target + 1 : target - rival + 1;
}

std::int64_t threshold(const ControlProblem& problem) {
  if (problem.profile.rival_count() == 1) {
    auto tally = problem.profile.initial_tally();
    std::int64_t diff = problem.mode == Mode::constructive ? tally[1] - tally[0]
                                                           : tally[0] - tally[1];
    return floor_half(diff) + 1;
  }
  return required_margin(problem);
}

}  // namespace elex
