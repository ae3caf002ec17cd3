#include "elex/greedy.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "elex/parallel.hpp"
#include "elex/random.hpp"

namespace elex {

FunctionOracle::FunctionOracle(std::function<std::int64_t(const std::vector<NodeId>&)> fn)
    : fn_(std::move(fn)) {
  current_value_ = fn_(current_);
}

std::unique_ptr<MarginalOracle::Scratch> FunctionOracle::make_scratch() const {
  return std::make_unique<Scratch>();
}

std::int64_t FunctionOracle::gain(NodeId v, Scratch&) const {
  std::vector<NodeId> extended = current_;
  extended.push_back(v);
  return fn_(extended) - current_value_;
}

void FunctionOracle::commit(NodeId v) {
  current_.push_back(v);
  current_value_ = fn_(current_);
}

namespace {

struct BfsScratch final : MarginalOracle::Scratch {
  explicit BfsScratch(NodeId n) : stamp(n, 0) {}
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  std::vector<NodeId> stack;
};

}  // namespace

ReachOracle::ReachOracle(const DirectedGraph& graph, const ScenarioBatch& batch,
                         DynamicBitset targets, std::int64_t cap)
    : graph_(graph), batch_(batch), targets_(std::move(targets)), cap_(cap) {
  if (batch_.size() == 0) throw std::invalid_argument("scenario batch is empty");
  if (targets_.size() != graph_.node_count())
    throw std::invalid_argument("target mask does not match the graph");
  if (cap_ < 1) throw std::invalid_argument("cap must be positive");
  states_.resize(batch_.size());
  for (auto& st : states_) st.reached = DynamicBitset(graph_.node_count());
}

std::unique_ptr<MarginalOracle::Scratch> ReachOracle::make_scratch() const {
  return std::make_unique<BfsScratch>(graph_.node_count());
}

std::int64_t ReachOracle::gain(NodeId v, Scratch& scratch) const {
  if (v >= graph_.node_count()) throw std::out_of_range("node id out of range");
  auto& s = static_cast<BfsScratch&>(scratch);
  std::int64_t gain = 0;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const State& st = states_[i];
    if (st.done || st.reached.test(v)) continue;
    const Scenario& y = batch_.scenarios[i];
    std::int64_t headroom = cap_ - st.covered;  // > 0 here, else done would be set
    ++s.epoch;
    s.stack.clear();
    s.stack.push_back(v);
    s.stamp[v] = s.epoch;
    std::int64_t fresh = targets_.test(v) ? 1 : 0;
    while (!s.stack.empty() && fresh < headroom) {
      NodeId u = s.stack.back();
      s.stack.pop_back();
      std::size_t base = graph_.out_offset(u);
      auto out = graph_.out_edges(u);
      for (std::size_t e = 0; e < out.size(); ++e) {
        if (!y.edge_live(base + e)) continue;
        NodeId w = out[e].target;
        if (s.stamp[w] == s.epoch || st.reached.test(w)) continue;
        s.stamp[w] = s.epoch;
        s.stack.push_back(w);
        if (targets_.test(w) && ++fresh >= headroom) break;
      }
    }
    gain += std::min(fresh, headroom);
  }
  return gain;
}

void ReachOracle::commit(NodeId v) {
  if (v >= graph_.node_count()) throw std::out_of_range("node id out of range");
  std::vector<NodeId> stack;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    State& st = states_[i];
    if (st.done || st.reached.test(v)) continue;
    const Scenario& y = batch_.scenarios[i];
    stack.clear();
    stack.push_back(v);
    st.reached.set(v);
    if (targets_.test(v)) ++st.covered;
    // Once the cap is hit this scenario never contributes again, so the
    // partially expanded reached set can be abandoned mid-walk.
    while (!stack.empty() && st.covered < cap_) {
      NodeId u = stack.back();
      stack.pop_back();
      std::size_t base = graph_.out_offset(u);
      auto out = graph_.out_edges(u);
      for (std::size_t e = 0; e < out.size(); ++e) {
        if (!y.edge_live(base + e)) continue;
        NodeId w = out[e].target;
        if (st.reached.test(w)) continue;
        st.reached.set(w);
        stack.push_back(w);
        if (targets_.test(w) && ++st.covered >= cap_) break;
      }
    }
    if (st.covered >= cap_) st.done = true;
  }
  total_ = 0;
  for (const State& st : states_) total_ += std::min(st.covered, cap_);
}

namespace {

struct QueueEntry {
  std::int64_t bound;
  NodeId id;
  std::uint32_t round;  // |chosen| when the bound was computed
};

struct QueueOrder {
  // Max-heap on bound; ties go to the smaller node id.
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

}  // namespace

GreedyTrace lazy_greedy(MarginalOracle& oracle, std::span<const NodeId> ground, std::size_t k,
                        int threads) {
  GreedyTrace trace;
  if (k == 0 || ground.empty()) {
    trace.total = oracle.value();
    return trace;
  }
  std::vector<NodeId> nodes(ground.begin(), ground.end());
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw std::invalid_argument("ground set contains duplicate nodes");

  std::vector<std::int64_t> initial(nodes.size());
  {
    // First pass touches every candidate once; split it across workers, one
    // scratch each, results landing in fixed slots.
    std::size_t workers = std::max(1, threads);
    std::vector<std::unique_ptr<MarginalOracle::Scratch>> scratches;
    for (std::size_t w = 0; w < workers; ++w) scratches.push_back(oracle.make_scratch());
    std::size_t chunk = (nodes.size() + workers - 1) / workers;
    parallel_for(workers, static_cast<int>(workers), [&](std::size_t w) {
      std::size_t begin = w * chunk, end = std::min(nodes.size(), begin + chunk);
      for (std::size_t i = begin; i < end; ++i) initial[i] = oracle.gain(nodes[i], *scratches[w]);
    });
  }
  trace.evaluations = nodes.size();

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue;
  for (std::size_t i = 0; i < nodes.size(); ++i) queue.push({initial[i], nodes[i], 0});

  auto scratch = oracle.make_scratch();
  const std::size_t picks = std::min(k, nodes.size());
  while (trace.chosen.size() < picks) {
    QueueEntry top = queue.top();
    queue.pop();
    if (top.round == trace.chosen.size()) {
      oracle.commit(top.id);
      trace.chosen.push_back(top.id);
      trace.gains.push_back(top.bound);
    } else {
      std::int64_t fresh = oracle.gain(top.id, *scratch);
      ++trace.evaluations;
      queue.push({fresh, top.id, static_cast<std::uint32_t>(trace.chosen.size())});
    }
  }
  trace.total = oracle.value();
  return trace;
}

namespace {

std::vector<NodeId> all_nodes(const DirectedGraph& graph) {
  std::vector<NodeId> nodes(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) nodes[v] = v;
  return nodes;
}

GreedyTrace greedy_reach(const ControlProblem& problem, const ScenarioBatch& batch, std::size_t k,
                         std::int64_t cap, int threads) {
  MarginEvaluator eval(problem.profile, problem.mode);
  ReachOracle oracle(problem.graph, batch, eval.relevant(), cap);
  auto ground = all_nodes(problem.graph);
  return lazy_greedy(oracle, ground, k, threads);
}

void require_mode(const ControlProblem& problem, Mode expected, const char* fn) {
  if (problem.mode != expected)
    throw std::invalid_argument(std::string(fn) + " called with a " +
                                std::string(to_string(problem.mode)) + " problem");
}

}  // namespace

GreedyTrace mov_constructive(const ControlProblem& problem, const ScenarioBatch& batch,
                             std::size_t k, int threads) {
  require_mode(problem, Mode::constructive, "mov_constructive");
  return greedy_reach(problem, batch, k, ReachOracle::no_cap(), threads);
}

GreedyTrace mov_destructive(const ControlProblem& problem, const ScenarioBatch& batch,
                            std::size_t k, int threads) {
  require_mode(problem, Mode::destructive, "mov_destructive");
  return greedy_reach(problem, batch, k, ReachOracle::no_cap(), threads);
}

ThresholdSchedule ThresholdSchedule::exhaustive(std::int64_t lo, std::int64_t hi) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("bad cap range");
  ThresholdSchedule s;
  s.kind = Kind::exhaustive;
  s.caps.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t c = lo; c <= hi; ++c) s.caps.push_back(c);
  return s;
}

ThresholdSchedule ThresholdSchedule::sampled(std::int64_t lo, std::int64_t hi, std::size_t count,
                                             std::uint64_t seed) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("bad cap range");
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  ThresholdSchedule s;
  s.kind = Kind::sampled;
  s.caps = sample_without_replacement(lo, hi, count, seed);
  return s;
}

std::pair<std::int64_t, std::int64_t> cap_range(const ControlProblem& problem) {
  MarginEvaluator eval(problem.profile, problem.mode);
  std::int64_t relevant = static_cast<std::int64_t>(eval.relevant().count());
  if (relevant == 0) return {1, 1};
  std::int64_t needed = required_margin(problem);
  std::int64_t lo;
  if (problem.profile.rival_count() == 1) {
    // One rival: margin is exactly twice the covered count, so the covered
    // count itself must reach the two-candidate threshold.
    lo = threshold(problem);
  } else {
    // Each covered voter moves the margin by at most 2.
    lo = (needed + 1) / 2;
  }
  lo = std::clamp<std::int64_t>(lo, 1, relevant);
  return {lo, relevant};
}

ThresholdSchedule default_schedule(const ControlProblem& problem, std::uint64_t seed) {
  auto [lo, hi] = cap_range(problem);
  if (hi - lo + 1 <= 200) return ThresholdSchedule::exhaustive(lo, hi);
  return ThresholdSchedule::sampled(lo, hi, 150, seed);
}

ThresholdSearchResult enumerate_threshold(const ControlProblem& problem,
                                          const ScenarioBatch& batch, std::size_t k,
                                          const ThresholdSchedule& schedule, int threads) {
  if (batch.size() == 0) throw std::invalid_argument("scenario batch is empty");
  ThresholdSearchResult result;
  result.scenario_count = batch.size();

  std::int64_t needed = required_margin(problem);
  if (needed <= 0) {
    // Candidate 0 already wins outright; nothing to do.
    result.successes = static_cast<std::int64_t>(batch.size());
    return result;
  }

  MarginEvaluator eval(problem.profile, problem.mode);
  std::int64_t relevant = static_cast<std::int64_t>(eval.relevant().count());
  auto successes_of = [&](std::span<const NodeId> seeds) {
    std::int64_t wins = 0;
    for (const Scenario& y : batch.scenarios)
      if (eval.margin(problem.graph, y, seeds) >= needed) ++wins;
    return wins;
  };
  if (relevant == 0) {
    result.successes = successes_of({});
    return result;
  }

  if (schedule.caps.empty()) throw std::invalid_argument("threshold schedule is empty");
  for (std::int64_t cap : schedule.caps)
    if (cap < 1 || cap > relevant)
      throw std::invalid_argument("cap " + std::to_string(cap) + " outside 1.." +
                                  std::to_string(relevant));

  result.runs.resize(schedule.caps.size());
  // Each cap's greedy run is independent; selection happens afterwards in
  // cap order, so the outcome does not depend on the worker count.
  parallel_for(schedule.caps.size(), threads, [&](std::size_t i) {
    ThresholdRun& run = result.runs[i];
    run.cap = schedule.caps[i];
    ReachOracle oracle(problem.graph, batch, eval.relevant(), run.cap);
    auto ground = all_nodes(problem.graph);
    run.trace = lazy_greedy(oracle, ground, k, 1);
    run.successes = successes_of(run.trace.chosen);
  });

  // Ties: smaller cap first, then lexicographically smaller seed set.
  const ThresholdRun* best = nullptr;
  for (const ThresholdRun& run : result.runs) {
    bool better = best == nullptr || run.successes > best->successes;
    if (!better && run.successes == best->successes) {
      if (run.cap != best->cap)
        better = run.cap < best->cap;
      else
        better = std::lexicographical_compare(run.trace.chosen.begin(), run.trace.chosen.end(),
                                              best->trace.chosen.begin(), best->trace.chosen.end());
    }
    if (better) best = &run;
  }
  result.seeds = best->trace.chosen;
  result.successes = best->successes;
  result.chosen_cap = best->cap;
  return result;
}

ThresholdSearchResult pov_constructive(const ControlProblem& problem, const ScenarioBatch& batch,
                                       std::size_t k, const ThresholdSchedule& schedule,
                                       int threads) {
  require_mode(problem, Mode::constructive, "pov_constructive");
  return enumerate_threshold(problem, batch, k, schedule, threads);
}

ThresholdSearchResult pov_destructive(const ControlProblem& problem, const ScenarioBatch& batch,
                                      std::size_t k, const ThresholdSchedule& schedule,
                                      int threads) {
  require_mode(problem, Mode::destructive, "pov_destructive");
  return enumerate_threshold(problem, batch, k, schedule, threads);
}

}  // namespace elex
