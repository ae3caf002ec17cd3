#include "elex/exact.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <thread>

namespace elex {

std::uint64_t subset_count(NodeId n, std::size_t k) {
  constexpr std::uint64_t kMax = ~std::uint64_t{0};
  unsigned __int128 total = 0, binom = 1;
  for (std::size_t j = 0; j <= std::min<std::size_t>(k, n); ++j) {
    if (j > 0) binom = binom * (n - j + 1) / j;
    total += binom;
    if (total > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(total);
}

namespace {

// Per-scenario margins for a candidate seed set, phrased over words so the
// enumeration loop is pure bit arithmetic. WT is the compile-time word count
// of the relevant voter set; WT == 0 falls back to a runtime width.
template <int WT>
struct MarginKernel {
  std::size_t scenario_count = 0;
  std::size_t runtime_width = 0;
  int rivals = 0;
  bool minimize = true;  // constructive takes the worst rival, destructive the best
  bool pov = false;
  std::int64_t delta = 0;
  const std::uint64_t* rival_masks = nullptr;  // rivals x width
  const std::int64_t* offsets = nullptr;

  std::size_t width() const { return WT > 0 ? static_cast<std::size_t>(WT) : runtime_width; }

  std::int64_t operator()(const std::uint64_t* unions) const {
    const std::size_t w_count = width();
    std::int64_t total = 0;
    for (std::size_t y = 0; y < scenario_count; ++y) {
      const std::uint64_t* uy = unions + y * w_count;
      std::int64_t f = 0;
      for (std::size_t w = 0; w < w_count; ++w) f += std::popcount(uy[w]);
      const std::uint64_t* rm = rival_masks;
      std::int64_t extreme = 0;
      for (int j = 0; j < rivals; ++j, rm += w_count) {
        std::int64_t fj = 0;
        for (std::size_t w = 0; w < w_count; ++w) fj += std::popcount(uy[w] & rm[w]);
        std::int64_t term = fj + offsets[j];
        if (j == 0)
          extreme = term;
        else
          extreme = minimize ? std::min(extreme, term) : std::max(extreme, term);
      }
      std::int64_t margin = f + extreme;
      if (pov)
        total += margin >= delta ? 1 : 0;
      else
        total += margin;
    }
    return total;
  }
};

struct SearchBest {
  std::int64_t total = std::numeric_limits<std::int64_t>::min();
  std::vector<NodeId> set;
  std::uint64_t enumerated = 0;
};

template <int WT>
struct SubsetSearch {
  const std::uint64_t* stacked = nullptr;  // node-major, scenario_count*width words per node
  std::size_t row_words = 0;
  NodeId node_count = 0;
  std::size_t k = 0;
  MarginKernel<WT> kernel;

  std::vector<std::uint64_t> unions;  // depth-major work buffer
  std::vector<NodeId> current;
  SearchBest best;

  void run(NodeId first_lo, NodeId first_hi) {
    unions.assign(k * row_words, 0);
    current.clear();
    descend(first_lo, first_hi, 0);
  }

 private:
  void descend(NodeId lo, NodeId hi, std::size_t depth) {
    const std::uint64_t* base = depth == 0 ? nullptr : &unions[(depth - 1) * row_words];
    for (NodeId v = lo; v < hi; ++v) {
      std::uint64_t* u = &unions[depth * row_words];
      const std::uint64_t* row = stacked + static_cast<std::size_t>(v) * row_words;
      if (base == nullptr)
        std::copy(row, row + row_words, u);
      else
        for (std::size_t w = 0; w < row_words; ++w) u[w] = base[w] | row[w];
      current.push_back(v);
      std::int64_t total = kernel(u);
      ++best.enumerated;
      if (total > best.total) {
        best.total = total;
        best.set = current;
      }
      if (depth + 1 < k) descend(v + 1, node_count, depth + 1);
      current.pop_back();
    }
  }
};

struct KernelInputs {
  std::size_t width = 0;
  std::size_t scenario_count = 0;
  int rivals = 0;
  bool minimize = true;
  bool pov = false;
  std::int64_t delta = 0;
  std::vector<std::uint64_t> rival_masks;
  std::vector<std::int64_t> offsets;
  std::vector<std::uint64_t> stacked;
  std::int64_t empty_total = 0;
};

template <int WT>
SearchBest run_search(const KernelInputs& in, NodeId n, std::size_t k, int threads) {
  MarginKernel<WT> kernel{in.scenario_count, in.width,       in.rivals, in.minimize,
                          in.pov,            in.delta,       in.rival_masks.data(),
                          in.offsets.data()};
  SearchBest global;
  global.total = in.empty_total;
  global.enumerated = 1;
  if (k == 0 || n == 0) return global;

  const std::size_t row_words = in.scenario_count * in.width;
  std::size_t workers = threads > 1 ? std::min<std::size_t>(threads, n) : 1;
  std::vector<SubsetSearch<WT>> searches(workers);
  for (auto& s : searches) {
    s.stacked = in.stacked.data();
    s.row_words = row_words;
    s.node_count = n;
    s.k = k;
    s.kernel = kernel;
  }
  if (workers == 1) {
    searches[0].run(0, n);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      NodeId lo = static_cast<NodeId>(std::min<std::size_t>(w * chunk, n));
      NodeId hi = static_cast<NodeId>(std::min<std::size_t>(lo + chunk, n));
      pool.emplace_back([&searches, w, lo, hi] { searches[w].run(lo, hi); });
    }
    for (auto& t : pool) t.join();
  }
  // Workers cover ascending first-seed ranges; merging in that order with a
  // strict comparison keeps the lexicographically smallest argmax.
  for (const auto& s : searches) {
    global.enumerated += s.best.enumerated;
    if (s.best.total > global.total) {
      global.total = s.best.total;
      global.set = s.best.set;
    }
  }
  return global;
}

}  // namespace

OracleResult brute_force(const ControlProblem& problem, const ScenarioBatch& batch, std::size_t k,
                         ObjectiveKind kind, const OracleOptions& options) {
  if (batch.size() == 0) throw std::invalid_argument("scenario batch is empty");
  const NodeId n = problem.graph.node_count();
  const std::size_t r = batch.size();

  std::uint64_t required = subset_count(n, k);
  if (required > options.enumeration_cap)
    throw std::runtime_error("brute force would evaluate " + std::to_string(required) +
                             " seed sets, above the cap of " +
                             std::to_string(options.enumeration_cap));

  MarginEvaluator eval(problem.profile, problem.mode);
  std::int64_t delta = options.pov_margin_override.value_or(required_margin(problem));

  OracleResult result;
  if (kind == ObjectiveKind::pov && delta <= 0) {
    // Every set wins every scenario; the empty set is the lexicographic pick.
    result.best_total = static_cast<std::int64_t>(r);
    result.best_value = 1.0;
    result.enumerated = 1;
    return result;
  }

  KernelInputs in;
  in.scenario_count = r;
  in.rivals = static_cast<int>(problem.profile.rival_count());
  in.minimize = problem.mode == Mode::constructive;
  in.pov = kind == ObjectiveKind::pov;
  in.delta = delta;

  const auto a_nodes = eval.relevant().to_indices();
  const std::size_t a = a_nodes.size();
  in.width = std::max<std::size_t>(1, (a + 63) / 64);

  in.offsets.resize(in.rivals);
  in.rival_masks.assign(in.rivals * in.width, 0);
  for (int j = 0; j < in.rivals; ++j) {
    in.offsets[j] = eval.rival_offset(static_cast<CandidateId>(j + 1));
    const DynamicBitset& overlap = eval.rival_overlap(static_cast<CandidateId>(j + 1));
    for (std::size_t t = 0; t < a; ++t)
      if (overlap.test(a_nodes[t]))
        in.rival_masks[j * in.width + t / 64] |= std::uint64_t{1} << (t % 64);
  }

  // Localized forward reach: bit t of node v's row for scenario y says v
  // influences relevant voter a_nodes[t] in y.
  in.stacked.assign(static_cast<std::size_t>(n) * r * in.width, 0);
  for (std::size_t y = 0; y < r; ++y) {
    auto forward = forward_reach_index(problem.graph, batch.scenarios[y]);
    for (NodeId v = 0; v < n; ++v) {
      std::uint64_t* row = &in.stacked[(static_cast<std::size_t>(v) * r + y) * in.width];
      for (std::size_t t = 0; t < a; ++t)
        if (forward[v].test(a_nodes[t])) row[t / 64] |= std::uint64_t{1} << (t % 64);
    }
  }

  {
    std::vector<std::uint64_t> zero(r * in.width, 0);
    MarginKernel<0> empty_kernel{r,       in.width, in.rivals,             in.minimize,
                                 in.pov,  in.delta, in.rival_masks.data(), in.offsets.data()};
    in.empty_total = empty_kernel(zero.data());
  }

  SearchBest best;
  switch (in.width) {
    case 1: best = run_search<1>(in, n, k, options.threads); break;
    case 2: best = run_search<2>(in, n, k, options.threads); break;
    case 3: best = run_search<3>(in, n, k, options.threads); break;
    case 4: best = run_search<4>(in, n, k, options.threads); break;
    default: best = run_search<0>(in, n, k, options.threads); break;
  }

  result.best_set = std::move(best.set);
  result.best_total = best.total;
  result.enumerated = best.enumerated;
  result.best_value = static_cast<double>(best.total) / static_cast<double>(r);

  // Cross-check the winner through the direct per-scenario path.
  std::int64_t check = 0;
  for (const Scenario& y : batch.scenarios) {
    std::int64_t m = eval.margin(problem.graph, y, result.best_set);
    check += kind == ObjectiveKind::pov ? (m >= delta ? 1 : 0) : m;
  }
  if (check != result.best_total)
    throw std::logic_error("enumeration kernel and direct evaluation disagree");
  return result;
}

}  // namespace elex
