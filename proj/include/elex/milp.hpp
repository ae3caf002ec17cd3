#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "elex/exact.hpp"

namespace elex {

enum class VarKind {
  seed,      // s_{v}: node v is picked as a seed
  reach,     // x_{i}_{v}: node v is influenced in scenario i
  gain,      // g_{i}_{j}: margin gained against rival j in scenario i
  margin,    // m_{i}: overall margin in scenario i
  win,       // u_{i}: scenario i reaches the required margin
  selector   // z_{i}_{j}: rival j realizes the best demotion margin in scenario i
};

struct MilpVariable {
  std::string name;
  VarKind kind = VarKind::seed;
  bool binary = false;
  double lb = 0.0;
  double ub = std::numeric_limits<double>::infinity();
  std::int32_t scenario = -1;  // -1 when not scenario-indexed
  std::int32_t index = -1;     // node (reach) or rival (gain/selector), else -1
};

struct MilpTerm {
  std::int32_t var = 0;
  double coeff = 0.0;
};

struct MilpConstraint {
  std::string name;
  std::vector<MilpTerm> terms;
  char sense = 'L';  // 'L' <=, 'G' >=, 'E' =
  double rhs = 0.0;
};

struct MilpModel {
  std::string name;
  bool maximize = true;
  std::vector<MilpVariable> vars;
  std::vector<MilpConstraint> cons;
  std::vector<double> objective;  // aligned with vars
  double big_m = 0.0;

  // Shape metadata kept for the enumerative solver; not part of the exports.
  std::int32_t node_count = 0;
  std::int32_t scenario_count = 0;
  std::int32_t budget = 0;
  ObjectiveKind kind = ObjectiveKind::mov;
  Mode mode = Mode::constructive;
};

/// Sample-average formulation over the batch: binary seeds under a budget
/// row, per-scenario reach variables bounded by the seeds that can influence
/// them, per-rival gain rows, margin rows (with big-M selectors for the
/// demotion maximum), and for pov a big-M win indicator per scenario. The
/// objective averages margins (mov) or win indicators (pov); big-M is 4n+4.
MilpModel build_milp(const ControlProblem& problem, const ScenarioBatch& batch, std::size_t k,
                     ObjectiveKind kind);

/// CPLEX LP text format as specified in docs/formats.md.
void export_lp(const MilpModel& model, const std::filesystem::path& file);
/// Fixed-form MPS as specified in docs/formats.md.
void export_mps(const MilpModel& model, const std::filesystem::path& file);

/// Parses the LP grammar export_lp emits. Shape metadata other than what the
/// variable names encode is not recoverable from the file.
MilpModel read_lp(const std::filesystem::path& file);

/// Same objective, same variables (name-keyed bounds and integrality), same
/// constraint rows up to row order and term order; row names are ignored.
bool models_equivalent(const MilpModel& a, const MilpModel& b);

/// Reference solver: enumerates seed assignments that satisfy the budget row,
/// fixes every derived variable at its analytically tight value by reading
/// the constraint rows, verifies the full assignment feasible, and returns
/// the best. Must agree with brute_force on the generating problem.
OracleResult solve_enumerative(const MilpModel& model, const OracleOptions& options = {});

/// Tight per-scenario margin values the model's rows imply for a fixed seed
/// set; lets tests compare the model against the direct margin computation.
std::vector<std::int64_t> model_margins(const MilpModel& model, std::span<const NodeId> seeds);

}  // namespace elex
