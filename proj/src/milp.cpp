#include "elex/milp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "elex/cascade.hpp"
#include "elex/format.hpp"
#include "elex/objectives.hpp"

namespace elex {

namespace {

std::string var_name(std::string_view prefix, std::int64_t a) {
  std::string out(prefix);
  out += '_';
  out += std::to_string(a);
  return out;
}

std::string var_name(std::string_view prefix, std::int64_t a, std::int64_t b) {
  std::string out = var_name(prefix, a);
  out += '_';
  out += std::to_string(b);
  return out;
}

}  // namespace

MilpModel build_milp(const ControlProblem& problem, const ScenarioBatch& batch, std::size_t k,
                     ObjectiveKind kind) {
  const DirectedGraph& graph = problem.graph;
  const NodeId n = graph.node_count();
  const std::size_t r = batch.scenarios.size();
  if (r == 0) throw std::invalid_argument("build_milp: scenario batch is empty");
  if (k == 0 || k > n) throw std::invalid_argument("build_milp: budget must be in [1, node count]");

  const MarginEvaluator eval(problem.profile, problem.mode);
  const CandidateId rivals = eval.rival_count();
  const bool destructive = problem.mode == Mode::destructive;
  const bool pov = kind == ObjectiveKind::pov;
  const double big_m = 4.0 * static_cast<double>(n) + 4.0;
  const std::int64_t delta = pov ? required_margin(problem) : 0;

  MilpModel model;
  model.name = std::string(to_string(kind)) + "_" + std::string(to_string(problem.mode));
  model.maximize = true;
  model.big_m = big_m;
  model.node_count = static_cast<std::int32_t>(n);
  model.scenario_count = static_cast<std::int32_t>(r);
  model.budget = static_cast<std::int32_t>(k);
  model.kind = kind;
  model.mode = problem.mode;

  // Variable layout: seeds, then per-scenario blocks of reach / gain / margin,
  // then the scenario-indexed win or selector binaries when the model has them.
  const std::size_t s_base = 0;
  const std::size_t x_base = s_base + n;
  const std::size_t g_base = x_base + r * static_cast<std::size_t>(n);
  const std::size_t m_base = g_base + r * static_cast<std::size_t>(rivals);
  const std::size_t tail_base = m_base + r;
  const std::size_t z_base = tail_base + (pov ? r : 0);
  auto s_var = [&](NodeId v) { return static_cast<std::int32_t>(s_base + v); };
  auto x_var = [&](std::size_t i, NodeId v) {
    return static_cast<std::int32_t>(x_base + i * n + v);
  };
  auto g_var = [&](std::size_t i, CandidateId rival) {
    return static_cast<std::int32_t>(g_base + i * rivals + (rival - 1));
  };
  auto m_var = [&](std::size_t i) { return static_cast<std::int32_t>(m_base + i); };
  auto u_var = [&](std::size_t i) { return static_cast<std::int32_t>(tail_base + i); };
  auto z_var = [&](std::size_t i, CandidateId rival) {
    return static_cast<std::int32_t>(z_base + i * rivals + (rival - 1));
  };

  for (NodeId v = 0; v < n; ++v) {
    model.vars.push_back({var_name("s", v), VarKind::seed, true, 0.0, 1.0, -1,
                          static_cast<std::int32_t>(v)});
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (NodeId v = 0; v < n; ++v) {
      model.vars.push_back({var_name("x", static_cast<std::int64_t>(i), v), VarKind::reach, false,
                            0.0, 1.0, static_cast<std::int32_t>(i), static_cast<std::int32_t>(v)});
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (CandidateId j = 1; j <= rivals; ++j) {
      model.vars.push_back({var_name("g", static_cast<std::int64_t>(i), j), VarKind::gain, false,
                            0.0, std::numeric_limits<double>::infinity(),
                            static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    model.vars.push_back({var_name("m", static_cast<std::int64_t>(i)), VarKind::margin, false, 0.0,
                          std::numeric_limits<double>::infinity(), static_cast<std::int32_t>(i),
                          -1});
  }
  if (pov) {
    for (std::size_t i = 0; i < r; ++i) {
      model.vars.push_back({var_name("u", static_cast<std::int64_t>(i)), VarKind::win, true, 0.0,
                            1.0, static_cast<std::int32_t>(i), -1});
    }
  }
  if (destructive) {
    for (std::size_t i = 0; i < r; ++i) {
      for (CandidateId j = 1; j <= rivals; ++j) {
        model.vars.push_back({var_name("z", static_cast<std::int64_t>(i), j), VarKind::selector,
                              true, 0.0, 1.0, static_cast<std::int32_t>(i),
                              static_cast<std::int32_t>(j)});
      }
    }
  }

  model.objective.assign(model.vars.size(), 0.0);
  const double weight = 1.0 / static_cast<double>(r);
  for (std::size_t i = 0; i < r; ++i) {
    model.objective[static_cast<std::size_t>(pov ? u_var(i) : m_var(i))] = weight;
  }

  MilpConstraint budget_row;
  budget_row.name = "budget";
  budget_row.sense = 'L';
  budget_row.rhs = static_cast<double>(k);
  for (NodeId v = 0; v < n; ++v) budget_row.terms.push_back({s_var(v), 1.0});
  model.cons.push_back(std::move(budget_row));

  const std::vector<NodeId> relevant_nodes = eval.relevant().to_indices();
  for (std::size_t i = 0; i < r; ++i) {
    const std::vector<DynamicBitset> reverse = reverse_reach_sets(graph, batch.scenarios[i]);
    for (NodeId v = 0; v < n; ++v) {
      MilpConstraint row;
      row.name = var_name("reach", static_cast<std::int64_t>(i), v);
      row.sense = 'L';
      row.rhs = 0.0;
      row.terms.push_back({x_var(i, v), 1.0});
      for (NodeId u : reverse[v].to_indices()) row.terms.push_back({s_var(u), -1.0});
      model.cons.push_back(std::move(row));
    }
    for (CandidateId j = 1; j <= rivals; ++j) {
      MilpConstraint row;
      row.name = var_name("gain", static_cast<std::int64_t>(i), j);
      row.sense = 'L';
      row.rhs = 0.0;
      row.terms.push_back({g_var(i, j), 1.0});
      const DynamicBitset& overlap = eval.rival_overlap(j);
      for (NodeId v : relevant_nodes) {
        row.terms.push_back({x_var(i, v), overlap.test(v) ? -2.0 : -1.0});
      }
      model.cons.push_back(std::move(row));
    }
    for (CandidateId j = 1; j <= rivals; ++j) {
      MilpConstraint row;
      row.name = var_name("margin", static_cast<std::int64_t>(i), j);
      row.sense = 'L';
      row.terms.push_back({m_var(i), 1.0});
      row.terms.push_back({g_var(i, j), -1.0});
      if (destructive) {
        row.terms.push_back({z_var(i, j), big_m});
        row.rhs = big_m + static_cast<double>(eval.rival_offset(j));
      } else {
        row.rhs = static_cast<double>(eval.rival_offset(j));
      }
      model.cons.push_back(std::move(row));
    }
    if (destructive) {
      MilpConstraint row;
      row.name = var_name("cover", static_cast<std::int64_t>(i));
      row.sense = 'G';
      row.rhs = 1.0;
      for (CandidateId j = 1; j <= rivals; ++j) row.terms.push_back({z_var(i, j), 1.0});
      model.cons.push_back(std::move(row));
    }
    if (pov) {
      MilpConstraint row;
      row.name = var_name("win", static_cast<std::int64_t>(i));
      row.sense = 'L';
      row.rhs = big_m - static_cast<double>(delta);
      row.terms.push_back({u_var(i), big_m});
      row.terms.push_back({m_var(i), -1.0});
      model.cons.push_back(std::move(row));
    }
  }
  return model;
}

namespace {

std::string lp_terms(const MilpModel& model, const std::vector<MilpTerm>& terms) {
  std::string out;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double c = terms[t].coeff;
    if (t == 0) {
      out += format_double(c);
    } else {
      out += c < 0 ? " - " : " + ";
      out += format_double(std::abs(c));
    }
    out += ' ';
    out += model.vars[static_cast<std::size_t>(terms[t].var)].name;
  }
  return out;
}

std::string_view lp_sense(char sense) {
  switch (sense) {
    case 'L': return "<=";
    case 'G': return ">=";
    case 'E': return "=";
    default: throw std::invalid_argument(std::string("unknown constraint sense: ") + sense);
  }
}

}  // namespace

void export_lp(const MilpModel& model, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");

  out << "\\ Problem: " << model.name << "\n";
  out << (model.maximize ? "Maximize" : "Minimize") << "\n";
  std::vector<MilpTerm> obj;
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    if (model.objective[v] != 0.0) obj.push_back({static_cast<std::int32_t>(v), model.objective[v]});
  }
  out << " obj: " << lp_terms(model, obj) << "\n";
  out << "Subject To\n";
  for (const MilpConstraint& row : model.cons) {
    out << ' ' << row.name << ": " << lp_terms(model, row.terms) << ' ' << lp_sense(row.sense)
        << ' ' << format_double(row.rhs) << "\n";
  }
  out << "Bounds\n";
  const double inf = std::numeric_limits<double>::infinity();
  for (const MilpVariable& var : model.vars) {
    if (var.binary) continue;  // Binaries section fixes the [0, 1] box
    if (var.lb == 0.0 && var.ub == inf) continue;
    if (var.lb == -inf && var.ub == inf) {
      out << ' ' << var.name << " free\n";
    } else if (var.lb == 0.0) {
      out << ' ' << var.name << " <= " << format_double(var.ub) << "\n";
    } else if (var.ub == inf) {
      out << ' ' << var.name << " >= " << format_double(var.lb) << "\n";
    } else {
      out << ' ' << format_double(var.lb) << " <= " << var.name << " <= "
          << format_double(var.ub) << "\n";
    }
  }
  bool any_binary = false;
  for (const MilpVariable& var : model.vars) any_binary |= var.binary;
  if (any_binary) {
    out << "Binaries\n";
    for (const MilpVariable& var : model.vars) {
      if (var.binary) out << ' ' << var.name << "\n";
    }
  }
  out << "End\n";
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    tokens.emplace_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

bool is_sense_token(const std::string& token) {
  return token == "<=" || token == ">=" || token == "=" || token == "<" || token == ">";
}

char sense_from_token(const std::string& token) {
  if (token == "<=" || token == "<") return 'L';
  if (token == ">=" || token == ">") return 'G';
  return 'E';
}

/// Accumulates variables in first-appearance order and infers the kind /
/// scenario / rival-or-node indices our exports encode in the names.
struct LpVarTable {
  std::unordered_map<std::string, std::int32_t> ids;
  std::vector<MilpVariable> vars;

  std::int32_t intern(const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    MilpVariable var;
    var.name = name;
    classify(var);
    const auto id = static_cast<std::int32_t>(vars.size());
    vars.push_back(std::move(var));
    ids.emplace(name, id);
    return id;
  }

  static void classify(MilpVariable& var) {
    const std::string& name = var.name;
    if (name.size() < 3 || name[1] != '_') return;
    std::int64_t first = -1;
    std::int64_t second = -1;
    const char* begin = name.c_str() + 2;
    const char* end = name.c_str() + name.size();
    auto [mid, ec] = std::from_chars(begin, end, first);
    if (ec != std::errc{}) return;
    if (mid != end) {
      if (*mid != '_') return;
      auto [tail, ec2] = std::from_chars(mid + 1, end, second);
      if (ec2 != std::errc{} || tail != end) return;
    }
    switch (name[0]) {
      case 's':
        var.kind = VarKind::seed;
        var.index = static_cast<std::int32_t>(first);
        return;
      case 'x':
        var.kind = VarKind::reach;
        break;
      case 'g':
        var.kind = VarKind::gain;
        break;
      case 'm':
        var.kind = VarKind::margin;
        break;
      case 'u':
        var.kind = VarKind::win;
        break;
      case 'z':
        var.kind = VarKind::selector;
        break;
      default:
        return;
    }
    var.scenario = static_cast<std::int32_t>(first);
    if (second >= 0) var.index = static_cast<std::int32_t>(second);
  }
};

/// Parses "[sign] [coeff] name" sequences; a missing coefficient means 1.
std::vector<MilpTerm> parse_terms(const std::vector<std::string>& tokens, std::size_t begin,
                                  std::size_t end, LpVarTable& table, const std::string& where) {
  std::vector<MilpTerm> terms;
  double sign = 1.0;
  double coeff = 1.0;
  bool has_coeff = false;
  for (std::size_t t = begin; t < end; ++t) {
    const std::string& token = tokens[t];
    if (token == "+" || token == "-") {
      if (has_coeff) throw std::invalid_argument("dangling coefficient in " + where);
      if (token == "-") sign = -sign;
      continue;
    }
    if (is_name_start(token[0])) {
      terms.push_back({table.intern(token), sign * coeff});
      sign = 1.0;
      coeff = 1.0;
      has_coeff = false;
      continue;
    }
    std::string numeric = token;
    if (numeric[0] == '+' || numeric[0] == '-') {
      if (numeric[0] == '-') sign = -sign;
      numeric.erase(0, 1);
    }
    if (has_coeff) throw std::invalid_argument("two coefficients in a row in " + where);
    coeff = parse_double(numeric, where);
    has_coeff = true;
  }
  if (has_coeff || sign < 0) throw std::invalid_argument("trailing operator in " + where);
  return terms;
}

}  // namespace

MilpModel read_lp(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());

  MilpModel model;
  LpVarTable table;
  std::vector<std::pair<std::int32_t, double>> objective_terms;

  enum class Section { preamble, objective, constraints, bounds, binaries, done };
  Section section = Section::preamble;
  std::vector<std::string> row_tokens;
  std::size_t line_no = 0;

  auto flush_row = [&]() {
    if (row_tokens.empty()) return;
    std::size_t sense_pos = row_tokens.size();
    for (std::size_t t = 0; t < row_tokens.size(); ++t) {
      if (is_sense_token(row_tokens[t])) {
        sense_pos = t;
        break;
      }
    }
    if (sense_pos + 2 != row_tokens.size()) {
      throw std::invalid_argument(file.string() + ": malformed constraint near line " +
                                  std::to_string(line_no));
    }
    MilpConstraint row;
    std::size_t begin = 0;
    if (!row_tokens.empty() && row_tokens[0].back() == ':') {
      row.name = row_tokens[0].substr(0, row_tokens[0].size() - 1);
      begin = 1;
    }
    const std::string where = file.string() + " constraint " +
                              (row.name.empty() ? std::to_string(model.cons.size()) : row.name);
    row.terms = parse_terms(row_tokens, begin, sense_pos, table, where);
    row.sense = sense_from_token(row_tokens[sense_pos]);
    row.rhs = parse_double(row_tokens[sense_pos + 1], where + " rhs");
    model.cons.push_back(std::move(row));
    row_tokens.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '\\') {
      constexpr std::string_view kProblem = "\\ Problem: ";
      if (line.compare(first, kProblem.size(), kProblem) == 0) {
        model.name = line.substr(first + kProblem.size());
      }
      continue;
    }

    const std::string folded = lower(line.substr(first));
    if (folded == "maximize" || folded == "minimize") {
      model.maximize = folded == "maximize";
      section = Section::objective;
      continue;
    }
    if (folded == "subject to" || folded == "st" || folded == "s.t.") {
      section = Section::constraints;
      continue;
    }
    if (folded == "bounds") {
      flush_row();
      section = Section::bounds;
      continue;
    }
    if (folded == "binaries" || folded == "binary") {
      flush_row();
      section = Section::binaries;
      continue;
    }
    if (folded == "end") {
      flush_row();
      section = Section::done;
      break;
    }

    std::vector<std::string> tokens = tokenize(line);
    switch (section) {
      case Section::preamble:
        throw std::invalid_argument(file.string() + ":" + std::to_string(line_no) +
                                    ": expected an objective sense header");
      case Section::objective: {
        std::size_t begin = 0;
        if (!tokens.empty() && tokens[0].back() == ':') begin = 1;
        for (const MilpTerm& term :
             parse_terms(tokens, begin, tokens.size(), table, file.string() + " objective")) {
          objective_terms.emplace_back(term.var, term.coeff);
        }
        break;
      }
      case Section::constraints:
        row_tokens.insert(row_tokens.end(), tokens.begin(), tokens.end());
        if (row_tokens.size() >= 2 && is_sense_token(row_tokens[row_tokens.size() - 2])) {
          flush_row();
        }
        break;
      case Section::bounds: {
        const std::string where = file.string() + ":" + std::to_string(line_no) + " bound";
        if (tokens.size() == 2 && lower(tokens[1]) == "free") {
          const auto id = static_cast<std::size_t>(table.intern(tokens[0]));
          table.vars[id].lb = -std::numeric_limits<double>::infinity();
          table.vars[id].ub = std::numeric_limits<double>::infinity();
        } else if (tokens.size() == 3 && is_name_start(tokens[0][0])) {
          const auto id = static_cast<std::size_t>(table.intern(tokens[0]));
          const double value = parse_double(tokens[2], where);
          if (tokens[1] == "<=" || tokens[1] == "<") {
            table.vars[id].ub = value;
          } else if (tokens[1] == ">=" || tokens[1] == ">") {
            table.vars[id].lb = value;
          } else if (tokens[1] == "=") {
            table.vars[id].lb = value;
            table.vars[id].ub = value;
          } else {
            throw std::invalid_argument(where + ": unknown comparator " + tokens[1]);
          }
        } else if (tokens.size() == 5 && is_sense_token(tokens[1]) && is_sense_token(tokens[3])) {
          const auto id = static_cast<std::size_t>(table.intern(tokens[2]));
          table.vars[id].lb = parse_double(tokens[0], where);
          table.vars[id].ub = parse_double(tokens[4], where);
        } else {
          throw std::invalid_argument(where + ": unrecognized bound line");
        }
        break;
      }
      case Section::binaries:
        for (const std::string& token : tokens) {
          const auto id = static_cast<std::size_t>(table.intern(token));
          table.vars[id].binary = true;
          table.vars[id].lb = 0.0;
          table.vars[id].ub = 1.0;
        }
        break;
      case Section::done:
        break;
    }
  }
  if (section != Section::done) {
    throw std::invalid_argument(file.string() + ": missing End marker");
  }

  model.vars = std::move(table.vars);
  model.objective.assign(model.vars.size(), 0.0);
  for (const auto& [var, coeff] : objective_terms) {
    model.objective[static_cast<std::size_t>(var)] += coeff;
  }

  // Shape metadata recovered from the names, best effort.
  std::int32_t max_scenario = -1;
  std::int32_t max_node = -1;
  bool any_win = false;
  bool any_selector = false;
  for (const MilpVariable& var : model.vars) {
    max_scenario = std::max(max_scenario, var.scenario);
    if (var.kind == VarKind::seed) max_node = std::max(max_node, var.index);
    any_win |= var.kind == VarKind::win;
    any_selector |= var.kind == VarKind::selector;
  }
  model.scenario_count = max_scenario + 1;
  model.node_count = max_node + 1;
  model.kind = any_win ? ObjectiveKind::pov : ObjectiveKind::mov;
  model.mode = any_selector ? Mode::destructive : Mode::constructive;
  for (const MilpConstraint& row : model.cons) {
    bool only_seeds = !row.terms.empty();
    for (const MilpTerm& term : row.terms) {
      only_seeds &= model.vars[static_cast<std::size_t>(term.var)].kind == VarKind::seed;
    }
    if (only_seeds && row.sense == 'L') {
      model.budget = static_cast<std::int32_t>(std::llround(row.rhs));
      break;
    }
  }
  return model;
}

namespace {

std::string normalized_row(const MilpModel& model, const MilpConstraint& row) {
  std::map<std::string_view, double> coeffs;
  for (const MilpTerm& term : row.terms) {
    coeffs[model.vars[static_cast<std::size_t>(term.var)].name] += term.coeff;
  }
  std::string out;
  out += row.sense;
  out += '|';
  out += format_double(row.rhs);
  for (const auto& [name, coeff] : coeffs) {
    if (coeff == 0.0) continue;
    out += '|';
    out += name;
    out += '*';
    out += format_double(coeff);
  }
  return out;
}

}  // namespace

bool models_equivalent(const MilpModel& a, const MilpModel& b) {
  if (a.maximize != b.maximize) return false;
  if (a.vars.size() != b.vars.size() || a.cons.size() != b.cons.size()) return false;

  std::unordered_map<std::string_view, const MilpVariable*> b_vars;
  std::unordered_map<std::string_view, double> b_obj;
  for (std::size_t v = 0; v < b.vars.size(); ++v) {
    b_vars.emplace(b.vars[v].name, &b.vars[v]);
    if (b.objective[v] != 0.0) b_obj.emplace(b.vars[v].name, b.objective[v]);
  }
  if (b_vars.size() != b.vars.size()) return false;  // duplicate names
  for (std::size_t v = 0; v < a.vars.size(); ++v) {
    const MilpVariable& var = a.vars[v];
    auto it = b_vars.find(var.name);
    if (it == b_vars.end()) return false;
    const MilpVariable& other = *it->second;
    if (var.binary != other.binary || var.lb != other.lb || var.ub != other.ub) return false;
    const double coeff = a.objective[v];
    auto obj_it = b_obj.find(var.name);
    const double other_coeff = obj_it == b_obj.end() ? 0.0 : obj_it->second;
    if (coeff != other_coeff) return false;
  }

  std::vector<std::string> rows_a;
  std::vector<std::string> rows_b;
  rows_a.reserve(a.cons.size());
  rows_b.reserve(b.cons.size());
  for (const MilpConstraint& row : a.cons) rows_a.push_back(normalized_row(a, row));
  for (const MilpConstraint& row : b.cons) rows_b.push_back(normalized_row(b, row));
  std::sort(rows_a.begin(), rows_a.end());
  std::sort(rows_b.begin(), rows_b.end());
  return rows_a == rows_b;
}

namespace {

constexpr std::string_view kObjectiveRow = "COST";

std::string mps_number(double value) {
  char buffer[32];
  const int written = std::snprintf(buffer, sizeof buffer, "%.10g", value);
  if (written <= 0 || written > 12) {
    throw std::invalid_argument("value does not fit a fixed-form MPS field: " +
                                format_double(value));
  }
  return std::string(buffer, static_cast<std::size_t>(written));
}

void put_field(std::string& line, std::size_t column, std::string_view text) {
  if (line.size() < column) line.resize(column, ' ');
  line.append(text);
}

/// Fixed-form field starts (0-based): 1, 4, 14, 24, 39, 49.
std::string mps_line(std::string_view f1, std::string_view f2, std::string_view f3 = {},
                     std::string_view f4 = {}, std::string_view f5 = {},
                     std::string_view f6 = {}) {
  std::string line;
  put_field(line, 1, f1);
  put_field(line, 4, f2);
  if (!f3.empty()) put_field(line, 14, f3);
  if (!f4.empty()) put_field(line, 24, f4);
  if (!f5.empty()) put_field(line, 39, f5);
  if (!f6.empty()) put_field(line, 49, f6);
  return line;
}

}  // namespace

void export_mps(const MilpModel& model, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");

  for (const MilpVariable& var : model.vars) {
    if (var.name.size() > 8) {
      throw std::invalid_argument("MPS names are limited to 8 characters: " + var.name);
    }
  }

  // Row names are regenerated as c0, c1, ... so they stay within the 8-char
  // budget no matter how verbose the model's own row names are.
  std::vector<std::string> row_names;
  row_names.reserve(model.cons.size());
  for (std::size_t c = 0; c < model.cons.size(); ++c) row_names.push_back("c" + std::to_string(c));
  if (!row_names.empty() && row_names.back().size() > 8) {
    throw std::invalid_argument("too many rows for fixed-form MPS row names");
  }

  out << "NAME" << std::string(10, ' ') << model.name << "\n";
  out << "ROWS\n";
  out << mps_line("N", kObjectiveRow) << "\n";
  for (std::size_t c = 0; c < model.cons.size(); ++c) {
    const char sense = model.cons[c].sense;
    const std::string_view type = sense == 'L' ? "L" : sense == 'G' ? "G" : "E";
    out << mps_line(type, row_names[c]) << "\n";
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> columns(model.vars.size());
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    if (model.objective[v] != 0.0) {
      columns[v].emplace_back(model.cons.size(), model.objective[v]);  // sentinel = COST
    }
  }
  for (std::size_t c = 0; c < model.cons.size(); ++c) {
    for (const MilpTerm& term : model.cons[c].terms) {
      columns[static_cast<std::size_t>(term.var)].emplace_back(c, term.coeff);
    }
  }

  out << "COLUMNS\n";
  bool in_integer_block = false;
  int marker = 0;
  auto row_name = [&](std::size_t c) -> std::string_view {
    return c == model.cons.size() ? kObjectiveRow : std::string_view(row_names[c]);
  };
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const MilpVariable& var = model.vars[v];
    if (var.binary != in_integer_block) {
      const std::string name = "MARK" + std::to_string(marker++);
      out << mps_line("", name, "'MARKER'", "", var.binary ? "'INTORG'" : "'INTEND'") << "\n";
      in_integer_block = var.binary;
    }
    const auto& entries = columns[v];
    for (std::size_t e = 0; e < entries.size(); e += 2) {
      if (e + 1 < entries.size()) {
        out << mps_line("", var.name, row_name(entries[e].first), mps_number(entries[e].second),
                        row_name(entries[e + 1].first), mps_number(entries[e + 1].second))
            << "\n";
      } else {
        out << mps_line("", var.name, row_name(entries[e].first), mps_number(entries[e].second))
            << "\n";
      }
    }
  }
  if (in_integer_block) {
    const std::string name = "MARK" + std::to_string(marker++);
    out << mps_line("", name, "'MARKER'", "", "'INTEND'") << "\n";
  }

  out << "RHS\n";
  {
    std::vector<std::pair<std::size_t, double>> entries;
    for (std::size_t c = 0; c < model.cons.size(); ++c) {
      if (model.cons[c].rhs != 0.0) entries.emplace_back(c, model.cons[c].rhs);
    }
    for (std::size_t e = 0; e < entries.size(); e += 2) {
      if (e + 1 < entries.size()) {
        out << mps_line("", "RHS", row_names[entries[e].first], mps_number(entries[e].second),
                        row_names[entries[e + 1].first], mps_number(entries[e + 1].second))
            << "\n";
      } else {
        out << mps_line("", "RHS", row_names[entries[e].first], mps_number(entries[e].second))
            << "\n";
      }
    }
  }

  out << "BOUNDS\n";
  const double inf = std::numeric_limits<double>::infinity();
  for (const MilpVariable& var : model.vars) {
    if (var.binary) {
      out << mps_line("BV", "BND", var.name) << "\n";
      continue;
    }
    if (var.lb == -inf && var.ub == inf) {
      out << mps_line("FR", "BND", var.name) << "\n";
      continue;
    }
    if (var.lb != 0.0) out << mps_line("LO", "BND", var.name, mps_number(var.lb)) << "\n";
    if (var.ub != inf) out << mps_line("UP", "BND", var.name, mps_number(var.ub)) << "\n";
  }
  out << "ENDATA\n";
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

namespace {

/// Reads the rows of a model once and can then fix every derived variable at
/// its tight value for any seed assignment. Classification keys off the
/// variable kinds appearing in each row, so it exercises the rows the builder
/// actually emitted instead of re-deriving them from the election.
class ModelEvaluator {
 public:
  explicit ModelEvaluator(const MilpModel& model) : model_(&model) {
    const std::size_t vars = model.vars.size();
    if (model.objective.size() != vars) {
      throw std::invalid_argument("objective is not aligned with the variables");
    }
    x_rows_.resize(vars);
    g_rows_.resize(vars);
    m_rows_.resize(vars);
    m_selector_rows_.resize(vars);
    u_rows_.resize(vars);

    for (const MilpConstraint& row : model.cons) {
      bool seed = false, reach = false, gain = false, margin = false, win = false,
           selector = false;
      for (const MilpTerm& term : row.terms) {
        switch (model.vars[static_cast<std::size_t>(term.var)].kind) {
          case VarKind::seed: seed = true; break;
          case VarKind::reach: reach = true; break;
          case VarKind::gain: gain = true; break;
          case VarKind::margin: margin = true; break;
          case VarKind::win: win = true; break;
          case VarKind::selector: selector = true; break;
        }
      }
      if (win) {
        attach(u_rows_, row, VarKind::win);
      } else if (margin && selector) {
        attach(m_selector_rows_, row, VarKind::margin);
      } else if (margin && gain) {
        attach(m_rows_, row, VarKind::margin);
      } else if (gain) {
        attach(g_rows_, row, VarKind::gain);
      } else if (reach) {
        attach(x_rows_, row, VarKind::reach);
      } else if (seed && !reach && !gain && !margin && !selector) {
        if (budget_ != nullptr) throw std::invalid_argument("multiple budget rows");
        budget_ = &row;
      } else if (selector && row.sense == 'G') {
        // Selector cover rows need no derivation; feasibility checks them.
      } else {
        throw std::invalid_argument("unsupported constraint shape: " + row.name);
      }
    }
    if (budget_ == nullptr) throw std::invalid_argument("model has no budget row");
    for (const MilpTerm& term : budget_->terms) {
      if (term.coeff != 1.0) throw std::invalid_argument("budget row must have unit coefficients");
    }
    budget_k_ = static_cast<std::size_t>(std::llround(budget_->rhs));

    for (std::size_t v = 0; v < vars; ++v) {
      switch (model.vars[v].kind) {
        case VarKind::seed: seed_vars_.push_back(static_cast<std::int32_t>(v)); break;
        case VarKind::reach: reach_vars_.push_back(static_cast<std::int32_t>(v)); break;
        case VarKind::gain: gain_vars_.push_back(static_cast<std::int32_t>(v)); break;
        case VarKind::margin: margin_vars_.push_back(static_cast<std::int32_t>(v)); break;
        case VarKind::win: win_vars_.push_back(static_cast<std::int32_t>(v)); break;
        case VarKind::selector: break;
      }
    }
    std::sort(seed_vars_.begin(), seed_vars_.end(), [&](std::int32_t a, std::int32_t b) {
      return model.vars[static_cast<std::size_t>(a)].index <
             model.vars[static_cast<std::size_t>(b)].index;
    });
    std::sort(margin_vars_.begin(), margin_vars_.end(), [&](std::int32_t a, std::int32_t b) {
      return model.vars[static_cast<std::size_t>(a)].scenario <
             model.vars[static_cast<std::size_t>(b)].scenario;
    });
    for (std::int32_t v : margin_vars_) {
      const std::size_t idx = static_cast<std::size_t>(v);
      if (m_rows_[idx].empty() && m_selector_rows_[idx].empty()) {
        throw std::invalid_argument("margin variable without a bounding row: " +
                                    model.vars[idx].name);
      }
    }
  }

  const std::vector<std::int32_t>& seed_vars() const { return seed_vars_; }
  std::size_t budget() const { return budget_k_; }
  bool counts_wins() const { return !win_vars_.empty(); }
  std::size_t scenario_count() const { return margin_vars_.size(); }

  /// Tight assignment for the given seed variable ids (values already set to
  /// 0/1 by the caller in `values`; everything else is overwritten).
  void derive(std::vector<double>& values) const {
    for (std::int32_t x : reach_vars_) {
      values[static_cast<std::size_t>(x)] = tight_upper(x, x_rows_, values);
    }
    for (std::int32_t g : gain_vars_) {
      values[static_cast<std::size_t>(g)] = tight_upper(g, g_rows_, values);
    }
    for (std::int32_t m : margin_vars_) {
      const std::size_t idx = static_cast<std::size_t>(m);
      if (!m_selector_rows_[idx].empty()) {
        values[idx] = select_max(m, values);
      } else {
        values[idx] = tight_upper(m, m_rows_, values);
      }
    }
    for (std::int32_t u : win_vars_) {
      const std::size_t idx = static_cast<std::size_t>(u);
      values[idx] = 1.0;
      bool ok = true;
      for (const MilpConstraint* row : u_rows_[idx]) ok &= row_holds(*row, values);
      values[idx] = ok ? 1.0 : 0.0;
    }
  }

  /// Exact integer objective total over the batch: sum of the margin values
  /// (mov) or of the win indicators (pov).
  std::int64_t total(const std::vector<double>& values) const {
    std::int64_t sum = 0;
    const std::vector<std::int32_t>& counted = counts_wins() ? win_vars_ : margin_vars_;
    for (std::int32_t v : counted) sum += integral(values[static_cast<std::size_t>(v)]);
    return sum;
  }

  std::vector<std::int64_t> margins(const std::vector<double>& values) const {
    std::vector<std::int64_t> out;
    out.reserve(margin_vars_.size());
    for (std::int32_t m : margin_vars_) out.push_back(integral(values[static_cast<std::size_t>(m)]));
    return out;
  }

  void check_feasible(const std::vector<double>& values) const {
    for (std::size_t v = 0; v < model_->vars.size(); ++v) {
      const MilpVariable& var = model_->vars[v];
      if (values[v] < var.lb - kTol || values[v] > var.ub + kTol) {
        throw std::logic_error("derived value violates the bounds of " + var.name);
      }
    }
    for (const MilpConstraint& row : model_->cons) {
      if (!row_holds(row, values)) {
        throw std::logic_error("derived assignment violates row " + row.name);
      }
    }
  }

 private:
  static constexpr double kTol = 1e-6;
  using RowLists = std::vector<std::vector<const MilpConstraint*>>;

  void attach(RowLists& lists, const MilpConstraint& row, VarKind kind) {
    const std::int32_t target = find_target(row, kind);
    lists[static_cast<std::size_t>(target)].push_back(&row);
  }

  std::int32_t find_target(const MilpConstraint& row, VarKind kind) const {
    std::int32_t target = -1;
    for (const MilpTerm& term : row.terms) {
      if (model_->vars[static_cast<std::size_t>(term.var)].kind != kind) continue;
      if (target != -1) throw std::invalid_argument("two derived variables in row " + row.name);
      if (term.coeff <= 0.0 || row.sense != 'L') {
        throw std::invalid_argument("row " + row.name + " does not upper-bound its variable");
      }
      target = term.var;
    }
    return target;
  }

  /// Largest value of `target` permitted by its 'L' rows and its upper bound.
  double tight_upper(std::int32_t target, const RowLists& lists,
                     const std::vector<double>& values) const {
    const MilpVariable& var = model_->vars[static_cast<std::size_t>(target)];
    double best = var.ub;
    for (const MilpConstraint* row : lists[static_cast<std::size_t>(target)]) {
      double slack = row->rhs;
      double coeff = 1.0;
      for (const MilpTerm& term : row->terms) {
        if (term.var == target) {
          coeff = term.coeff;
        } else {
          slack -= term.coeff * values[static_cast<std::size_t>(term.var)];
        }
      }
      best = std::min(best, slack / coeff);
    }
    return best;
  }

  /// Destructive margin: each selector row yields a candidate bound when its
  /// selector is switched on; take the best row, switch exactly that selector.
  double select_max(std::int32_t target, std::vector<double>& values) const {
    double best = -std::numeric_limits<double>::infinity();
    std::int32_t best_z = -1;
    for (const MilpConstraint* row : m_selector_rows_[static_cast<std::size_t>(target)]) {
      double slack = row->rhs;
      double coeff = 1.0;
      std::int32_t z = -1;
      for (const MilpTerm& term : row->terms) {
        const std::size_t idx = static_cast<std::size_t>(term.var);
        if (term.var == target) {
          coeff = term.coeff;
        } else if (model_->vars[idx].kind == VarKind::selector) {
          z = term.var;
          values[idx] = 0.0;
          slack -= term.coeff;  // candidate bound assumes this selector is on
        } else {
          slack -= term.coeff * values[idx];
        }
      }
      if (z == -1) throw std::invalid_argument("selector row without a selector: " + row->name);
      const double bound = slack / coeff;
      if (bound > best) {
        best = bound;
        best_z = z;
      }
    }
    values[static_cast<std::size_t>(best_z)] = 1.0;
    return std::min(best, model_->vars[static_cast<std::size_t>(target)].ub);
  }

  bool row_holds(const MilpConstraint& row, const std::vector<double>& values) const {
    double lhs = 0.0;
    for (const MilpTerm& term : row.terms) {
      lhs += term.coeff * values[static_cast<std::size_t>(term.var)];
    }
    switch (row.sense) {
      case 'L': return lhs <= row.rhs + kTol;
      case 'G': return lhs >= row.rhs - kTol;
      default: return std::abs(lhs - row.rhs) <= kTol;
    }
  }

  static std::int64_t integral(double value) {
    const std::int64_t rounded = std::llround(value);
    if (std::abs(value - static_cast<double>(rounded)) > kTol) {
      throw std::logic_error("derived value is not integral: " + format_double(value));
    }
    return rounded;
  }

  const MilpModel* model_;
  RowLists x_rows_;
  RowLists g_rows_;
  RowLists m_rows_;
  RowLists m_selector_rows_;
  RowLists u_rows_;
  const MilpConstraint* budget_ = nullptr;
  std::size_t budget_k_ = 0;
  std::vector<std::int32_t> seed_vars_;
  std::vector<std::int32_t> reach_vars_;
  std::vector<std::int32_t> gain_vars_;
  std::vector<std::int32_t> margin_vars_;
  std::vector<std::int32_t> win_vars_;
};

}  // namespace

OracleResult solve_enumerative(const MilpModel& model, const OracleOptions& options) {
  const ModelEvaluator evaluator(model);
  const std::vector<std::int32_t>& seeds = evaluator.seed_vars();
  const std::size_t k = std::min(evaluator.budget(), seeds.size());
  const std::uint64_t required = subset_count(static_cast<NodeId>(seeds.size()), k);
  if (required > options.enumeration_cap) {
    throw std::invalid_argument("enumeration needs " + std::to_string(required) +
                                " subsets, above the configured cap of " +
                                std::to_string(options.enumeration_cap));
  }
  const std::size_t scenarios = evaluator.scenario_count();
  if (scenarios == 0) throw std::invalid_argument("model has no margin variables");

  std::vector<double> values(model.vars.size(), 0.0);
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> best_positions;
  std::int64_t best_total = std::numeric_limits<std::int64_t>::min();
  std::uint64_t enumerated = 0;

  auto evaluate_current = [&]() {
    std::fill(values.begin(), values.end(), 0.0);
    for (std::size_t pos : chosen) values[static_cast<std::size_t>(seeds[pos])] = 1.0;
    evaluator.derive(values);
    evaluator.check_feasible(values);
    const std::int64_t total = evaluator.total(values);
    double dot = 0.0;
    for (std::size_t v = 0; v < values.size(); ++v) dot += model.objective[v] * values[v];
    const double mean = static_cast<double>(total) / static_cast<double>(scenarios);
    if (std::abs(dot - mean) > 1e-9 * std::max(1.0, std::abs(mean))) {
      throw std::logic_error("objective row disagrees with the derived scenario totals");
    }
    ++enumerated;
    if (total > best_total) {
      best_total = total;
      best_positions = chosen;
    }
  };

  // Same visit order as brute_force: every prefix before its extensions, so
  // the first of several maxima is the lexicographically smallest seed set.
  auto descend = [&](auto&& self, std::size_t next) -> void {
    evaluate_current();
    if (chosen.size() == k) return;
    for (std::size_t pos = next; pos < seeds.size(); ++pos) {
      chosen.push_back(pos);
      self(self, pos + 1);
      chosen.pop_back();
    }
  };
  descend(descend, 0);

  OracleResult result;
  for (std::size_t pos : best_positions) {
    result.best_set.push_back(
        static_cast<NodeId>(model.vars[static_cast<std::size_t>(seeds[pos])].index));
  }
  result.best_total = best_total;
  result.best_value = static_cast<double>(best_total) / static_cast<double>(scenarios);
  result.enumerated = enumerated;
  return result;
}

std::vector<std::int64_t> model_margins(const MilpModel& model, std::span<const NodeId> seeds) {
  const ModelEvaluator evaluator(model);
  std::unordered_map<std::int32_t, std::size_t> by_node;
  for (std::int32_t v : evaluator.seed_vars()) {
    by_node.emplace(model.vars[static_cast<std::size_t>(v)].index, static_cast<std::size_t>(v));
  }
  std::vector<double> values(model.vars.size(), 0.0);
  for (NodeId node : seeds) {
    auto it = by_node.find(static_cast<std::int32_t>(node));
    if (it == by_node.end()) {
      throw std::invalid_argument("no seed variable for node " + std::to_string(node));
    }
    if (values[it->second] == 1.0) {
      throw std::invalid_argument("duplicate seed node " + std::to_string(node));
    }
    values[it->second] = 1.0;
  }
  evaluator.derive(values);
  evaluator.check_feasible(values);
  return evaluator.margins(values);
}

}  // namespace elex
