#pragma once

// External MILP backend. The model is written as free MPS, a user command
// solves it, and the solution file is read back and validated.
//
// Command template placeholders: {mps} (input path), {sol} (output path),
// {time} (time limit in seconds).
//
// Solution file contract, one entry per line:
//   <column name> <value>       missing columns are 0
//   =obj= <value>               optional
//   =status= <word>             optional: optimal | feasible | infeasible | timeout
//   =gap= <value>               optional, relative gap of a feasible stop

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

#include "iabplan/errors.hpp"
#include "iabplan/model.hpp"
#include "iabplan/mps.hpp"
#include "iabplan/scenario.hpp"
#include "iabplan/solve.hpp"
#include "iabplan/validate.hpp"

namespace iab {

class ExternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The command could not be run or exited nonzero.
class ExternalCommandError : public ExternalError {
 public:
  ExternalCommandError(const std::string& what, int code) : ExternalError(what), exit_code(code) {}
  int exit_code;
};

/// The solution file is missing or malformed.
class ExternalOutputError : public ExternalError {
 public:
  using ExternalError::ExternalError;
};

/// The returned assignment fails validate_solution.
class ExternalValidationError : public ExternalError {
 public:
  ExternalValidationError(const std::string& what, ValidationReport rep)
      : ExternalError(what), report(std::move(rep)) {}
  ValidationReport report;
};

struct ExternalResult {
  std::unordered_map<std::string, double> values;
  std::optional<double> objective;
  SolveStatus status = SolveStatus::Optimal;
  double gap = 0.0;
};

inline ExternalResult parse_solution_file(std::istream& in) {
  ExternalResult r;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string name, value, extra;
    if (!(ss >> name)) continue;
    if (name[0] == '#') continue;
    if (!(ss >> value) || (ss >> extra))
      throw ExternalOutputError("solution line " + std::to_string(lineno) + ": expected 'name value'");
    if (name == "=status=") {
      if (value == "optimal") r.status = SolveStatus::Optimal;
      else if (value == "feasible") r.status = SolveStatus::FeasibleGap;
      else if (value == "infeasible") r.status = SolveStatus::Infeasible;
      else if (value == "timeout") r.status = SolveStatus::Timeout;
      else throw ExternalOutputError("solution line " + std::to_string(lineno) + ": unknown status '" + value + "'");
      continue;
    }
    double v = 0.0;
    try {
      std::size_t pos = 0;
      v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw ExternalOutputError("solution line " + std::to_string(lineno) + ": bad value '" + value + "'");
    }
    if (name == "=obj=") r.objective = v;
    else if (name == "=gap=") r.gap = v;
    else r.values[name] = v;
  }
  return r;
}

namespace detail {

inline std::string substitute(std::string s, const std::string& key, const std::string& value) {
  for (std::size_t pos = 0; (pos = s.find(key, pos)) != std::string::npos; pos += value.size())
    s.replace(pos, key.size(), value);
  return s;
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

}  // namespace detail

/// Runs an MPS-consuming solver on the model. The result is validated
/// against `graph` before it is returned.
inline Solution run_external(const ScenarioGraph& graph, const MilpModel& model, const std::string& command_template,
                             const SolveLimits& limits = {}) {
  limits.validate();
  if (command_template.find("{mps}") == std::string::npos || command_template.find("{sol}") == std::string::npos)
    throw ParameterError("solver command must contain {mps} and {sol}");
  namespace fs = std::filesystem;
  std::mt19937_64 gen(std::random_device{}());
  const fs::path dir = fs::temp_directory_path() / ("iabplan-" + std::to_string(gen() % 1000000000ULL));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{dir};
  const auto mps = (dir / "model.mps").string();
  const auto sol = (dir / "model.sol").string();
  export_mps(model, mps);

  std::string cmd = detail::substitute(command_template, "{mps}", detail::shell_quote(mps));
  cmd = detail::substitute(cmd, "{sol}", detail::shell_quote(sol));
  cmd = detail::substitute(cmd, "{time}", detail::mps_num(limits.time_limit_s));
  const auto start = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (rc != 0) throw ExternalCommandError("solver command failed (status " + std::to_string(rc) + "): " + cmd, rc);

  std::ifstream in(sol);
  if (!in) throw ExternalOutputError("solver wrote no solution file");
  const auto res = parse_solution_file(in);

  Solution s;
  s.active_edges.resize(model.params.redundancy);
  s.status = res.status;
  s.solve_time_s = elapsed;
  if (res.status == SolveStatus::Infeasible || (res.status == SolveStatus::Timeout && res.values.empty())) {
    s.gap = HUGE_VAL;
    return s;
  }
  const auto names = mps_names(model);
  std::unordered_map<std::string, int> col;
  for (std::size_t j = 0; j < names.cols.size(); ++j) col[names.cols[j]] = static_cast<int>(j);
  std::vector<double> x(model.variables.size(), 0.0);
  for (const auto& [name, v] : res.values) {
    auto it = col.find(name);
    if (it == col.end()) throw ExternalOutputError("solution names unknown column '" + name + "'");
    x[it->second] = v;
  }
  for (std::size_t j = 0; j < x.size(); ++j)
    if (model.variables[j].integer) x[j] = std::round(x[j]);
  s = solution_from_assignment(model, x);
  s.status = res.status == SolveStatus::Timeout ? SolveStatus::FeasibleGap : res.status;
  s.gap = s.status == SolveStatus::Optimal ? 0.0 : res.gap;
  s.lower_bound = s.objective * (1.0 - s.gap);
  s.solve_time_s = elapsed;
  if (res.objective && std::fabs(*res.objective - s.objective) > 1e-6 * std::max(1.0, s.objective))
    throw ExternalOutputError("reported objective " + std::to_string(*res.objective) +
                              " does not match the assignment (" + std::to_string(s.objective) + ")");
  auto report = validate_solution(graph, model.params, s);
  if (!report.ok()) throw ExternalValidationError("external solution failed validation:\n" + report.summary(), report);
  return s;
}

}  // namespace iab
