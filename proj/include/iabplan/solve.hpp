#pragma once

// Native MILP backend: MilpModel -> LP data -> branch-and-bound -> Solution.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "iabplan/branch_and_bound.hpp"
#include "iabplan/errors.hpp"
#include "iabplan/heuristic.hpp"
#include "iabplan/model.hpp"
#include "iabplan/solution.hpp"

namespace iab {

struct SolveLimits {
  double time_limit_s = 600.0;
  double gap_target = 0.0;
  int threads = 1;
  std::uint64_t seed = 1;
  long node_limit = -1;  // < 0: unlimited

  void validate() const {
    if (!(time_limit_s > 0.0)) throw ParameterError("time limit must be > 0");
    if (gap_target < 0.0) throw ParameterError("gap target must be >= 0");
    if (threads < 1) throw ParameterError("thread count must be >= 1");
  }
};

namespace detail {

// A donor's net outflow cannot exceed what its outgoing links carry, so the
// big-M C on u_i0 in its conservation row can drop to that amount. Same
// integer points, much stronger relaxation.
inline void tighten_donor_capacity(const MilpModel& model, lp::Row& row) {
  int node = -1;
  for (const auto& [var, coef] : row.terms)
    if (model.variables[var].ref.kind == VarKind::U) node = model.variables[var].ref.i;
  if (node < 0) return;
  double sum = 0.0, widest = 0.0;
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    if (model.edges[e].first != node) continue;
    sum += model.capacities[e];
    widest = std::max(widest, model.capacities[e]);
  }
  // With one radio per node the airtime shares sum to 1 over all links.
  const double out_cap = model.params.airtime_per_node ? widest : sum;
  for (auto& [var, coef] : row.terms)
    if (model.variables[var].ref.kind == VarKind::U && coef < 0.0) coef = -std::min(-coef, out_cap);
}

}  // namespace detail

/// LP form of the model. Single-variable rows become column bounds, and the
/// per-commodity link rows f_ijhk <= L P_ijk of one (i,j,k) are summed over h.
/// With P binary and the aggregate link row in place the integer points are
/// the same, the relaxation is tighter and the tableau far smaller.
inline lp::Problem to_lp(const MilpModel& model) {
  lp::Problem p;
  std::map<int, std::size_t> link_row;  // P column -> row index in p.rows
  p.num_cols = static_cast<int>(model.variables.size());
  p.cost.assign(p.num_cols, 0.0);
  for (const auto& t : model.objective) p.cost[t.var] += t.coef;
  for (const auto& v : model.variables) {
    p.lower.push_back(v.lower);
    p.upper.push_back(v.upper);
  }
  for (const auto& c : model.constraints) {
    if (c.terms.size() == 1 && c.terms[0].coef != 0.0) {
      const int j = c.terms[0].var;
      const double a = c.terms[0].coef;
      const double b = c.rhs / a;
      const bool upper_side = (c.sense == Sense::LessEqual) == (a > 0.0);
      if (c.sense == Sense::Equal) {
        p.lower[j] = std::max(p.lower[j], b);
        p.upper[j] = std::min(p.upper[j], b);
      } else if (upper_side) {
        p.upper[j] = std::min(p.upper[j], b);
      } else {
        p.lower[j] = std::max(p.lower[j], b);
      }
      continue;
    }
    if (c.family == "maxlinkflowb" && c.terms.size() == 2 && c.sense == Sense::LessEqual &&
        c.rhs == 0.0 && model.variables[c.terms[1].var].ref.kind == VarKind::P) {
      const auto [it, fresh] = link_row.try_emplace(c.terms[1].var, p.rows.size());
      if (fresh) {
        lp::Row row;
        row.terms.emplace_back(c.terms[1].var, c.terms[1].coef);
        p.rows.push_back(std::move(row));
      }
      auto& terms = p.rows[it->second].terms;
      if (terms.front().second != c.terms[1].coef)
        throw ConfigError("inconsistent link capacity in " + c.name);
      terms.emplace_back(c.terms[0].var, c.terms[0].coef);
      continue;
    }
    lp::Row row;
    for (const auto& t : c.terms) row.terms.emplace_back(t.var, t.coef);
    if (c.family == "flowconb") detail::tighten_donor_capacity(model, row);
    row.sense = c.sense == Sense::LessEqual  ? lp::RowSense::LessEqual
                : c.sense == Sense::Equal    ? lp::RowSense::Equal
                                             : lp::RowSense::GreaterEqual;
    row.rhs = c.rhs;
    p.rows.push_back(std::move(row));
  }
  // While some node j is not a donor, every edge-set needs a root:
  // sum_i u_i0k + sum_r u_j0r >= 1. Valid for all integer points.
  if (model.params.redundancy > 1) {
    for (int j : model.node_ids) {
      for (int k = 1; k <= model.params.redundancy; ++k) {
        lp::Row row;
        for (int i : model.node_ids)
          if (i != j) row.terms.emplace_back(model.u(i, 0, k), 1.0);
        for (int r = 1; r <= model.params.redundancy; ++r) row.terms.emplace_back(model.u(j, 0, r), 1.0);
        row.sense = lp::RowSense::GreaterEqual;
        row.rhs = 1.0;
        p.rows.push_back(std::move(row));
      }
    }
  }
  // A node at level l of edge-set k has an in-neighbor at level l-1 there.
  {
    std::map<int, std::vector<int>> in_nb;
    for (const auto& [i, j] : model.edges) in_nb[j].push_back(i);
    for (int j : model.node_ids)
      for (int k = 1; k <= model.params.redundancy; ++k)
        for (int l = 1; l <= model.params.max_depth; ++l) {
          lp::Row row;
          row.terms.emplace_back(model.u(j, l, k), 1.0);
          for (int i : in_nb[j]) row.terms.emplace_back(model.u(i, l - 1, k), -1.0);
          row.sense = lp::RowSense::LessEqual;
          row.rhs = 0.0;
          p.rows.push_back(std::move(row));
        }
  }
  for (int j = 0; j < p.num_cols; ++j) {
    if (model.variables[j].integer) {
      p.lower[j] = std::ceil(p.lower[j] - 1e-9);
      p.upper[j] = std::floor(p.upper[j] + 1e-9);
    }
  }
  return p;
}

/// Every node a donor rooted in edge-set 1; always satisfies the model.
inline std::vector<double> all_donors_assignment(const MilpModel& model) {
  std::vector<double> x(model.variables.size(), 0.0);
  for (int i : model.node_ids) x[model.u(i, 0, 1)] = 1.0;
  return x;
}

/// Reads a Solution out of a full variable assignment.
inline Solution solution_from_assignment(const MilpModel& model, const std::vector<double>& x) {
  Solution s;
  const int R = model.params.redundancy;
  s.active_edges.resize(R);
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    const auto& ref = model.variables[v].ref;
    const double val = x[v];
    switch (ref.kind) {
      case VarKind::U:
        if (val > 0.5) s.depths.push_back({ref.i, ref.level, ref.k});
        break;
      case VarKind::P:
        if (val > 0.5) s.active_edges[ref.k - 1].emplace_back(ref.i, ref.j);
        break;
      case VarKind::F:
        if (val > 1e-9) s.flows[{ref.i, ref.j, ref.h, ref.k}] = val;
        break;
      case VarKind::A:
        if (val > 1e-12) s.airtime[{ref.i, ref.j}] = val;
        break;
    }
  }
  for (const auto& d : s.depths)
    if (d.level == 0) s.donor_set.push_back(d.node);
  std::sort(s.donor_set.begin(), s.donor_set.end());
  s.donor_set.erase(std::unique(s.donor_set.begin(), s.donor_set.end()), s.donor_set.end());
  std::sort(s.depths.begin(), s.depths.end());
  double obj = 0.0;
  for (const auto& t : model.objective) obj += t.coef * std::round(x[t.var]);
  s.objective = obj;
  return s;
}

/// Branch-and-bound with LP bounds. Single-threaded and deterministic for
/// a fixed node limit; a time limit can cut the search at different points.
inline Solution solve_exact(const MilpModel& model, const SolveLimits& limits = {}) {
  limits.validate();
  const auto start = std::chrono::steady_clock::now();
  const lp::Problem prob = to_lp(model);
  for (int j = 0; j < prob.num_cols; ++j) {
    if (prob.lower[j] <= prob.upper[j] + 1e-9) continue;
    // Single-variable rows already contradict each other.
    Solution s;
    s.active_edges.resize(model.params.redundancy);
    s.status = SolveStatus::Infeasible;
    s.gap = HUGE_VAL;
    s.solve_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
  }
  std::vector<bool> integer;
  for (const auto& v : model.variables) integer.push_back(v.integer);

  bnb::Options opt;
  opt.time_limit_s = limits.time_limit_s;
  opt.gap_target = limits.gap_target;
  if (limits.node_limit >= 0) opt.node_limit = limits.node_limit;
  // Seed with the greedy plan when it checks out against the rows, else
  // with the trivial all-donors point.
  opt.initial_incumbent = all_donors_assignment(model);
  if (auto greedy = greedy_plan(model, limits.seed)) {
    if (bnb::max_violation(prob, *greedy) <= opt.feasibility_tol) opt.initial_incumbent = std::move(greedy);
  }
  // Donor indicators first: fixing them moves the bound most.
  for (const auto& v : model.variables)
    opt.priority.push_back(v.ref.kind == VarKind::U && v.ref.level == 0 ? 1 : 0);

  bnb::Solver solver(prob, std::move(integer));
  const auto res = solver.run(opt);

  Solution s;
  if (!res.x.empty()) s = solution_from_assignment(model, res.x);
  else s.active_edges.resize(model.params.redundancy);
  switch (res.status) {
    case bnb::Status::Optimal: s.status = SolveStatus::Optimal; break;
    case bnb::Status::FeasibleGap: s.status = SolveStatus::FeasibleGap; break;
    case bnb::Status::Infeasible: s.status = SolveStatus::Infeasible; break;
    case bnb::Status::Timeout: s.status = SolveStatus::Timeout; break;
  }
  s.gap = s.status == SolveStatus::Optimal ? 0.0 : (res.x.empty() ? HUGE_VAL : res.gap);
  s.lower_bound = res.lower_bound;
  s.nodes_explored = res.nodes;
  s.solve_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

inline double donor_ratio(const Solution& solution, std::size_t node_count) {
  if (node_count == 0) throw ParameterError("donor ratio of an empty graph");
  return solution.objective / static_cast<double>(node_count);
}

inline double donor_ratio(const Solution& solution, const ScenarioGraph& graph) {
  return donor_ratio(solution, graph.nodes.size());
}

}  // namespace iab
