#pragma once

// LP-based branch-and-bound over binary columns.
//
// Branching: most fractional binary, ties to the lowest column index.
// Node order: depth-first until the first improving incumbent, best-bound
// afterwards (ties: deeper first, then creation order). Every node LP is
// re-solved from the previous node's basis by the dual simplex.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "iabplan/lp_simplex.hpp"

namespace iab::bnb {

enum class Status { Optimal, FeasibleGap, Infeasible, Timeout };

struct Options {
  double time_limit_s = 600.0;
  long node_limit = std::numeric_limits<long>::max();
  double gap_target = 0.0;
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-6;
  std::optional<std::vector<double>> initial_incumbent;
  // Branching priority per column (higher first); empty means all equal.
  std::vector<int> priority;
};

struct Result {
  Status status = Status::Timeout;
  std::vector<double> x;
  double objective = HUGE_VAL;
  double lower_bound = -HUGE_VAL;
  double gap = HUGE_VAL;
  long nodes = 0;
  long lp_iterations = 0;
};

struct BoundChange {
  int col;
  double lower;
  double upper;
};

/// Maximum absolute violation of `x` against rows and column bounds.
inline double max_violation(const lp::Problem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < p.num_cols; ++j) {
    worst = std::max(worst, p.lower[j] - x[j]);
    worst = std::max(worst, x[j] - p.upper[j]);
  }
  for (const auto& row : p.rows) {
    double act = 0.0;
    for (const auto& [c, v] : row.terms) act += v * x[c];
    switch (row.sense) {
      case lp::RowSense::LessEqual: worst = std::max(worst, act - row.rhs); break;
      case lp::RowSense::GreaterEqual: worst = std::max(worst, row.rhs - act); break;
      case lp::RowSense::Equal: worst = std::max(worst, std::abs(act - row.rhs)); break;
    }
  }
  return worst;
}

class Solver {
 public:
  Solver(const lp::Problem& problem, std::vector<bool> integer)
      : prob_(problem), integer_(std::move(integer)), lp_(problem) {
    integral_objective_ = true;
    for (int j = 0; j < prob_.num_cols; ++j) {
      const double c = prob_.cost[j];
      if (c == 0.0) continue;
      if (!integer_[j] || c != std::round(c)) integral_objective_ = false;
    }
  }

  Result run(const Options& opt) {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double>(opt.time_limit_s));
    Result res;
    if (opt.initial_incumbent && max_violation(prob_, *opt.initial_incumbent) <= opt.feasibility_tol)
      accept(res, *opt.initial_incumbent);

    struct Node {
      std::vector<BoundChange> changes;
      double bound;
      int depth;
      long id;
    };
    auto worse = [](const Node& a, const Node& b) {
      if (a.bound != b.bound) return a.bound > b.bound;
      if (a.depth != b.depth) return a.depth < b.depth;
      return a.id > b.id;
    };
    std::vector<Node> stack;
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> heap(worse);
    bool diving = true;
    long next_id = 0;
    stack.push_back({{}, -HUGE_VAL, 0, next_id++});
    std::vector<BoundChange> applied;
    bool stopped = false;

    auto open_min_bound = [&]() {
      double lb = HUGE_VAL;
      for (const auto& n : stack) lb = std::min(lb, n.bound);
      if (!heap.empty()) lb = std::min(lb, heap.top().bound);
      return lb;
    };

    while (!stack.empty() || !heap.empty()) {
      if (res.nodes >= opt.node_limit || clock::now() > deadline) {
        stopped = true;
        break;
      }
      if (res.objective < HUGE_VAL && gap_of(res.objective, open_min_bound()) <= opt.gap_target) break;

      Node node;
      if (diving) {
        node = std::move(stack.back());
        stack.pop_back();
      } else {
        node = heap.top();
        heap.pop();
      }
      if (pruned(node.bound, res.objective)) continue;

      apply(applied, node.changes);
      ++res.nodes;
      lp::SolveLimits lim;
      lim.deadline = deadline;
      lim.cutoff = cutoff(res.objective);
      const auto st = lp_.solve(lim);
      res.lp_iterations = lp_.iterations();
      if (st == lp::Status::TimeLimit || st == lp::Status::IterationLimit) {
        // Node left unexplored; keep it for the bound.
        if (diving) stack.push_back(std::move(node));
        else heap.push(std::move(node));
        stopped = true;
        break;
      }
      if (st == lp::Status::Infeasible || st == lp::Status::Cutoff) continue;
      if (st == lp::Status::Unbounded) continue;

      const double bound = lp_.bound();
      if (pruned(bound, res.objective)) continue;
      const auto x = lp_.primal();

      int branch = -1;
      double best_frac = -1.0;
      int best_prio = std::numeric_limits<int>::min();
      for (int j = 0; j < prob_.num_cols; ++j) {
        if (!integer_[j]) continue;
        const double frac = std::abs(x[j] - std::round(x[j]));
        if (frac <= opt.integrality_tol) continue;
        const int prio = opt.priority.empty() ? 0 : opt.priority[j];
        const double score = 0.5 - std::abs(x[j] - std::floor(x[j]) - 0.5);
        if (prio > best_prio || (prio == best_prio && score > best_frac + 1e-12)) {
          best_prio = prio;
          best_frac = score;
          branch = j;
        }
      }

      if (branch < 0) {
        if (auto sol = integral_candidate(x, node.changes, opt, deadline)) {
          const double obj = objective_of(*sol);
          if (obj < res.objective - 1e-9) {
            accept(res, *sol);
            if (diving) {
              diving = false;
              for (auto& n : stack) heap.push(std::move(n));
              stack.clear();
            }
          }
        }
        continue;
      }

      const double v = x[branch];
      Node down{node.changes, bound, node.depth + 1, 0};
      down.changes.push_back({branch, prob_.lower[branch], std::floor(v)});
      Node up{node.changes, bound, node.depth + 1, 0};
      up.changes.push_back({branch, std::ceil(v), prob_.upper[branch]});
      const bool up_first = v - std::floor(v) >= 0.5;
      // Creation order doubles as the dive order: the preferred child gets the larger id.
      if (up_first) {
        down.id = next_id++;
        up.id = next_id++;
      } else {
        up.id = next_id++;
        down.id = next_id++;
      }
      if (diving) {
        stack.push_back(up_first ? std::move(down) : std::move(up));
        stack.push_back(up_first ? std::move(up) : std::move(down));
      } else {
        heap.push(std::move(down));
        heap.push(std::move(up));
      }
    }

    const double open = open_min_bound();
    if (res.objective == HUGE_VAL) {
      res.status = stopped ? Status::Timeout : Status::Infeasible;
      res.lower_bound = open == HUGE_VAL ? -HUGE_VAL : round_bound(open);
      return res;
    }
    res.lower_bound = open == HUGE_VAL ? res.objective : std::min(res.objective, round_bound(open));
    res.gap = gap_of(res.objective, res.lower_bound);
    res.status = res.gap <= 0.0 ? Status::Optimal : Status::FeasibleGap;
    if (res.status == Status::Optimal) res.lower_bound = res.objective;
    return res;
  }

 private:
  const lp::Problem& prob_;
  std::vector<bool> integer_;
  lp::DualSimplex lp_;
  bool integral_objective_ = false;

  double round_bound(double b) const {
    return integral_objective_ ? std::ceil(b - 1e-6) : b;
  }

  double gap_of(double incumbent, double lower) const {
    lower = round_bound(lower);
    if (lower >= incumbent) return 0.0;
    if (incumbent <= 0.0) return 0.0;
    return (incumbent - lower) / incumbent;
  }

  double cutoff(double incumbent) const {
    if (incumbent == HUGE_VAL) return HUGE_VAL;
    return integral_objective_ ? incumbent - 1.0 + 1e-6 : incumbent - 1e-9;
  }

  bool pruned(double bound, double incumbent) const {
    return incumbent < HUGE_VAL && bound > cutoff(incumbent);
  }

  double objective_of(const std::vector<double>& x) const {
    double s = 0.0;
    for (int j = 0; j < prob_.num_cols; ++j) s += prob_.cost[j] * x[j];
    return s;
  }

  void accept(Result& res, const std::vector<double>& x) {
    res.x = x;
    res.objective = objective_of(x);
  }

  void apply(std::vector<BoundChange>& applied, const std::vector<BoundChange>& target) {
    for (const auto& c : applied) lp_.set_bounds(c.col, prob_.lower[c.col], prob_.upper[c.col]);
    for (const auto& c : target) {
      lp_.set_bounds(c.col, std::max(lp_.lower(c.col), c.lower), std::min(lp_.upper(c.col), c.upper));
    }
    applied = target;
  }

  // Rounds the integer columns and checks the point against the original
  // rows. If round-off spoils it, re-solves with the integers fixed.
  std::optional<std::vector<double>> integral_candidate(std::vector<double> x,
                                                        const std::vector<BoundChange>& changes,
                                                        const Options& opt,
                                                        std::chrono::steady_clock::time_point deadline) {
    for (int j = 0; j < prob_.num_cols; ++j) {
      if (integer_[j]) x[j] = std::round(x[j]);
      x[j] = std::clamp(x[j], prob_.lower[j], prob_.upper[j]);
    }
    if (max_violation(prob_, x) <= opt.feasibility_tol) return x;

    std::vector<BoundChange> fixed = changes;
    for (int j = 0; j < prob_.num_cols; ++j)
      if (integer_[j]) fixed.push_back({j, x[j], x[j]});
    std::vector<BoundChange> applied = changes;
    apply(applied, fixed);
    lp_.refactor();
    lp::SolveLimits lim;
    lim.deadline = deadline;
    const auto st = lp_.solve(lim);
    std::optional<std::vector<double>> out;
    if (st == lp::Status::Optimal) {
      auto y = lp_.primal();
      for (int j = 0; j < prob_.num_cols; ++j) {
        if (integer_[j]) y[j] = x[j];
        y[j] = std::clamp(y[j], prob_.lower[j], prob_.upper[j]);
      }
      if (max_violation(prob_, y) <= opt.feasibility_tol) out = std::move(y);
    }
    apply(applied, changes);
    return out;
  }
};

}  // namespace iab::bnb
