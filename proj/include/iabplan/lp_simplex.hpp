#pragma once

// Dense bounded-variable dual simplex.
//
// Every row gets a slack, so the system is [A I] x = b with bounds on all
// columns. The tableau B^-1 [A I | b] is stored densely; pivots only touch
// the nonzero pattern of the pivot row and column. The slack basis is dual
// feasible whenever each structural column either has a finite bound on the
// side its cost points to, which covers every model this project builds, so
// no phase 1 is needed. Bound changes keep the basis dual feasible, which is
// what makes re-solving branch-and-bound nodes cheap.
//
// The problem is scaled internally (powers of two) and the costs of boxed
// columns carry a tiny fixed perturbation against dual degeneracy. Cost
// shifts forced by round-off are removed at the end by a primal cleanup.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "iabplan/errors.hpp"

namespace iab::lp {

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct Row {
  std::vector<std::pair<int, double>> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

struct Problem {
  int num_cols = 0;
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit, Cutoff };

struct SolveLimits {
  long max_iterations = std::numeric_limits<long>::max();
  std::optional<std::chrono::steady_clock::time_point> deadline;
  // Stop as soon as the (monotone) dual objective exceeds this value.
  double cutoff = HUGE_VAL;
};

class DualSimplex {
 public:
  static constexpr double kPrimalTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kBlandPivotTol = 1e-7;
  static constexpr double kPerturbation = 1e-6;
  static constexpr double kDropTol = 1e-13;
  static constexpr double kArtificialBound = 1e9;
  static constexpr int kStallLimit = 50;
  static constexpr long kRefactorEvery = 3000;

  explicit DualSimplex(const Problem& p) {
    n_ = p.num_cols;
    m_ = static_cast<int>(p.rows.size());
    N_ = n_ + m_;
    if (static_cast<int>(p.cost.size()) != n_ || static_cast<int>(p.lower.size()) != n_ ||
        static_cast<int>(p.upper.size()) != n_)
      throw ParameterError("LP column arrays have inconsistent sizes");
    prob_ = scaled(p, col_scale_);
    lo_.assign(N_, 0.0);
    up_.assign(N_, 0.0);
    cost_.assign(N_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = prob_.lower[j];
      up_[j] = prob_.upper[j];
      cost_[j] = prob_.cost[j];
      if (lo_[j] > up_[j]) throw ParameterError("LP column with lower > upper");
    }
    for (int r = 0; r < m_; ++r) {
      const int s = n_ + r;
      switch (p.rows[r].sense) {
        case RowSense::LessEqual: lo_[s] = 0.0; up_[s] = HUGE_VAL; break;
        case RowSense::GreaterEqual: lo_[s] = -HUGE_VAL; up_[s] = 0.0; break;
        case RowSense::Equal: lo_[s] = 0.0; up_[s] = 0.0; break;
      }
    }
    artificial_.assign(N_, false);
    reset_to_slack_basis();
    perturb_costs();
  }

  int num_cols() const { return n_; }
  int num_rows() const { return m_; }
  long iterations() const { return iterations_; }
  double lower(int j) const { return lo_[j] * col_scale_[j]; }
  double upper(int j) const { return artificial_[j] ? HUGE_VAL : up_[j] * col_scale_[j]; }

  /// Changes the bounds of a structural column. The current basis stays
  /// dual feasible; call solve() to reoptimize.
  void set_bounds(int j, double lo, double hi) {
    if (lo > hi + kPrimalTol) throw ParameterError("LP column with lower > upper");
    lo_[j] = lo / col_scale_[j];
    up_[j] = std::max(hi / col_scale_[j], lo_[j]);
    artificial_[j] = false;
    if (pos_[j] >= 0) return;
    const double old = x_[j];
    const double target = nonbasic_value(j);
    if (target != old) shift_nonbasic(j, target - old);
  }

  Status solve(const SolveLimits& limits = {}) {
    const double slack = perturbation_slack();
    int stall = 0;
    bool bland = false;
    double last_obj = -HUGE_VAL;
    for (long it = 0;; ++it) {
      if (it >= limits.max_iterations) return Status::IterationLimit;
      if (limits.deadline && (it & 31) == 0 && std::chrono::steady_clock::now() > *limits.deadline)
        return Status::TimeLimit;
      if (since_refactor_ >= kRefactorEvery) refactor();

      const double obj = objective_internal();
      // A shifted cost makes the dual objective a bound for another problem.
      if (!shifted_ && obj - slack > limits.cutoff) return Status::Cutoff;
      if (obj > last_obj + 1e-12 * (1.0 + std::abs(obj))) {
        last_obj = obj;
        stall = 0;
        bland = false;
      } else if (++stall > kStallLimit) {
        bland = true;  // anti-cycling until the objective moves again
      }

      const int r = choose_leaving(bland);
      if (r < 0) {
        if (!verify_and_repair()) {
          continue;
        }
        if (shifted_) {
          const Status st = primal_cleanup(limits, it);
          if (st != Status::Optimal) return st;
          if (!shifted_ && objective_internal() - slack > limits.cutoff) return Status::Cutoff;
          if (choose_leaving(false) >= 0) continue;
        }
        for (int j = 0; j < N_; ++j)
          if (artificial_[j] && pos_[j] < 0 && x_[j] >= kArtificialBound * 0.5) return Status::Unbounded;
        return Status::Optimal;
      }
      const int q = choose_entering(r, bland);
      if (q < 0) {
        // Only trust an infeasibility proof that survives recomputation
        // from the original rows, or one read off a fresh tableau.
        if (since_refactor_ == 0 || certify_infeasible(r)) return Status::Infeasible;
        refactor();
        continue;
      }
      pivot(r, q);
      ++iterations_;
      ++since_refactor_;
    }
  }

  /// Original objective at the current primal point.
  double objective() const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += prob_.cost[j] * x_[j];
    return s;
  }

  /// Lower bound on the LP optimum under the current bounds, valid after
  /// an Optimal solve: the perturbed optimum minus the most the
  /// perturbation can contribute anywhere in the box.
  double bound() const { return objective_internal() - perturbation_slack(); }

  std::vector<double> primal() const {
    std::vector<double> x(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) x[j] *= col_scale_[j];
    return x;
  }

  /// Rebuilds the tableau from the original data for the current basis.
  void refactor() {
    since_refactor_ = 0;
    std::vector<int> wanted = basis_;
    std::vector<VarState> state = state_;
    load_initial_tableau();
    // Rows whose home slack leaves the basis take the structurals.
    std::vector<char> slack_wanted(m_, 0);
    for (int v : wanted)
      if (v >= n_) slack_wanted[v - n_] = 1;
    std::vector<char> row_free(m_, 0);
    for (int r = 0; r < m_; ++r) row_free[r] = !slack_wanted[r];
    for (int v : wanted) {
      if (v >= n_) continue;
      int best = -1;
      double best_abs = 1e-11;
      for (int r = 0; r < m_; ++r) {
        if (!row_free[r]) continue;
        const double a = std::abs(tab(r, v));
        if (a > best_abs) {
          best_abs = a;
          best = r;
        }
      }
      if (best < 0) continue;  // numerically singular; leave the slack in place
      pivot_tableau(best, v);
      row_free[best] = 0;
    }
    // Nonbasic states carry over; newly nonbasic columns sit at a bound.
    for (int j = 0; j < N_; ++j) {
      if (pos_[j] >= 0) continue;
      if (state[j] == VarState::Basic) state_[j] = VarState::AtLower;
      else state_[j] = state[j];
      x_[j] = value_for_state(j);
    }
    recompute_basic_values();
    recompute_reduced_costs();
    restore_dual_feasibility();
  }

 private:
  enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

  Problem prob_;  // scaled copy
  std::vector<double> col_scale_;  // original x = col_scale * internal x
  bool shifted_ = false;           // cost_ differs from base_cost_
  std::vector<double> base_cost_;  // scaled costs plus the fixed perturbation
  int n_ = 0, m_ = 0, N_ = 0;
  std::vector<double> tab_;  // m_ x (N_ + 1), last column = B^-1 b
  std::vector<double> lo_, up_, cost_, d_, x_;
  std::vector<char> artificial_;
  std::vector<int> basis_;  // row -> column
  std::vector<int> pos_;    // column -> row or -1
  std::vector<VarState> state_;
  std::vector<int> row_nz_, col_nz_;
  long iterations_ = 0;
  long since_refactor_ = 0;  // pivots since the tableau was rebuilt

  double& tab(int r, int c) { return tab_[static_cast<std::size_t>(r) * (N_ + 1) + c]; }
  double tab(int r, int c) const { return tab_[static_cast<std::size_t>(r) * (N_ + 1) + c]; }

  void load_initial_tableau() {
    tab_.assign(static_cast<std::size_t>(m_) * (N_ + 1), 0.0);
    for (int r = 0; r < m_; ++r) {
      for (const auto& [c, v] : prob_.rows[r].terms) tab(r, c) += v;
      tab(r, n_ + r) = 1.0;
      tab(r, N_) = prob_.rows[r].rhs;
    }
    basis_.resize(m_);
    pos_.assign(N_, -1);
    state_.assign(N_, VarState::AtLower);
    for (int r = 0; r < m_; ++r) {
      basis_[r] = n_ + r;
      pos_[n_ + r] = r;
      state_[n_ + r] = VarState::Basic;
    }
  }

  void reset_to_slack_basis() {
    load_initial_tableau();
    x_.assign(N_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (cost_[j] < 0.0 && std::isinf(up_[j])) {
        up_[j] = kArtificialBound;
        artificial_[j] = true;
      }
      if (std::isinf(lo_[j]) && std::isinf(up_[j])) state_[j] = VarState::Free;
      else if (std::isinf(lo_[j]) || (cost_[j] < 0.0 && !std::isinf(up_[j]))) state_[j] = VarState::AtUpper;
      else state_[j] = VarState::AtLower;
      x_[j] = value_for_state(j);
    }
    recompute_basic_values();
    recompute_reduced_costs();
  }

  double value_for_state(int j) const {
    switch (state_[j]) {
      case VarState::AtLower: return std::isinf(lo_[j]) ? (std::isinf(up_[j]) ? 0.0 : up_[j]) : lo_[j];
      case VarState::AtUpper: return std::isinf(up_[j]) ? (std::isinf(lo_[j]) ? 0.0 : lo_[j]) : up_[j];
      default: return 0.0;
    }
  }

  // Bound a nonbasic column should sit at given its reduced cost.
  double nonbasic_value(int j) {
    const bool lo_inf = std::isinf(lo_[j]), up_inf = std::isinf(up_[j]);
    if (lo_inf && up_inf) {
      state_[j] = VarState::Free;
    } else if (lo_inf) {
      state_[j] = VarState::AtUpper;
    } else if (up_inf) {
      state_[j] = VarState::AtLower;
    } else if (d_[j] > kDualTol) {
      state_[j] = VarState::AtLower;
    } else if (d_[j] < -kDualTol) {
      state_[j] = VarState::AtUpper;
    } else if (state_[j] != VarState::AtUpper) {
      state_[j] = VarState::AtLower;
    }
    return value_for_state(j);
  }

  void shift_nonbasic(int j, double delta) {
    x_[j] += delta;
    for (int r = 0; r < m_; ++r) {
      const double a = tab(r, j);
      if (a != 0.0) x_[basis_[r]] -= a * delta;
    }
  }

  void recompute_basic_values() {
    std::vector<double> xb(m_);
    for (int r = 0; r < m_; ++r) xb[r] = tab(r, N_);
    for (int j = 0; j < N_; ++j) {
      if (pos_[j] >= 0 || x_[j] == 0.0) continue;
      const double v = x_[j];
      for (int r = 0; r < m_; ++r) {
        const double a = tab(r, j);
        if (a != 0.0) xb[r] -= a * v;
      }
    }
    for (int r = 0; r < m_; ++r) x_[basis_[r]] = xb[r];
  }

  void recompute_reduced_costs() {
    d_ = cost_;
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_[basis_[r]];
      if (cb == 0.0) continue;
      for (int j = 0; j < N_; ++j) {
        const double a = tab(r, j);
        if (a != 0.0) d_[j] -= cb * a;
      }
    }
    for (int r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
  }

  // After a refactor the recomputed reduced costs can disagree slightly
  // with the nonbasic states. Boxed columns flip to the matching bound;
  // anything else gets its cost shifted by the (tiny) violation.
  void restore_dual_feasibility() {
    bool moved = false;
    for (int j = 0; j < N_; ++j) {
      if (pos_[j] >= 0) continue;
      const bool bad_lower = state_[j] == VarState::AtLower && d_[j] < -kDualTol;
      const bool bad_upper = state_[j] == VarState::AtUpper && d_[j] > kDualTol;
      const bool bad_free = state_[j] == VarState::Free && std::abs(d_[j]) > kDualTol;
      if (!bad_lower && !bad_upper && !bad_free) continue;
      if (!std::isinf(lo_[j]) && !std::isinf(up_[j]) && !bad_free) {
        const double old = x_[j];
        state_[j] = bad_lower ? VarState::AtUpper : VarState::AtLower;
        const double nv = value_for_state(j);
        if (nv != old) {
          shift_nonbasic(j, nv - old);
          moved = true;
        }
      } else {
        cost_[j] -= d_[j];
        d_[j] = 0.0;
        shifted_ = true;
      }
    }
    (void)moved;
  }

  // Widens the dual slack of every boxed column by a small deterministic
  // amount. The models here are massively dual degenerate (only the donor
  // columns carry cost) and the unperturbed iteration stalls for thousands
  // of pivots. The perturbation stays for the lifetime of the solver;
  // bound() accounts for it.
  void perturb_costs() {
    base_cost_ = cost_;
    for (int j = 0; j < n_; ++j) {
      if (pos_[j] >= 0 || artificial_[j] || lo_[j] == up_[j] || std::isinf(lo_[j]) || std::isinf(up_[j])) continue;
      std::uint64_t h = static_cast<std::uint64_t>(j) * 0x9E3779B97F4A7C15ull;
      h ^= h >> 29;
      const double eps = kPerturbation * (1.0 + std::abs(cost_[j])) * (0.5 + 0.5 * ((h >> 11) * 0x1.0p-53));
      if (state_[j] == VarState::AtLower) {
        cost_[j] += eps;
        d_[j] += eps;
      } else if (state_[j] == VarState::AtUpper) {
        cost_[j] -= eps;
        d_[j] -= eps;
      } else {
        continue;
      }
      base_cost_[j] = cost_[j];
    }
  }

  double perturbation_slack() const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double e = base_cost_[j] - prob_.cost[j];
      if (e == 0.0) continue;
      const double b = e > 0.0 ? up_[j] : lo_[j];
      if (std::isinf(b)) return HUGE_VAL;
      s += e * b;
    }
    return s;
  }

  // Geometric row/column scaling rounded to powers of two, so the scaled
  // data reproduces the original exactly on the way back.
  static Problem scaled(const Problem& p, std::vector<double>& col_scale) {
    Problem s = p;
    const int n = p.num_cols;
    col_scale.assign(n, 1.0);
    std::vector<double> row_scale(p.rows.size(), 1.0);
    auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };
    for (int pass = 0; pass < 6; ++pass) {
      for (std::size_t r = 0; r < s.rows.size(); ++r) {
        double lo = HUGE_VAL, hi = 0.0;
        for (const auto& [c, v] : p.rows[r].terms) {
          const double a = std::abs(v) * col_scale[c];
          if (a == 0.0) continue;
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
        if (hi > 0.0) row_scale[r] = pow2(1.0 / std::sqrt(lo * hi));
      }
      std::vector<double> lo(n, HUGE_VAL), hi(n, 0.0);
      for (std::size_t r = 0; r < s.rows.size(); ++r)
        for (const auto& [c, v] : p.rows[r].terms) {
          const double a = std::abs(v) * row_scale[r];
          if (a == 0.0) continue;
          lo[c] = std::min(lo[c], a);
          hi[c] = std::max(hi[c], a);
        }
      for (int j = 0; j < n; ++j)
        if (hi[j] > 0.0) col_scale[j] = pow2(1.0 / std::sqrt(lo[j] * hi[j]));
    }
    for (int j = 0; j < n; ++j) {
      s.cost[j] = p.cost[j] * col_scale[j];
      s.lower[j] = p.lower[j] / col_scale[j];
      s.upper[j] = p.upper[j] / col_scale[j];
    }
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
      for (auto& [c, v] : s.rows[r].terms) v *= row_scale[r] * col_scale[c];
      s.rows[r].rhs *= row_scale[r];
    }
    return s;
  }

  // Drops the cost shifts and runs primal simplex from the current
  // (primal feasible) basis until the unshifted costs are optimal too.
  Status primal_cleanup(const SolveLimits& limits, long& it) {
    cost_ = base_cost_;
    shifted_ = false;
    recompute_reduced_costs();
    int stall = 0;
    double last_obj = HUGE_VAL;
    for (;; ++it) {
      if (it >= limits.max_iterations) return Status::IterationLimit;
      if (limits.deadline && (it & 31) == 0 && std::chrono::steady_clock::now() > *limits.deadline)
        return Status::TimeLimit;
      const double obj = objective_internal();
      if (obj < last_obj - 1e-12 * (1.0 + std::abs(obj))) {
        last_obj = obj;
        stall = 0;
      } else {
        ++stall;
      }
      const bool bland = stall > kStallLimit;
      // Entering column: largest dual infeasibility (Bland: lowest index).
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < N_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == up_[j]) continue;
        double v = 0.0;
        switch (state_[j]) {
          case VarState::AtLower: v = -d_[j]; break;
          case VarState::AtUpper: v = d_[j]; break;
          case VarState::Free: v = std::abs(d_[j]); break;
          default: break;
        }
        if (v <= kDualTol) continue;
        if (bland) {
          q = j;
          break;
        }
        if (v > best) {
          best = v;
          q = j;
        }
      }
      if (q < 0) return Status::Optimal;
      const double dir = d_[q] < 0.0 ? 1.0 : -1.0;
      // Ratio test; x_B changes by -tab(i,q) * dir * t.
      double t_max = up_[q] - lo_[q];
      int leave = -1;
      double leave_abs = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = tab(i, q) * dir;
        if (std::abs(a) <= kPivotTol) continue;
        const int b = basis_[i];
        const double room = a > 0.0 ? x_[b] - lo_[b] : up_[b] - x_[b];
        if (std::isinf(room)) continue;
        const double t = std::max(room, 0.0) / std::abs(a);
        if (t < t_max - 1e-12 || (t <= t_max + 1e-12 && leave >= 0 && std::abs(a) > leave_abs)) {
          t_max = t;
          leave = i;
          leave_abs = std::abs(a);
        }
      }
      if (std::isinf(t_max)) return Status::Unbounded;
      if (leave < 0) {
        // Bound flip.
        shift_nonbasic(q, dir * t_max);
        state_[q] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
        x_[q] = value_for_state(q);
        continue;
      }
      const int b = basis_[leave];
      const bool to_lower = tab(leave, q) * dir > 0.0;
      shift_nonbasic(q, dir * t_max);
      x_[b] = to_lower ? lo_[b] : up_[b];
      const double theta = d_[q] / tab(leave, q);
      if (theta != 0.0)
        for (int j = 0; j < N_; ++j) {
          const double a = tab(leave, j);
          if (a != 0.0) d_[j] -= theta * a;
        }
      d_[q] = 0.0;
      pivot_tableau(leave, q);
      state_[b] = to_lower ? VarState::AtLower : VarState::AtUpper;
      if (lo_[b] == up_[b]) state_[b] = VarState::AtLower;
      state_[q] = VarState::Basic;
      ++iterations_;
    }
  }

  double objective_internal() const {
    double s = 0.0;
    for (int j = 0; j < N_; ++j) s += cost_[j] * x_[j];
    return s;
  }

  int choose_leaving(bool bland) const {
    int best = -1;
    double best_v = 0.0;
    for (int r = 0; r < m_; ++r) {
      const int b = basis_[r];
      const double x = x_[b];
      double v = 0.0;
      if (x < lo_[b] - kPrimalTol * (1.0 + std::abs(lo_[b]))) v = lo_[b] - x;
      else if (x > up_[b] + kPrimalTol * (1.0 + std::abs(up_[b]))) v = x - up_[b];
      else continue;
      if (bland) {
        if (best < 0 || b < basis_[best]) best = r;
      } else if (v > best_v) {
        best_v = v;
        best = r;
      }
    }
    return best;
  }

  int choose_entering(int r, bool bland) {
    const int b = basis_[r];
    const double dir = x_[b] < lo_[b] ? 1.0 : -1.0;  // +1: basic must increase
    // Candidate columns and their pivot elements.
    row_nz_.clear();
    for (int j = 0; j < N_; ++j) {
      if (pos_[j] >= 0) continue;
      const double a = tab(r, j);
      if (std::abs(a) <= kPivotTol) continue;
      if (lo_[j] == up_[j]) continue;  // fixed columns cannot move
      const double s = dir * a;
      const bool ok = state_[j] == VarState::Free || (state_[j] == VarState::AtLower && s < 0.0) ||
                      (state_[j] == VarState::AtUpper && s > 0.0);
      if (ok) row_nz_.push_back(j);
    }
    if (row_nz_.empty()) return -1;

    if (bland) {
      int best = -1;
      double best_ratio = HUGE_VAL;
      double amax = 0.0;
      for (int j : row_nz_) amax = std::max(amax, std::abs(tab(r, j)));
      const double atol = std::min(kBlandPivotTol, 0.5 * amax);
      for (int j : row_nz_) {
        if (std::abs(tab(r, j)) < atol) continue;
        const double ratio = std::abs(d_[j]) / std::abs(tab(r, j));
        if (ratio < best_ratio - 1e-12) {
          best_ratio = ratio;
          best = j;
        }
      }
      return best;
    }
    // Harris two-pass ratio test.
    double theta_max = HUGE_VAL;
    for (int j : row_nz_) {
      const double dj = state_[j] == VarState::Free ? 0.0 : std::abs(d_[j]);
      theta_max = std::min(theta_max, (dj + kDualTol) / std::abs(tab(r, j)));
    }
    int best = -1;
    double best_abs = 0.0;
    for (int j : row_nz_) {
      const double dj = state_[j] == VarState::Free ? 0.0 : std::abs(d_[j]);
      const double a = std::abs(tab(r, j));
      if (dj / a <= theta_max && a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    return best;
  }

  void pivot(int r, int q) {
    const int leaving = basis_[r];
    const double alpha = tab(r, q);
    const double target = x_[leaving] < lo_[leaving] ? lo_[leaving] : up_[leaving];

    // Primal step.
    const double delta = (x_[leaving] - target) / alpha;
    x_[q] += delta;
    for (int i = 0; i < m_; ++i) {
      const double a = tab(i, q);
      if (a != 0.0) x_[basis_[i]] -= a * delta;
    }
    x_[leaving] = target;

    // Dual step.
    const double theta = d_[q] / alpha;
    if (theta != 0.0) {
      for (int j = 0; j < N_; ++j) {
        const double a = tab(r, j);
        if (a != 0.0) d_[j] -= theta * a;
      }
    }
    d_[q] = 0.0;

    pivot_tableau(r, q);
    pos_[leaving] = -1;
    state_[leaving] = target == lo_[leaving] ? VarState::AtLower : VarState::AtUpper;
    if (lo_[leaving] == up_[leaving]) state_[leaving] = VarState::AtLower;
    state_[q] = VarState::Basic;
  }

  // Gauss-Jordan step on the tableau only (basis bookkeeping included).
  void pivot_tableau(int r, int q) {
    const int W = N_ + 1;
    double* prow = &tab_[static_cast<std::size_t>(r) * W];
    const double inv = 1.0 / prow[q];
    row_nz_.clear();
    for (int j = 0; j < W; ++j) {
      if (prow[j] == 0.0) continue;
      prow[j] *= inv;
      if (std::abs(prow[j]) < kDropTol) prow[j] = 0.0;
      else row_nz_.push_back(j);
    }
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[static_cast<std::size_t>(i) * W];
      const double f = row[q];
      if (f == 0.0) continue;
      for (int j : row_nz_) {
        double v = row[j] - f * prow[j];
        if (std::abs(v) < kDropTol) v = 0.0;
        row[j] = v;
      }
      row[q] = 0.0;
    }
    const int old = basis_[r];
    if (old >= 0 && pos_[old] == r) pos_[old] = -1;
    basis_[r] = q;
    pos_[q] = r;
  }

  // Row r of the tableau says sum_j alpha_j x_j = beta with alpha = y A and
  // beta = y b, y being row r of B^-1 (the slack block). Recomputes both from
  // the original data and checks that no point of the column box reaches beta.
  bool certify_infeasible(int r) {
    std::vector<double> alpha(N_, 0.0);
    double beta = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double y = tab(r, n_ + i);
      if (y == 0.0) continue;
      for (const auto& [c, v] : prob_.rows[i].terms) alpha[c] += y * v;
      alpha[n_ + i] += y;
      beta += y * prob_.rows[i].rhs;
    }
    double lo = 0.0, hi = 0.0, scale = std::abs(beta);
    for (int j = 0; j < N_; ++j) {
      const double a = alpha[j];
      if (std::abs(a) < 1e-11) continue;
      const double l = lo_[j], u = artificial_[j] ? HUGE_VAL : up_[j];
      const double at_min = a > 0.0 ? l : u, at_max = a > 0.0 ? u : l;
      if (std::isinf(at_min)) lo = -HUGE_VAL;
      else lo += a * at_min;
      if (std::isinf(at_max)) hi = HUGE_VAL;
      else hi += a * at_max;
      scale = std::max(scale, std::abs(a * (std::isinf(l) ? 0.0 : l)));
      scale = std::max(scale, std::abs(a * (std::isinf(u) ? 0.0 : u)));
    }
    const double margin = 1e-7 * (1.0 + scale);
    return beta > hi + margin || beta < lo - margin;
  }

  // Checks the claimed optimum against the original rows; refactors when
  // accumulated round-off has drifted too far. Returns false if the solve
  // loop has to continue.
  bool verify_and_repair() {
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) {
      double act = x_[n_ + r];
      for (const auto& [c, v] : prob_.rows[r].terms) act += v * x_[c];
      worst = std::max(worst, std::abs(act - prob_.rows[r].rhs) / (1.0 + std::abs(prob_.rows[r].rhs)));
    }
    if (worst <= 1e-9) return true;
    refactor();
    return choose_leaving(false) < 0;
  }
};

}  // namespace iab::lp
