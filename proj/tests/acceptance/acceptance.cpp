// Acceptance harness: one PASS/FAIL/SKIP line per criterion, nonzero exit
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "iabplan/channel.hpp"
#include "iabplan/experiment.hpp"
#include "iabplan/external.hpp"
#include "iabplan/oracle.hpp"
#include "iabplan/resilience.hpp"
#include "iabplan/solve.hpp"
#include "iabplan/validate.hpp"
#include "mutations.hpp"

using namespace iab;

namespace {

constexpr double kOracleTimeLimit = 120.0;
constexpr double kTrendTimeLimit = 10.0;
constexpr double kResilienceTimeLimit = 60.0;

int failures = 0;
std::map<int, std::string> lines;  // printed in criterion order at the end

void report(int id, const char* title, bool pass, const std::string& detail, bool skipped = false) {
  const char* tag = skipped ? "SKIP" : pass ? "PASS" : "FAIL";
  if (!skipped && !pass) ++failures;
  lines[id] = "criterion " + std::to_string(id) + " [" + tag + "] " + title + ": " + detail;
  std::cerr << lines[id] << std::endl;
}

ModelParams planning_params(int R, bool airtime = false) {
  ModelParams p;
  p.redundancy = R;
  p.max_depth = 3;
  p.max_out_degree = 4;
  p.flow_enabled = true;
  p.airtime_per_node = airtime;
  return p;
}

SolveLimits time_limit(double s) {
  SolveLimits l;
  l.time_limit_s = s;
  return l;
}

ScenarioGraph instance(std::uint64_t seed, int n, int layers, bool drop_isolated) {
  InstanceOptions o;
  o.n = n;
  o.seed = seed;
  o.mimo_layers = layers;
  o.drop_isolated = drop_isolated;
  return make_instance(o);
}

struct GridResult {
  int oracle = 0;
  Solution plan;
  bool valid = false;
};

using GridKey = std::tuple<int, std::uint64_t, int, int>;  // n, seed, Lambda, R

// Solves every (n, seed, Lambda, R) of the oracle grid and compares to the oracle.
std::map<GridKey, GridResult> oracle_grid(bool airtime, const std::vector<int>& layers) {
  std::map<GridKey, GridResult> out;
  for (int n : {5, 6, 8})
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
      for (int L : layers) {
        const auto g = instance(seed, n, L, false);
        for (int R : {1, 2}) {
          const auto p = planning_params(R, airtime);
          GridResult r;
          r.oracle = brute_force_min_donors(g, p).donors;
          r.plan = solve_exact(build_model(g, p), time_limit(kOracleTimeLimit));
          r.valid = r.plan.has_plan() && validate_solution(g, p, r.plan).ok();
          out[{n, seed, L, R}] = std::move(r);
        }
      }
  return out;
}

std::string key_str(const GridKey& k) {
  std::ostringstream os;
  os << "n" << std::get<0>(k) << " seed " << std::get<1>(k) << " L" << std::get<2>(k) << " R" << std::get<3>(k);
  return os.str();
}

void criterion_1_to_3() {
  const auto grid = oracle_grid(false, {1, 2});

  int c1_total = 0, c1_equal = 0, c1_proven = 0;
  std::string c1_bad;
  for (const auto& [k, r] : grid) {
    if (std::get<2>(k) != 1) continue;
    ++c1_total;
    if (r.valid && r.plan.objective == r.oracle) ++c1_equal;
    else c1_bad += " " + key_str(k);
    if (r.plan.status == SolveStatus::Optimal) ++c1_proven;
  }
  const auto air = oracle_grid(true, {1});
  int air_total = 0, air_equal = 0;
  for (const auto& [k, r] : air) {
    ++air_total;
    if (r.valid && r.plan.objective == r.oracle) ++air_equal;
    else c1_bad += " airtime:" + key_str(k);
  }
  {
    std::ostringstream os;
    os << c1_equal << "/" << c1_total << " objectives equal the oracle (" << c1_proven
       << " proven optimal); per-node airtime variant " << air_equal << "/" << air_total;
    if (!c1_bad.empty()) os << "; mismatches:" << c1_bad;
    report(1, "oracle equivalence", c1_equal == c1_total && air_equal == air_total, os.str());
  }

  int c2_pairs = 0, c2_bad = 0, proj_total = 0, proj_ok = 0;
  for (const auto& [k, r] : grid) {
    const auto [n, seed, L, R] = k;
    if (R != 2) continue;
    const auto& r1 = grid.at({n, seed, L, 1});
    ++c2_pairs;
    // Compare the oracle optima too, so an unproven incumbent cannot mask a violation.
    if (r.plan.objective < r1.plan.objective || r.oracle < r1.oracle) ++c2_bad;
    if (!r.valid) continue;
    const auto g = instance(seed, n, L, false);
    for (int kk = 1; kk <= 2; ++kk) {
      ++proj_total;
      if (validate_solution(g, planning_params(1), project_edge_set(r.plan, kk)).ok()) ++proj_ok;
    }
  }
  {
    std::ostringstream os;
    os << c2_pairs - c2_bad << "/" << c2_pairs << " pairs with optimum(R=2) >= optimum(R=1); " << proj_ok << "/"
       << proj_total << " edge-set projections valid under R=1";
    report(2, "R-monotonicity", c2_bad == 0 && proj_ok == proj_total && proj_total > 0, os.str());
  }

  int c3_pairs = 0, c3_bad = 0, c3_oracle = 0, c3_oracle_ok = 0;
  for (const auto& [k, r] : grid) {
    const auto [n, seed, L, R] = k;
    if (L != 2) continue;
    ++c3_pairs;
    const auto& r1 = grid.at({n, seed, 1, R});
    if (r.plan.objective > r1.plan.objective || r.oracle > r1.oracle) ++c3_bad;
    ++c3_oracle;
    if (r.valid && r.plan.objective == r.oracle) ++c3_oracle_ok;
  }
  {
    std::ostringstream os;
    os << c3_pairs - c3_bad << "/" << c3_pairs << " pairs with optimum(L=2) <= optimum(L=1); L=2 objectives equal the oracle on "
       << c3_oracle_ok << "/" << c3_oracle;
    report(3, "capacity monotonicity", c3_bad == 0 && c3_oracle_ok == c3_oracle, os.str());
  }
}

void criterion_4() {
  const McsRow top{24.0, 27, 8, 0.9258, 0.05};
  RadioParams p;
  const double c1 = link_capacity_mbps(top, p);
  p.mimo_layers = 2;
  const double c2 = link_capacity_mbps(top, p);
  std::ostringstream os;
  os.precision(6);
  os << "L=1 " << c1 << " Mb/s (target 754 +- 1), L=2 " << c2 << " Mb/s (ratio " << c2 / c1 << ")";
  report(4, "capacity formula", std::abs(c1 - 754.0) <= 1.0 && c2 == 2.0 * c1, os.str());
}

struct SolvedInstance {
  ScenarioGraph graph;
  ModelParams params;
  Solution plan;
};

// 20 validated R=2 plans over n in {8, 10, 12}.
std::vector<SolvedInstance> resilience_set() {
  std::vector<SolvedInstance> out;
  const std::vector<std::pair<int, int>> sizes{{8, 7}, {10, 7}, {12, 6}};
  for (const auto& [n, count] : sizes) {
    for (std::uint64_t seed = 1; static_cast<int>(seed) <= count; ++seed) {
      SolvedInstance s{instance(seed, n, 1, true), planning_params(2), {}};
      s.plan = solve_exact(build_model(s.graph, s.params), time_limit(kResilienceTimeLimit));
      out.push_back(std::move(s));
    }
  }
  return out;
}

void criterion_5_and_7() {
  const auto set = resilience_set();
  int plans = 0, valid = 0, faults = 0, recovered = 0;
  std::string bad;
  for (const auto& s : set) {
    ++plans;
    if (!s.plan.has_plan() || !validate_solution(s.graph, s.params, s.plan).ok()) continue;
    ++valid;
    const auto base = extract_multitree(s.plan, s.graph, s.params);
    for (const auto& es : s.plan.active_edges) {
      for (const auto& e : es) {
        ++faults;
        auto t = base;
        const auto ev = inject_failure(t, e);
        const auto rp = reconfigure(t, ev);
        const auto rep = verify_recovery(t);
        bool minimal = true;
        for (const auto& step : rp.steps)
          minimal &= std::binary_search(ev.affected.begin(), ev.affected.end(), step.node);
        if (rep.ok() && rp.unrecoverable.empty() && minimal) ++recovered;
        else bad += " " + std::to_string(e.first) + "->" + std::to_string(e.second);
      }
    }
  }
  {
    std::ostringstream os;
    os << valid << "/" << plans << " plans valid; " << recovered << "/" << faults
       << " single-link faults fully recovered within D with feasible load";
    if (!bad.empty()) os << "; failed:" << bad;
    report(5, "single-fault resilience", valid == plans && plans == 20 && faults > 0 && recovered == faults, os.str());
  }

  int used = 0, caught = 0, total = 0;
  std::string missed;
  for (const auto& s : set) {
    if (used == 10) break;
    if (!s.plan.has_plan() || s.plan.active_edges[0].empty()) continue;
    if (!validate_solution(s.graph, s.params, s.plan).ok()) continue;
    ++used;
    for (const auto& m : mutation::all(s.plan, s.graph, s.params)) {
      ++total;
      if (validate_solution(s.graph, s.params, m.plan).failed(m.expected_check)) ++caught;
      else missed += " " + m.name;
    }
  }
  std::ostringstream os;
  os << caught << "/" << total << " mutations detected over " << used << " plans";
  if (!missed.empty()) os << "; missed:" << missed;
  report(7, "validator mutation suite", used == 10 && total == 60 && caught == 60, os.str());
}

void criterion_6() {
  std::vector<double> rho_l1r2, rho_l2r1;
  int proven = 0, runs = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    for (auto [L, R] : {std::pair{1, 2}, std::pair{2, 1}}) {
      const auto g = instance(seed, 15, L, true);
      const auto s = solve_exact(build_model(g, planning_params(R)), time_limit(kTrendTimeLimit));
      ++runs;
      if (s.status == SolveStatus::Optimal) ++proven;
      const double rho = s.has_plan() ? donor_ratio(s, g) : 1.0;
      (L == 1 ? rho_l1r2 : rho_l2r1).push_back(rho);
    }
  }
  const double m12 = median(rho_l1r2), m21 = median(rho_l2r1);
  std::ostringstream os;
  os.precision(4);
  os << "median rho(L=1,R=2) = " << m12 << " (band 0.51..0.81), median rho(L=2,R=1) = " << m21 << "; " << proven
     << "/" << runs << " proven optimal within " << kTrendTimeLimit << " s";
  report(6, "donor-ratio trend", m12 >= 0.51 - 1e-12 && m12 <= 0.81 + 1e-12 && m21 < m12, os.str());
}

void criterion_8() {
  const std::string python = IABPLAN_PYTHON;
  if (python.empty() || std::system((python + " -c 'import highspy' >/dev/null 2>&1").c_str()) != 0) {
    report(8, "cross-solver check", true, "no MPS-consuming solver found (highspy missing)", true);
    return;
  }
  const std::string cmd = python + " " + IABPLAN_HIGHS_ADAPTER + " {mps} {sol} --time-limit {time}";
  int equal = 0, total = 0;
  std::string bad;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = instance(seed, 6, 1, true);
    const int R = seed % 2 ? 1 : 2;
    const auto m = build_model(g, planning_params(R));
    ++total;
    try {
      const auto ext = run_external(g, m, cmd, time_limit(kOracleTimeLimit));
      const auto nat = solve_exact(m, time_limit(kOracleTimeLimit));
      if (ext.status == SolveStatus::Optimal && nat.status == SolveStatus::Optimal && ext.objective == nat.objective)
        ++equal;
      else
        bad += " seed " + std::to_string(seed);
    } catch (const std::exception& e) {
      bad += " seed " + std::to_string(seed) + " (" + e.what() + ")";
    }
  }
  std::ostringstream os;
  os << equal << "/" << total << " HiGHS optima equal the native optimum";
  if (!bad.empty()) os << "; mismatches:" << bad;
  report(8, "cross-solver check", equal == total, os.str());
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_4();
  criterion_1_to_3();
  criterion_5_and_7();
  criterion_6();
  criterion_8();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("acceptance finished in %.0f s, %d failing criteria\n", secs, failures);
  return failures == 0 ? 0 : 1;
}
