#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace iab {

enum class SolveStatus { Optimal, FeasibleGap, Infeasible, Timeout };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleGap: return "feasible-gap";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
  }
  return "unknown";
}

struct DepthEntry {
  int node = 0;
  int level = 0;
  int k = 1;  // 1-based edge-set

  friend bool operator==(const DepthEntry&, const DepthEntry&) = default;
  friend auto operator<=>(const DepthEntry&, const DepthEntry&) = default;
};

using Edge = std::pair<int, int>;                    // (src, dst) node ids
using FlowKey = std::tuple<int, int, int, int>;      // (i, j, h, k)

/// A backhaul plan: donors, the edge-disjoint trees of every edge-set, and
/// the per-commodity flows that serve each node's demand in every edge-set.
struct Solution {
  std::vector<int> donor_set;
  std::vector<std::vector<Edge>> active_edges;  // [k-1] -> edges of edge-set k
  std::vector<DepthEntry> depths;
  std::map<FlowKey, double> flows;  // Mb/s
  std::map<Edge, double> airtime;
  double objective = 0.0;
  double gap = 0.0;
  SolveStatus status = SolveStatus::Infeasible;
  double lower_bound = 0.0;
  long nodes_explored = 0;
  double solve_time_s = 0.0;

  int redundancy() const { return static_cast<int>(active_edges.size()); }

  bool is_donor(int id) const {
    return std::find(donor_set.begin(), donor_set.end(), id) != donor_set.end();
  }

  bool has_plan() const {
    return status == SolveStatus::Optimal || status == SolveStatus::FeasibleGap;
  }
};

}  // namespace iab
