#pragma once

// Independent solution checker. Everything is recomputed from the graph and
// the parameters; the MilpModel is never consulted, so a bug in model
// construction cannot certify its own output.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iabplan/model.hpp"
#include "iabplan/scenario.hpp"
#include "iabplan/solution.hpp"

namespace iab {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::vector<std::vector<int>> offenders;  // index tuples, meaning depends on the check
  std::vector<std::string> details;         // one line per offender

  void fail(std::vector<int> idx, std::string why) {
    passed = false;
    offenders.push_back(std::move(idx));
    details.push_back(std::move(why));
  }
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  const CheckResult& check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw ParameterError("no check named " + name);
  }

  bool failed(const std::string& name) const { return !check(name).passed; }

  std::vector<std::string> failed_names() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.passed) out.push_back(c.name);
    return out;
  }

  std::string summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
      os << (c.passed ? "pass " : "FAIL ") << c.name << "\n";
      for (const auto& d : c.details) os << "  " << d << "\n";
    }
    return os.str();
  }
};

namespace detail {

inline bool exceeds(double lhs, double rhs, double rel = 1e-6) {
  return lhs > rhs + rel * std::max(1.0, std::fabs(rhs));
}

inline std::string edge_str(int i, int j) { return std::to_string(i) + "->" + std::to_string(j); }

}  // namespace detail

inline ValidationReport validate_solution(const ScenarioGraph& graph, const ModelParams& params,
                                          const Solution& sol) {
  using detail::edge_str;
  using detail::exceeds;
  const int R = params.redundancy;
  const int D = params.max_depth;
  constexpr double tol = 1e-6;

  std::set<int> ids;
  std::map<int, double> demand;
  for (const auto& n : graph.nodes) {
    ids.insert(n.id);
    demand[n.id] = n.demand();
  }
  std::map<Edge, double> cap;
  for (const auto& e : graph.edges) cap[{e.src, e.dst}] = e.capacity_mbps;
  const double C = params.donor_capacity_mbps.value_or(graph.total_demand());

  CheckResult shape{"edge_sets"}, in_deg{"in_degree"}, roots{"donor_roots"}, depth{"depth"},
      out_deg{"out_degree"}, exist{"edges_exist"}, disjoint{"edge_disjoint"},
      conserve{"flow_conservation"}, dem{"demand"}, link{"link_capacity"}, air{"airtime_range"},
      node_air{"node_airtime"}, idle{"unassigned_zero"};

  if (sol.redundancy() != R)
    shape.fail({sol.redundancy()}, "solution has " + std::to_string(sol.redundancy()) +
                                        " edge-sets, expected " + std::to_string(R));
  const int K = std::min(R, sol.redundancy());

  // Levels per (node, k) from the u-assignment; a donor is level 0 in its root set.
  std::map<std::pair<int, int>, std::vector<int>> level;
  std::map<int, std::vector<int>> root_sets;
  for (const auto& d : sol.depths) {
    if (!ids.count(d.node) || d.k < 1 || d.k > R) {
      roots.fail({d.node, d.k}, "depth entry for unknown node or edge-set");
      continue;
    }
    level[{d.node, d.k}].push_back(d.level);
    if (d.level == 0) root_sets[d.node].push_back(d.k);
  }
  std::set<int> donors(sol.donor_set.begin(), sol.donor_set.end());
  for (const auto& [node, ks] : root_sets) {
    if (ks.size() > 1) roots.fail({node}, "node " + std::to_string(node) + " roots several edge-sets");
    if (!donors.count(node)) roots.fail({node}, "node " + std::to_string(node) + " is level 0 but not listed as donor");
  }
  for (int v : donors)
    if (!root_sets.count(v)) roots.fail({v}, "donor " + std::to_string(v) + " roots no edge-set");
  if (std::fabs(sol.objective - static_cast<double>(donors.size())) > tol)
    roots.fail({static_cast<int>(donors.size())}, "objective differs from donor count");

  auto root_of = [&](int v) { return root_sets.count(v) ? root_sets.at(v).front() : 0; };
  auto level_of = [&](int v, int k) -> int {
    auto it = level.find({v, k});
    return it == level.end() || it->second.size() != 1 ? -1 : it->second.front();
  };
  for (int v : ids) {
    const int rk = root_of(v);
    for (int k = 1; k <= R; ++k) {
      auto it = level.find({v, k});
      const std::size_t entries = it == level.end() ? 0 : it->second.size();
      if (rk != 0 && k != rk && entries > 0)
        roots.fail({v, k}, "donor " + std::to_string(v) + " also has a level in edge-set " + std::to_string(k));
      if (rk == 0 && entries != 1)
        depth.fail({v, k}, "node " + std::to_string(v) + " has " + std::to_string(entries) +
                               " levels in edge-set " + std::to_string(k));
    }
  }

  // Topology per edge-set.
  std::map<std::pair<int, int>, int> pair_use;  // undirected pair -> count
  std::map<Edge, std::set<int>> active_in;      // directed edge -> edge-sets
  for (int k = 1; k <= K; ++k) {
    std::map<int, int> indeg, outdeg;
    for (const auto& [i, j] : sol.active_edges[k - 1]) {
      active_in[{i, j}].insert(k);
      ++pair_use[{std::min(i, j), std::max(i, j)}];
      if (!cap.count({i, j})) exist.fail({i, j, k}, "edge " + edge_str(i, j) + " is not a candidate edge");
      ++indeg[j];
      ++outdeg[i];
      const int li = level_of(i, k), lj = level_of(j, k);
      if (li < 0 || lj < 0 || lj != li + 1)
        depth.fail({i, j, k}, "edge " + edge_str(i, j) + " in edge-set " + std::to_string(k) +
                                  " breaks hop consistency");
      const int ri = root_of(i);
      if (ri != 0 && ri != k)
        roots.fail({i, k}, "donor " + std::to_string(i) + " rooted in edge-set " + std::to_string(ri) +
                               " is a parent in edge-set " + std::to_string(k));
    }
    for (int v : ids) {
      const int want = root_of(v) != 0 ? 0 : 1;
      const int got = indeg.count(v) ? indeg[v] : 0;
      if (got != want)
        in_deg.fail({v, k}, "node " + std::to_string(v) + " has " + std::to_string(got) +
                                " parents in edge-set " + std::to_string(k));
      if (outdeg.count(v) && outdeg[v] >= params.max_out_degree)
        out_deg.fail({v, k}, "node " + std::to_string(v) + " has " + std::to_string(outdeg[v]) +
                                 " children in edge-set " + std::to_string(k));
    }
  }
  for (const auto& [key, lv] : level)
    for (int l : lv)
      if (l < 0 || l > D)
        depth.fail({key.first, key.second, l}, "node " + std::to_string(key.first) + " at level " +
                                                   std::to_string(l) + " in edge-set " + std::to_string(key.second));
  for (const auto& [pr, count] : pair_use)
    if (count > 1)
      disjoint.fail({pr.first, pr.second}, "pair {" + std::to_string(pr.first) + "," +
                                               std::to_string(pr.second) + "} used " + std::to_string(count) + " times");

  // Flows and airtime.
  if (params.flow_enabled) {
    std::map<std::pair<int, int>, double> out_total, in_other;  // (node, k)
    std::map<std::pair<int, int>, double> own_in;              // (node, k)
    std::map<Edge, double> link_load;
    for (const auto& [key, val] : sol.flows) {
      const auto [i, j, h, k] = key;
      if (val < -tol) conserve.fail({i, j, h, k}, "negative flow on " + edge_str(i, j));
      if (std::fabs(val) <= tol) continue;
      if (h == i) idle.fail({i, j, h, k}, "node " + std::to_string(i) + " sends its own commodity");
      if (k < 1 || k > R || !active_in.count({i, j}) || !active_in.at({i, j}).count(k))
        idle.fail({i, j, h, k}, "flow on " + edge_str(i, j) + " outside edge-set " + std::to_string(k));
      if (!cap.count({i, j})) exist.fail({i, j, k}, "flow on missing edge " + edge_str(i, j));
      out_total[{i, k}] += val;
      if (h != j) in_other[{j, k}] += val;
      else own_in[{j, k}] += val;
      link_load[{i, j}] += val;
    }
    for (int v : ids) {
      const bool donor = root_of(v) != 0;
      for (int k = 1; k <= R; ++k) {
        const double out = out_total.count({v, k}) ? out_total[{v, k}] : 0.0;
        const double in = in_other.count({v, k}) ? in_other[{v, k}] : 0.0;
        if (exceeds(out - in, donor ? C : 0.0))
          conserve.fail({v, k}, "node " + std::to_string(v) + " emits " + std::to_string(out - in) +
                                    " Mb/s more than it receives in edge-set " + std::to_string(k));
        const double got = own_in.count({v, k}) ? own_in[{v, k}] : 0.0;
        if (!donor && exceeds(demand[v], got))
          dem.fail({v, k}, "node " + std::to_string(v) + " receives " + std::to_string(got) + " of " +
                               std::to_string(demand[v]) + " Mb/s in edge-set " + std::to_string(k));
      }
    }
    for (const auto& [e, val] : sol.airtime) {
      if (val < -tol || val > 1.0 + tol)
        air.fail({e.first, e.second}, "airtime " + std::to_string(val) + " on " + edge_str(e.first, e.second));
      if (val > tol && !active_in.count(e))
        idle.fail({e.first, e.second}, "airtime on inactive edge " + edge_str(e.first, e.second));
    }
    for (const auto& [e, load] : link_load) {
      const double a = sol.airtime.count(e) ? sol.airtime.at(e) : 0.0;
      const double L = cap.count(e) ? cap.at(e) : 0.0;
      if (exceeds(load, a * L))
        link.fail({e.first, e.second}, "load " + std::to_string(load) + " exceeds airtime*capacity " +
                                           std::to_string(a * L) + " on " + edge_str(e.first, e.second));
    }
    if (params.airtime_per_node) {
      std::map<int, double> sum;
      for (const auto& [e, val] : sol.airtime) {
        sum[e.first] += val;
        sum[e.second] += val;
      }
      for (const auto& [v, s] : sum)
        if (exceeds(s, 1.0))
          node_air.fail({v}, "node " + std::to_string(v) + " airtime sum " + std::to_string(s));
    }
  } else {
    for (const auto& [key, val] : sol.flows)
      if (std::fabs(val) > tol) {
        const auto [i, j, h, k] = key;
        idle.fail({i, j, h, k}, "flow present with flow constraints off");
      }
  }

  ValidationReport rep;
  rep.checks = {shape, in_deg, roots, depth, out_deg, exist, disjoint, conserve, dem, link, air, node_air, idle};
  return rep;
}

/// The edge-set `k` of a plan as a stand-alone R=1 plan: donors rooted
/// elsewhere become roots of edge-set 1, and airtime is kept only on the
/// links edge-set k uses.
inline Solution project_edge_set(const Solution& sol, int k) {
  if (k < 1 || k > sol.redundancy()) throw ParameterError("edge-set out of range");
  Solution out = sol;
  out.active_edges = {sol.active_edges[k - 1]};
  out.depths.clear();
  for (const auto& d : sol.depths) {
    if (d.level == 0) out.depths.push_back({d.node, 0, 1});
    else if (d.k == k) out.depths.push_back({d.node, d.level, 1});
  }
  std::sort(out.depths.begin(), out.depths.end());
  out.flows.clear();
  for (const auto& [key, val] : sol.flows) {
    const auto [i, j, h, kk] = key;
    if (kk == k) out.flows[{i, j, h, 1}] = val;
  }
  std::set<Edge> used(out.active_edges[0].begin(), out.active_edges[0].end());
  out.airtime.clear();
  for (const auto& [e, val] : sol.airtime)
    if (used.count(e)) out.airtime[e] = val;
  return out;
}

}  // namespace iab
