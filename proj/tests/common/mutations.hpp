#pragma once

// Single-field corruptions of a valid plan. Each returns the mutated plan
// and the check that must catch it.

#include <algorithm>
#include <string>
#include <vector>

#include "iabplan/model.hpp"
#include "iabplan/solution.hpp"

namespace mutation {

struct Mutant {
  std::string name;
  iab::Solution plan;
  std::string expected_check;
};

// First non-donor node that has a parent in edge-set 1, or -1.
inline int first_child(const iab::Solution& s) {
  if (s.active_edges.empty() || s.active_edges[0].empty()) return -1;
  return s.active_edges[0].front().second;
}

inline Mutant flip_p(const iab::Solution& s) {
  Mutant m{"flip_p", s, "in_degree"};
  m.plan.active_edges[0].erase(m.plan.active_edges[0].begin());
  return m;
}

inline Mutant starve_demand(const iab::Solution& s, const iab::ScenarioGraph& g) {
  Mutant m{"starve_demand", s, "demand"};
  const auto [i, j] = s.active_edges[0].front();
  const double d = g.node(j).demand();
  auto& f = m.plan.flows[{i, j, j, 1}];
  f = std::max(0.0, f - std::max(1.0, 0.01 * d));
  return m;
}

inline Mutant airtime_over_one(const iab::Solution& s) {
  Mutant m{"airtime_over_one", s, "airtime_range"};
  m.plan.airtime[s.active_edges[0].front()] = 1.5;
  return m;
}

inline Mutant duplicate_edge(const iab::Solution& s) {
  Mutant m{"duplicate_edge", s, "edge_disjoint"};
  const auto e = s.active_edges[0].front();
  m.plan.active_edges[m.plan.active_edges.size() > 1 ? 1 : 0].push_back(e);
  return m;
}

inline Mutant deepen(const iab::Solution& s, int max_depth) {
  Mutant m{"deepen", s, "depth"};
  const int v = first_child(s);
  for (auto& d : m.plan.depths)
    if (d.node == v && d.k == 1) d.level = max_depth + 1;
  return m;
}

inline Mutant exceed_out_degree(const iab::Solution& s, const iab::ScenarioGraph& g, int max_out_degree) {
  Mutant m{"exceed_out_degree", s, "out_degree"};
  const int parent = s.active_edges[0].front().first;
  auto& edges = m.plan.active_edges[0];
  auto children = [&] {
    return std::count_if(edges.begin(), edges.end(), [&](const iab::Edge& e) { return e.first == parent; });
  };
  for (const auto& n : g.nodes) {
    if (children() >= max_out_degree) break;
    if (n.id == parent) continue;
    if (std::find(edges.begin(), edges.end(), iab::Edge{parent, n.id}) != edges.end()) continue;
    edges.emplace_back(parent, n.id);
  }
  return m;
}

// All six mutants of a plan that has at least one tree edge in edge-set 1.
inline std::vector<Mutant> all(const iab::Solution& s, const iab::ScenarioGraph& g, const iab::ModelParams& p) {
  return {flip_p(s),    starve_demand(s, g),     airtime_over_one(s),
          duplicate_edge(s), deepen(s, p.max_depth), exceed_out_degree(s, g, p.max_out_degree)};
}

}  // namespace mutation
