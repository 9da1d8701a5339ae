#pragma once

#include <initializer_list>
#include <tuple>
#include <vector>

#include "iabplan/scenario.hpp"

namespace testutil {

// Nodes 0..n-1 on a line 50 m apart, all with the same demand.
inline iab::ScenarioGraph nodes(int n, double demand = 100.0) {
  iab::ScenarioGraph g;
  for (int i = 0; i < n; ++i) {
    iab::Gnb node;
    node.id = i;
    node.position = {50.0 * i, 0.0, 10.0};
    node.demand_mbps = demand;
    g.nodes.push_back(node);
  }
  return g;
}

// Adds a < - > b with capacity `cap` in both directions.
inline void link(iab::ScenarioGraph& g, int a, int b, double cap = 1000.0) {
  g.edges.push_back({a, b, 30.0, cap});
  g.edges.push_back({b, a, 30.0, cap});
}

inline iab::ScenarioGraph complete(int n, double demand = 100.0, double cap = 1000.0) {
  auto g = nodes(n, demand);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) link(g, a, b, cap);
  return g;
}

}  // namespace testutil
