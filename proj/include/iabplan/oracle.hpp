#pragma once

// Exhaustive reference solver for tiny graphs. It shares no code with the
// MILP path: donor sets are enumerated by size, every tree family is built
// by backtracking, and flow feasibility is decided from subtree demands
// (in a tree every node's parent link must carry its whole subtree).

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "iabplan/errors.hpp"
#include "iabplan/model.hpp"
#include "iabplan/scenario.hpp"
#include "iabplan/solution.hpp"

namespace iab {

inline constexpr int kOracleMaxNodes = 8;

struct OracleResult {
  int donors = 0;
  Solution witness;  // status optimal, flows along tree paths, airtime = load / L
};

namespace detail {

class ForestSearch {
 public:
  ForestSearch(const ScenarioGraph& g, const ModelParams& p) : g_(g), p_(p) {
    n_ = static_cast<int>(g.nodes.size());
    for (int v = 0; v < n_; ++v) demand_.push_back(p.flow_enabled ? g.nodes[v].demand() : 0.0);
    cap_.assign(n_, std::vector<double>(n_, -1.0));
    for (const auto& e : g.edges) cap_[*g.index_of(e.src)][*g.index_of(e.dst)] = e.capacity_mbps;
    C_ = p.donor_capacity_mbps.value_or(g.total_demand());
  }

  // root[v] = edge-set rooted at v (1-based) or 0. Fills parent_ on success.
  bool feasible(const std::vector<int>& root) {
    root_ = root;
    const int R = p_.redundancy;
    parent_.assign(R, std::vector<int>(n_, -1));
    pair_used_.assign(n_, std::vector<char>(n_, 0));
    for (int k = 1; k <= R; ++k) {
      bool any_root = false, any_node = false;
      for (int v = 0; v < n_; ++v) {
        any_root |= root[v] == k;
        any_node |= root[v] == 0;
      }
      if (any_node && !any_root) return false;
    }
    // Nodes with fewest possible parents first.
    order_.clear();
    for (int v = 0; v < n_; ++v)
      if (root[v] == 0) order_.push_back(v);
    std::vector<int> options(n_, 0);
    for (int v : order_)
      for (int u = 0; u < n_; ++u)
        if (cap_[u][v] >= 0.0) ++options[v];
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return options[a] < options[b]; });
    return place(1, 0);
  }

  const std::vector<std::vector<int>>& parents() const { return parent_; }

  // Level of v in edge-set k for a complete, valid tree.
  int level(int v, int k) const {
    int d = 0;
    while (root_[v] != k) {
      v = parent_[k - 1][v];
      ++d;
    }
    return d;
  }

  // Load on the link parent(v) -> v in edge-set k: v's subtree demand.
  std::vector<double> subtree_load(int k) const {
    std::vector<double> load(n_, 0.0);
    for (int v = 0; v < n_; ++v) {
      if (root_[v] != 0) continue;
      for (int w = v; root_[w] == 0; w = parent_[k - 1][w]) load[w] += demand_[v];
    }
    return load;
  }

  double demand(int v) const { return demand_[v]; }
  double capacity(int u, int v) const { return cap_[u][v]; }

 private:
  const ScenarioGraph& g_;
  const ModelParams& p_;
  int n_ = 0;
  std::vector<double> demand_;
  std::vector<std::vector<double>> cap_;
  double C_ = 0.0;
  std::vector<int> root_, order_;
  std::vector<std::vector<int>> parent_;
  std::vector<std::vector<char>> pair_used_;

  bool member(int u, int k) const { return root_[u] == 0 || root_[u] == k; }

  // Depth of u following assigned parents; -1 if the chain is still open,
  // -2 if it runs into `v` (would close a cycle).
  int chain_depth(int u, int k, int v) const {
    int d = 0;
    while (root_[u] != k) {
      if (u == v) return -2;
      const int p = parent_[k - 1][u];
      if (p < 0) return -1;
      u = p;
      if (++d > n_) return -2;
    }
    return d;
  }

  bool place(int k, std::size_t idx) {
    if (idx == order_.size()) {
      if (!tree_ok(k)) return false;
      if (k == p_.redundancy) return flows_ok();
      return place(k + 1, 0);
    }
    const int v = order_[idx];
    const int max_children = p_.max_out_degree - 1;
    for (int u = 0; u < n_; ++u) {
      if (u == v || cap_[u][v] < 0.0 || !member(u, k)) continue;
      if (pair_used_[std::min(u, v)][std::max(u, v)]) continue;
      if (p_.flow_enabled && cap_[u][v] < demand_[v]) continue;
      int children = 0;
      for (int w = 0; w < n_; ++w) children += parent_[k - 1][w] == u;
      if (children >= max_children) continue;
      const int d = chain_depth(u, k, v);
      if (d == -2 || d + 1 > p_.max_depth) continue;
      parent_[k - 1][v] = u;
      pair_used_[std::min(u, v)][std::max(u, v)] = 1;
      if (place(k, idx + 1)) return true;
      parent_[k - 1][v] = -1;
      pair_used_[std::min(u, v)][std::max(u, v)] = 0;
    }
    return false;
  }

  // Acyclic, depth-bounded, and the links of this tree alone fit their loads.
  bool tree_ok(int k) const {
    for (int v = 0; v < n_; ++v) {
      if (root_[v] != 0) continue;
      int d = 0;
      for (int w = v; root_[w] != k; w = parent_[k - 1][w])
        if (++d > p_.max_depth) return false;
    }
    if (!p_.flow_enabled) return true;
    const auto load = subtree_load(k);
    std::vector<double> root_out(n_, 0.0);
    for (int v = 0; v < n_; ++v) {
      if (root_[v] != 0) continue;
      const int u = parent_[k - 1][v];
      if (load[v] > cap_[u][v] * (1.0 + 1e-9)) return false;
      if (root_[u] == k) root_out[u] += load[v];
    }
    for (int v = 0; v < n_; ++v)
      if (root_out[v] > C_ * (1.0 + 1e-9)) return false;
    return true;
  }

  bool flows_ok() const {
    if (!p_.flow_enabled || !p_.airtime_per_node) return true;
    std::vector<double> air(n_, 0.0);
    for (int k = 1; k <= p_.redundancy; ++k) {
      const auto load = subtree_load(k);
      for (int v = 0; v < n_; ++v) {
        if (root_[v] != 0) continue;
        const int u = parent_[k - 1][v];
        const double a = load[v] / cap_[u][v];
        air[u] += a;
        air[v] += a;
      }
    }
    return std::all_of(air.begin(), air.end(), [](double a) { return a <= 1.0 + 1e-9; });
  }
};

inline Solution oracle_witness(const ScenarioGraph& g, const ModelParams& p, const ForestSearch& fs,
                               const std::vector<int>& root) {
  const int n = static_cast<int>(g.nodes.size());
  Solution s;
  s.active_edges.resize(p.redundancy);
  for (int v = 0; v < n; ++v) {
    const int id = g.nodes[v].id;
    if (root[v] != 0) {
      s.donor_set.push_back(id);
      s.depths.push_back({id, 0, root[v]});
    }
  }
  std::map<Edge, double> load_total;
  for (int k = 1; k <= p.redundancy; ++k) {
    for (int v = 0; v < n; ++v) {
      if (root[v] != 0) continue;
      const int id = g.nodes[v].id;
      const int u = fs.parents()[k - 1][v];
      s.active_edges[k - 1].emplace_back(g.nodes[u].id, id);
      s.depths.push_back({id, fs.level(v, k), k});
      if (!p.flow_enabled || !(fs.demand(v) > 0.0)) continue;
      for (int w = v; root[w] == 0;) {
        const int pw = fs.parents()[k - 1][w];
        const Edge e{g.nodes[pw].id, g.nodes[w].id};
        s.flows[{e.first, e.second, id, k}] = fs.demand(v);
        load_total[e] += fs.demand(v);
        w = pw;
      }
    }
    std::sort(s.active_edges[k - 1].begin(), s.active_edges[k - 1].end());
  }
  for (const auto& [e, load] : load_total)
    s.airtime[e] = std::min(1.0, load / fs.capacity(*g.index_of(e.first), *g.index_of(e.second)));
  std::sort(s.depths.begin(), s.depths.end());
  s.objective = static_cast<double>(s.donor_set.size());
  s.status = SolveStatus::Optimal;
  return s;
}

}  // namespace detail

/// Minimum donor count by exhaustive search, for graphs of at most 8 nodes.
/// Donor subsets are tried by increasing size; edge-set labels are
/// interchangeable, so root assignments are enumerated up to relabeling.
inline OracleResult brute_force_min_donors(const ScenarioGraph& graph, const ModelParams& params) {
  params.validate();
  graph.check();
  const int n = static_cast<int>(graph.nodes.size());
  if (n > kOracleMaxNodes)
    throw ParameterError("brute-force oracle limited to " + std::to_string(kOracleMaxNodes) + " nodes");
  if (params.flow_enabled && !graph.has_demands()) throw ConfigError("flow constraints require node demands");
  const int R = params.redundancy;
  detail::ForestSearch fs(graph, params);

  for (int c = 1; c <= n; ++c) {
    std::vector<int> pick(n, 0);
    std::fill(pick.end() - c, pick.end(), 1);
    do {
      std::vector<int> members;
      for (int v = 0; v < n; ++v)
        if (pick[v]) members.push_back(v);
      // Canonical labelings: each donor uses at most one label beyond the
      // largest used so far.
      std::vector<int> root(n, 0);
      std::function<bool(std::size_t, int)> assign = [&](std::size_t idx, int used) -> bool {
        if (idx == members.size()) return fs.feasible(root);
        for (int k = 1; k <= std::min(R, used + 1); ++k) {
          root[members[idx]] = k;
          if (assign(idx + 1, std::max(used, k))) return true;
        }
        root[members[idx]] = 0;
        return false;
      };
      if (assign(0, 0)) return {c, detail::oracle_witness(graph, params, fs, root)};
    } while (std::next_permutation(pick.begin(), pick.end()));
  }
  throw ConfigError("no feasible plan, not even with every node a donor");
}

}  // namespace iab
