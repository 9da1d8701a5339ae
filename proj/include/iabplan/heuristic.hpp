#pragma once

// Constructive primal heuristic: start from all donors and greedily demote
// donors while a tree builder can still attach every node in every
// edge-set. Only used to seed branch-and-bound with a good incumbent; the
// assignment is checked against the model rows before it is trusted.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "iabplan/model.hpp"

namespace iab {

namespace detail {

class PlanBuilder {
 public:
  explicit PlanBuilder(const MilpModel& m) : m_(m) {
    n_ = static_cast<int>(m.node_ids.size());
    for (int v = 0; v < n_; ++v) pos_[m.node_ids[v]] = v;
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
      const int a = pos_.at(m.edges[e].first), b = pos_.at(m.edges[e].second);
      pair_[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(e));
    }
    for (const auto& c : m.constraints) {
      if (c.family != "fixdonor") continue;
      for (const auto& t : c.terms) pinned_.insert(pos_.at(m.variables[t.var].ref.i));
    }
  }

  int size() const { return n_; }
  bool pinned(int v) const { return pinned_.count(v) > 0; }

  struct Plan {
    std::vector<int> root_set;               // per node: edge-set it roots, 0 if not a donor
    std::vector<std::vector<int>> parent_edge;  // [k][node] -> edge index or -1
    std::vector<std::vector<int>> depth;        // [k][node] -> level or -1
  };

  // Attaches every non-donor to each edge-set's tree, most constrained node
  // first. Fails if some node cannot be attached.
  std::optional<Plan> build(const std::vector<int>& root_set) const {
    const int R = m_.params.redundancy, D = m_.params.max_depth;
    const int max_children = m_.params.max_out_degree - 1;
    Plan plan;
    plan.root_set = root_set;
    plan.parent_edge.assign(R, std::vector<int>(n_, -1));
    plan.depth.assign(R, std::vector<int>(n_, -1));
    std::vector<double> load(m_.edges.size(), 0.0);
    std::vector<char> pair_used(m_.edges.size(), 0);
    std::vector<double> node_air(n_, 0.0);
    const bool air = m_.params.flow_enabled && m_.params.airtime_per_node;

    for (int k = 1; k <= R; ++k) {
      auto& depth = plan.depth[k - 1];
      std::vector<int> children(n_, 0);
      std::vector<double> root_out(n_, 0.0);
      int pending = 0;
      for (int v = 0; v < n_; ++v) {
        if (root_set[v] == k) depth[v] = 0;
        else if (root_set[v] == 0) ++pending;
      }
      while (pending > 0) {
        int best_node = -1, best_edge = -1, best_count = 0;
        double best_slack = -1.0;
        for (int v = 0; v < n_; ++v) {
          if (root_set[v] != 0 || depth[v] >= 0) continue;
          int count = 0, edge = -1;
          double slack = -1.0;
          for (int e = 0; e < static_cast<int>(m_.edges.size()); ++e) {
            if (pos_.at(m_.edges[e].second) != v) continue;
            const int p = pos_.at(m_.edges[e].first);
            if (depth[p] < 0 || depth[p] >= D || children[p] >= max_children) continue;
            if (pair_used[e]) continue;
            const double s = attach_slack(plan, k, v, e, load, node_air, root_out, air);
            if (s < 0.0) continue;
            ++count;
            // Prefer shallow parents, then the most remaining headroom.
            const double score = s - depth[p];
            if (edge < 0 || score > slack) {
              slack = score;
              edge = e;
            }
          }
          if (count == 0) continue;
          if (best_node < 0 || count < best_count || (count == best_count && slack > best_slack)) {
            best_node = v;
            best_edge = edge;
            best_count = count;
            best_slack = slack;
          }
        }
        if (best_node < 0) return std::nullopt;
        attach(plan, k, best_edge, load, node_air, root_out, children);
        for (int e : pair_.at(pair_key(best_edge))) pair_used[e] = 1;
        --pending;
      }
    }
    return plan;
  }

  // Full model assignment for a built plan: levels, parents, path flows
  // carrying exactly each node's demand, airtime = load / capacity.
  std::vector<double> assignment(const Plan& plan) const {
    std::vector<double> x(m_.variables.size(), 0.0);
    const int R = m_.params.redundancy;
    std::vector<double> load(m_.edges.size(), 0.0);
    for (int v = 0; v < n_; ++v) {
      const int id = m_.node_ids[v];
      if (plan.root_set[v] > 0) x[m_.u(id, 0, plan.root_set[v])] = 1.0;
    }
    for (int k = 1; k <= R; ++k) {
      for (int v = 0; v < n_; ++v) {
        if (plan.root_set[v] != 0) continue;
        const int id = m_.node_ids[v];
        x[m_.u(id, plan.depth[k - 1][v], k)] = 1.0;
        const int e = plan.parent_edge[k - 1][v];
        x[*m_.p(m_.edges[e].first, m_.edges[e].second, k)] = 1.0;
        if (!m_.params.flow_enabled) continue;
        const double d = m_.demands[v];
        for (int w = v; plan.root_set[w] == 0;) {
          const int pe = plan.parent_edge[k - 1][w];
          x[*m_.f(m_.edges[pe].first, m_.edges[pe].second, id, k)] = d;
          load[pe] += d;
          w = pos_.at(m_.edges[pe].first);
        }
      }
    }
    if (m_.params.flow_enabled)
      for (std::size_t e = 0; e < m_.edges.size(); ++e)
        if (load[e] > 0.0)
          x[*m_.a(m_.edges[e].first, m_.edges[e].second)] = std::min(1.0, load[e] / m_.capacities[e]);
    return x;
  }

 private:
  const MilpModel& m_;
  int n_ = 0;
  std::map<int, int> pos_;
  std::map<std::pair<int, int>, std::vector<int>> pair_;
  std::set<int> pinned_;

  std::pair<int, int> pair_key(int e) const {
    const int a = pos_.at(m_.edges[e].first), b = pos_.at(m_.edges[e].second);
    return {std::min(a, b), std::max(a, b)};
  }

  // Smallest relative headroom left on the path after adding v under p,
  // negative if some capacity, airtime or donor limit would break.
  double attach_slack(const Plan& plan, int k, int v, int e, const std::vector<double>& load,
                      const std::vector<double>& node_air, const std::vector<double>& root_out,
                      bool air) const {
    if (!m_.params.flow_enabled) return 1.0;
    const double d = m_.demands[v];
    double slack = 1.0;
    std::map<int, double> air_delta;
    for (int edge = e, w = v;;) {
      const double cap = m_.capacities[edge];
      const double after = load[edge] + d;
      if (after > cap * (1.0 - 1e-9)) return -1.0;
      slack = std::min(slack, 1.0 - after / cap);
      const double da = d / cap;
      air_delta[pos_.at(m_.edges[edge].first)] += da;
      air_delta[w] += da;
      w = pos_.at(m_.edges[edge].first);
      if (plan.root_set[w] == k) {
        if (root_out[w] + d > m_.donor_capacity * (1.0 + 1e-12)) return -1.0;
        break;
      }
      edge = plan.parent_edge[k - 1][w];
    }
    if (air) {
      for (const auto& [node, da] : air_delta) {
        const double after = node_air[node] + da;
        if (after > 1.0 - 1e-9) return -1.0;
        slack = std::min(slack, 1.0 - after);
      }
    }
    return slack;
  }

  void attach(Plan& plan, int k, int e, std::vector<double>& load, std::vector<double>& node_air,
              std::vector<double>& root_out, std::vector<int>& children) const {
    const int p = pos_.at(m_.edges[e].first), v = pos_.at(m_.edges[e].second);
    plan.parent_edge[k - 1][v] = e;
    plan.depth[k - 1][v] = plan.depth[k - 1][p] + 1;
    ++children[p];
    if (!m_.params.flow_enabled) return;
    const double d = m_.demands[v];
    for (int edge = e, w = v;;) {
      load[edge] += d;
      const double da = d / m_.capacities[edge];
      node_air[w] += da;
      w = pos_.at(m_.edges[edge].first);
      node_air[w] += da;
      if (plan.root_set[w] == k) {
        root_out[w] += d;
        break;
      }
      edge = plan.parent_edge[k - 1][w];
    }
  }
};

}  // namespace detail

/// Greedy donor demotion over a few deterministic node orders. Returns the
/// best model assignment found, or nothing if even the first pass fails
/// (all donors is always feasible, so that only happens for odd models).
inline std::optional<std::vector<double>> greedy_plan(const MilpModel& model, std::uint64_t seed = 1,
                                                      int restarts = 8) {
  detail::PlanBuilder builder(model);
  const int n = builder.size();
  const int R = model.params.redundancy;
  std::mt19937_64 rng(seed);
  std::optional<detail::PlanBuilder::Plan> best;
  int best_donors = n + 1;

  for (int round = 0; round < restarts; ++round) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (round > 0) std::shuffle(order.begin(), order.end(), rng);
    // Round-robin roots so every edge-set starts with donors of its own.
    std::vector<int> root_set(n);
    for (int i = 0; i < n; ++i) root_set[order[i]] = 1 + i % R;
    auto plan = builder.build(root_set);
    if (!plan) continue;
    bool improved = true;
    while (improved) {
      improved = false;
      for (int v : order) {
        if (root_set[v] == 0 || builder.pinned(v)) continue;
        const int old = root_set[v];
        root_set[v] = 0;
        if (auto p = builder.build(root_set)) {
          plan = std::move(p);
          improved = true;
          continue;
        }
        // The edge-sets may now be unbalanced; try re-rooting one donor.
        bool done = false;
        for (int w : order) {
          if (R < 2 || root_set[w] == 0) continue;
          const int was = root_set[w];
          for (int k = 1; k <= R && !done; ++k) {
            if (k == was) continue;
            root_set[w] = k;
            if (auto p = builder.build(root_set)) {
              plan = std::move(p);
              done = true;
            } else {
              root_set[w] = was;
            }
          }
          if (done) break;
        }
        if (done) {
          improved = true;
        } else {
          root_set[v] = old;
        }
      }
    }
    const int donors = static_cast<int>(std::count_if(root_set.begin(), root_set.end(), [](int r) { return r > 0; }));
    if (donors < best_donors) {
      best_donors = donors;
      best = plan;
    }
  }
  if (!best) return std::nullopt;
  return builder.assignment(*best);
}

}  // namespace iab
