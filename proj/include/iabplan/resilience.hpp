#pragma once

// Runtime multitree and the failure controller: a link fails, every node
// downstream of it in the affected tree moves to another edge-set, and the
// core learns which donor now serves it.

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iabplan/errors.hpp"
#include "iabplan/model.hpp"
#include "iabplan/scenario.hpp"
#include "iabplan/solution.hpp"
#include "iabplan/validate.hpp"
#include "json.hpp"

namespace iab {

inline constexpr const char* kTraceCsvSchema = "iabplan-trace/1";
inline constexpr const char* kTraceCsvHeader = "tick,node,hops,proxy_rtt_ms,state";

inline Edge undirected(Edge e) { return {std::min(e.first, e.second), std::max(e.first, e.second)}; }

struct MultiTreeTopology {
  int redundancy = 1;
  int max_depth = 3;
  std::vector<int> node_ids;
  std::map<int, int> donor_root;                // donor -> edge-set it roots
  std::vector<std::map<int, int>> parent;       // [k-1]: node -> parent
  std::vector<std::map<int, int>> depth;        // [k-1]: node -> level (donors of k at 0)
  std::map<int, int> active;                    // node -> edge-set carrying its traffic
  std::set<Edge> failed;                        // undirected
  std::set<int> unrecoverable;
  std::map<int, double> demand;
  std::map<Edge, double> capacity;              // directed
  std::map<Edge, double> airtime;               // directed, as planned
  int tick = 0;

  bool is_donor(int v) const { return donor_root.count(v) > 0; }

  std::optional<int> parent_of(int v, int k) const {
    auto it = parent[k - 1].find(v);
    if (it == parent[k - 1].end()) return std::nullopt;
    return it->second;
  }

  /// Path from v to its donor in edge-set k as directed edges, or nothing
  /// if v is not in that tree or a failed link breaks the path.
  std::optional<std::vector<Edge>> path(int v, int k) const {
    std::vector<Edge> edges;
    while (!(is_donor(v) && donor_root.at(v) == k)) {
      auto p = parent_of(v, k);
      if (!p) return std::nullopt;
      const Edge e{*p, v};
      if (failed.count(undirected(e))) return std::nullopt;
      edges.push_back(e);
      v = *p;
      if (edges.size() > node_ids.size()) return std::nullopt;
    }
    return edges;
  }

  /// Hops from v to the core over its active edge-set; 0 for donors.
  std::optional<int> hops(int v) const {
    if (is_donor(v)) return 0;
    if (unrecoverable.count(v)) return std::nullopt;
    auto p = path(v, active.at(v));
    if (!p) return std::nullopt;
    return static_cast<int>(p->size());
  }

  /// Edge-set k that contains the directed edge, if any.
  std::optional<int> tree_of(Edge e) const {
    for (int k = 1; k <= redundancy; ++k) {
      auto p = parent_of(e.second, k);
      if (p && *p == e.first) return k;
    }
    return std::nullopt;
  }
};

/// Builds the runtime topology of a plan. The plan is re-validated first
/// and refused if it fails.
inline MultiTreeTopology extract_multitree(const Solution& sol, const ScenarioGraph& graph,
                                           const ModelParams& params) {
  const auto report = validate_solution(graph, params, sol);
  if (!report.ok()) throw ParameterError("refusing an invalid plan:\n" + report.summary());
  MultiTreeTopology t;
  t.redundancy = params.redundancy;
  t.max_depth = params.max_depth;
  t.parent.resize(t.redundancy);
  t.depth.resize(t.redundancy);
  for (const auto& n : graph.nodes) {
    t.node_ids.push_back(n.id);
    t.demand[n.id] = params.flow_enabled ? n.demand() : 0.0;
  }
  for (const auto& e : graph.edges) t.capacity[{e.src, e.dst}] = e.capacity_mbps;
  t.airtime = sol.airtime;
  for (const auto& d : sol.depths) {
    if (d.level == 0) t.donor_root[d.node] = d.k;
    t.depth[d.k - 1][d.node] = d.level;
  }
  for (int k = 1; k <= t.redundancy; ++k)
    for (const auto& [i, j] : sol.active_edges[k - 1]) t.parent[k - 1][j] = i;
  for (int v : t.node_ids) t.active[v] = t.is_donor(v) ? t.donor_root.at(v) : 1;
  return t;
}

struct FaultEvent {
  Edge edge{};
  int tick = 0;
  std::optional<int> edge_set;  // tree the edge belongs to; empty if unused
  std::vector<int> affected;    // downstream subtree in that tree, sorted
  double affected_demand_mbps = 0.0;
};

/// Marks the link failed and returns the subtree below it. A link no tree
/// uses is still marked failed, but nothing is affected.
inline FaultEvent inject_failure(MultiTreeTopology& topo, Edge edge) {
  FaultEvent ev;
  ev.edge = edge;
  ev.tick = topo.tick;
  auto k = topo.tree_of(edge);
  if (!k) {
    k = topo.tree_of({edge.second, edge.first});
    if (k) ev.edge = {edge.second, edge.first};
  }
  topo.failed.insert(undirected(edge));
  if (!k) {
    std::clog << "warning: link " << edge.first << "-" << edge.second << " is not in any tree\n";
    return ev;
  }
  ev.edge_set = *k;
  const int top = ev.edge.second;
  for (int v : topo.node_ids) {
    for (int w = v;;) {
      if (w == top) {
        ev.affected.push_back(v);
        ev.affected_demand_mbps += topo.demand.at(v);
        break;
      }
      auto p = topo.parent_of(w, *k);
      if (!p) break;
      w = *p;
    }
  }
  std::sort(ev.affected.begin(), ev.affected.end());
  return ev;
}

struct ReconfigStep {
  int node = 0;
  std::optional<int> old_parent;
  std::optional<int> new_parent;
  int old_edge_set = 1;
  int new_edge_set = 1;
};

struct RouteUpdate {
  int node = 0;
  int donor = 0;
};

struct ReconfigPlan {
  std::vector<ReconfigStep> steps;  // parents before children in the new tree
  std::vector<RouteUpdate> routes;
  std::vector<int> unrecoverable;
};

/// Moves every affected node whose traffic used the failed tree onto the
/// first edge-set that still reaches a donor, and applies the result to
/// `topo`. Nodes left without such an edge-set are marked unrecoverable.
inline ReconfigPlan reconfigure(MultiTreeTopology& topo, const FaultEvent& fault) {
  ReconfigPlan plan;
  if (!fault.edge_set) return plan;
  const int k = *fault.edge_set;
  struct Move {
    int depth;
    ReconfigStep step;
    int donor;
  };
  std::vector<Move> moves;
  for (int v : fault.affected) {
    if (topo.unrecoverable.count(v)) continue;
    const int cur = topo.active.at(v);
    if (cur != k && topo.path(v, cur)) continue;  // already served elsewhere
    std::optional<int> target;
    for (int kk = 1; kk <= topo.redundancy && !target; ++kk)
      if (kk != k && topo.path(v, kk)) target = kk;
    if (!target) {
      plan.unrecoverable.push_back(v);
      continue;
    }
    const auto path = *topo.path(v, *target);
    moves.push_back({topo.depth[*target - 1].at(v),
                     {v, topo.parent_of(v, cur), topo.parent_of(v, *target), cur, *target},
                     path.back().first});
  }
  // An affected node that is another's backup parent switches first.
  std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) {
    return a.depth != b.depth ? a.depth < b.depth : a.step.node < b.step.node;
  });
  for (const auto& m : moves) {
    plan.steps.push_back(m.step);
    plan.routes.push_back({m.step.node, m.donor});
    topo.active[m.step.node] = m.step.new_edge_set;
  }
  for (int v : plan.unrecoverable) topo.unrecoverable.insert(v);
  return plan;
}

/// Clears a failure. Nodes stay on the edge-set they moved to.
inline void repair(MultiTreeTopology& topo, Edge edge) {
  topo.failed.erase(undirected(edge));
  for (auto it = topo.unrecoverable.begin(); it != topo.unrecoverable.end();) {
    const int v = *it;
    std::optional<int> ok;
    for (int k = 1; k <= topo.redundancy && !ok; ++k)
      if (topo.path(v, k)) ok = k;
    if (ok) {
      topo.active[v] = *ok;
      it = topo.unrecoverable.erase(it);
    } else {
      ++it;
    }
  }
}

struct RecoveryReport {
  std::vector<int> unrecoverable;
  std::vector<int> disconnected;    // not flagged, yet no intact active path
  std::vector<int> too_deep;        // active path longer than D
  std::vector<Edge> overloaded;     // active load above airtime * capacity
  std::vector<int> over_failed;     // active path crosses a failed link

  bool ok() const {
    return unrecoverable.empty() && disconnected.empty() && too_deep.empty() && overloaded.empty() &&
           over_failed.empty();
  }
};

/// Checks the topology as it stands: every node reaches a donor over its
/// active edge-set within D hops and the links it uses still carry the load.
inline RecoveryReport verify_recovery(const MultiTreeTopology& topo) {
  RecoveryReport rep;
  rep.unrecoverable.assign(topo.unrecoverable.begin(), topo.unrecoverable.end());
  std::map<Edge, double> load;
  for (int v : topo.node_ids) {
    if (topo.is_donor(v) || topo.unrecoverable.count(v)) continue;
    const int k = topo.active.at(v);
    std::vector<Edge> edges;
    bool crosses_failed = false, reached = false;
    for (int w = v; edges.size() <= topo.node_ids.size();) {
      if (topo.is_donor(w) && topo.donor_root.at(w) == k) {
        reached = true;
        break;
      }
      auto p = topo.parent_of(w, k);
      if (!p) break;
      edges.push_back({*p, w});
      if (topo.failed.count(undirected(edges.back()))) crosses_failed = true;
      w = *p;
    }
    if (crosses_failed) rep.over_failed.push_back(v);
    if (!reached || crosses_failed) {
      rep.disconnected.push_back(v);
      continue;
    }
    if (static_cast<int>(edges.size()) > topo.max_depth) rep.too_deep.push_back(v);
    for (const auto& e : edges) load[e] += topo.demand.at(v);
  }
  for (const auto& [e, l] : load) {
    const double a = topo.airtime.count(e) ? topo.airtime.at(e) : 0.0;
    const double cap = topo.capacity.count(e) ? topo.capacity.at(e) : 0.0;
    if (l > a * cap * (1.0 + 1e-6) + 1e-6) rep.overloaded.push_back(e);
  }
  return rep;
}

struct ScheduledFault {
  int tick = 0;
  Edge edge{};
};

/// Parses `[{"tick": 19, "edge": [1, 3]}, ...]`.
inline std::vector<ScheduledFault> parse_fault_schedule(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("fault schedule: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("fault schedule: top level must be an array");
  std::vector<ScheduledFault> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& f = doc[i];
    const std::string where = "fault schedule entry " + std::to_string(i);
    if (!f.is_object() || !f.contains("tick") || !f["tick"].is_number_integer() || f["tick"].get<int>() < 0)
      throw ParseError(where + ": 'tick' must be a non-negative integer");
    if (!f.contains("edge") || !f["edge"].is_array() || f["edge"].size() != 2 || !f["edge"][0].is_number_integer() ||
        !f["edge"][1].is_number_integer())
      throw ParseError(where + ": 'edge' must be a pair of node ids");
    out.push_back({f["tick"].get<int>(), {f["edge"][0].get<int>(), f["edge"][1].get<int>()}});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.tick < b.tick; });
  return out;
}

struct TraceOptions {
  double hop_latency_ms = 5.0;      // one way, per hop
  double switch_allowance_ms = 0.0;  // added per hop
  int ticks = -1;                    // < 0: last fault tick + 10, at least 30
};

struct TraceRow {
  int tick = 0;
  int node = 0;
  std::optional<int> hops;
  std::optional<double> rtt_ms;
  std::string state;  // donor | primary | backup | unrecoverable
};

/// Tick-by-tick hop count and RTT proxy of every node. Faults are applied
/// at the start of their tick and recovery is immediate.
inline std::vector<TraceRow> simulate_trace(MultiTreeTopology topo, const std::vector<ScheduledFault>& schedule,
                                            const TraceOptions& opt = {}) {
  if (opt.hop_latency_ms < 0.0 || opt.switch_allowance_ms < 0.0)
    throw ParameterError("latencies must be >= 0");
  int last = 0;
  for (const auto& f : schedule) last = std::max(last, f.tick);
  const int ticks = opt.ticks >= 0 ? opt.ticks : std::max(30, last + 10);
  std::map<int, int> initial = topo.active;
  std::vector<TraceRow> rows;
  std::size_t next = 0;
  for (int t = 0; t < ticks; ++t) {
    topo.tick = t;
    while (next < schedule.size() && schedule[next].tick == t) {
      const auto ev = inject_failure(topo, schedule[next].edge);
      reconfigure(topo, ev);
      ++next;
    }
    for (int v : topo.node_ids) {
      TraceRow r{t, v};
      r.hops = topo.hops(v);
      if (r.hops) r.rtt_ms = *r.hops * (2.0 * opt.hop_latency_ms + opt.switch_allowance_ms);
      if (topo.is_donor(v)) r.state = "donor";
      else if (!r.hops) r.state = "unrecoverable";
      else r.state = topo.active.at(v) == initial.at(v) ? "primary" : "backup";
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  os << kTraceCsvHeader << "\n";
  for (const auto& r : rows) {
    os << r.tick << ',' << r.node << ',';
    if (r.hops) os << *r.hops;
    os << ',';
    if (r.rtt_ms) os << *r.rtt_ms;
    os << ',' << r.state << "\n";
  }
  return os.str();
}

}  // namespace iab
