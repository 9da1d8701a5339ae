#pragma once

// Solver-agnostic mixed-ILP for donor-minimizing R-redundant backhaul
// multitrees with multi-commodity flow.
//
// Variables (k is 1-based in names):
//   u[i,l,k]   binary   node i sits at hop distance l in a tree of edge-set k
//   P[i,j,k]   binary   edge i->j is active in edge-set k
//   f[i,j,h,k] >= 0     flow destined to h on edge i->j in edge-set k
//   a[i,j]     [0,1]    airtime fraction of edge i->j

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iabplan/errors.hpp"
#include "iabplan/scenario.hpp"

namespace iab {

enum class VarKind { U, P, F, A };

struct VariableRef {
  VarKind kind = VarKind::U;
  // Node ids (not positions). Unused fields are -1.
  int i = -1;
  int j = -1;
  int h = -1;
  int level = -1;
  int k = -1;

  bool is_binary() const { return kind == VarKind::U || kind == VarKind::P; }

  std::string name() const {
    auto s = [](int v) { return std::to_string(v); };
    switch (kind) {
      case VarKind::U: return "u[" + s(i) + "," + s(level) + "," + s(k) + "]";
      case VarKind::P: return "P[" + s(i) + "," + s(j) + "," + s(k) + "]";
      case VarKind::F: return "f[" + s(i) + "," + s(j) + "," + s(h) + "," + s(k) + "]";
      case VarKind::A: return "a[" + s(i) + "," + s(j) + "]";
    }
    return {};
  }

  friend bool operator==(const VariableRef&, const VariableRef&) = default;
};

struct Variable {
  VariableRef ref;
  std::string name;
  double lower = 0.0;
  double upper = 1.0;  // +inf for flows
  bool integer = false;
};

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;    // family[indices]
  std::string family;  // rdist, rsingleroot, ...
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct ModelParams {
  int max_depth = 3;       // D
  int max_out_degree = 4;  // delta; sum_j P_ijk < delta
  int redundancy = 1;      // R
  std::optional<double> donor_capacity_mbps;  // C; defaults to total demand
  bool flow_enabled = true;
  bool airtime_per_node = true;

  void validate() const {
    if (max_depth < 0) throw ParameterError("max depth must be >= 0");
    if (max_out_degree < 1) throw ParameterError("out-degree bound must be >= 1");
    if (redundancy < 1) throw ParameterError("redundancy must be >= 1");
    if (donor_capacity_mbps && !(*donor_capacity_mbps > 0.0))
      throw ParameterError("donor capacity must be > 0");
  }
};

class MilpModel {
 public:
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;  // minimize
  ModelParams params;
  double donor_capacity = 0.0;  // resolved C
  std::vector<int> node_ids;
  std::vector<double> demands;  // d_i per node_ids entry; 0 without flow
  std::vector<std::pair<int, int>> edges;  // (src id, dst id), graph order
  std::vector<double> capacities;          // L of each edge, Mb/s

  int num_nodes() const { return static_cast<int>(node_ids.size()); }

  std::optional<int> find(const VariableRef& ref) const {
    auto it = index_.find(key(ref));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int u(int node, int level, int k) const { return must(VariableRef{VarKind::U, node, -1, -1, level, k}); }
  std::optional<int> p(int i, int j, int k) const { return find({VarKind::P, i, j, -1, -1, k}); }
  std::optional<int> f(int i, int j, int h, int k) const { return find({VarKind::F, i, j, h, -1, k}); }
  std::optional<int> a(int i, int j) const { return find({VarKind::A, i, j, -1, -1, -1}); }

  int add_variable(const VariableRef& ref, double lower, double upper, bool integer) {
    const int idx = static_cast<int>(variables.size());
    if (!index_.emplace(key(ref), idx).second)
      throw ConfigError("duplicate variable " + ref.name());
    variables.push_back({ref, ref.name(), lower, upper, integer});
    return idx;
  }

  std::size_t count(VarKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        variables.begin(), variables.end(), [&](const Variable& v) { return v.ref.kind == kind; }));
  }

  std::vector<std::string> families() const {
    std::vector<std::string> out;
    for (const auto& c : constraints)
      if (std::find(out.begin(), out.end(), c.family) == out.end()) out.push_back(c.family);
    return out;
  }

  /// One `name: lhs relop rhs` line per constraint, in construction order.
  std::string dump() const {
    std::ostringstream os;
    os << "min:";
    write_terms(os, objective);
    os << "\n";
    for (const auto& c : constraints) {
      os << c.name << ":";
      write_terms(os, c.terms);
      os << (c.sense == Sense::LessEqual ? " <= " : c.sense == Sense::GreaterEqual ? " >= " : " = ")
         << fmt(c.rhs) << "\n";
    }
    return os.str();
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
  }

 private:
  std::map<std::tuple<int, int, int, int, int, int>, int> index_;

  static std::tuple<int, int, int, int, int, int> key(const VariableRef& r) {
    return {static_cast<int>(r.kind), r.i, r.j, r.h, r.level, r.k};
  }

  int must(const VariableRef& ref) const {
    auto idx = find(ref);
    if (!idx) throw ParameterError("model has no variable " + ref.name());
    return *idx;
  }

  void write_terms(std::ostringstream& os, const std::vector<Term>& terms) const {
    if (terms.empty()) os << " 0";
    bool first = true;
    for (const auto& t : terms) {
      const double mag = std::abs(t.coef);
      os << (t.coef < 0 ? " - " : first ? " " : " + ");
      if (mag != 1.0) os << fmt(mag) << " ";
      os << variables[static_cast<std::size_t>(t.var)].name;
      first = false;
    }
  }
};

namespace detail {

inline std::string idx_name(const std::string& family, std::initializer_list<int> idx) {
  std::string s = family + "[";
  bool first = true;
  for (int v : idx) {
    if (!first) s += ",";
    s += std::to_string(v);
    first = false;
  }
  return s + "]";
}

inline void add_row(MilpModel& m, const std::string& family, std::initializer_list<int> idx,
                    std::vector<Term> terms, Sense sense, double rhs) {
  m.constraints.push_back({idx_name(family, idx), family, std::move(terms), sense, rhs});
}

}  // namespace detail

/// Builds the full constraint system over `graph`, which is expected to be
/// pruned already. Node demands are required when flow constraints are on.
inline MilpModel build_model(const ScenarioGraph& graph, const ModelParams& params) {
  params.validate();
  graph.check();
  if (params.flow_enabled && !graph.has_demands())
    throw ConfigError("flow constraints require node demands");

  using detail::add_row;
  MilpModel m;
  m.params = params;
  const int D = params.max_depth;
  const int R = params.redundancy;
  for (const auto& n : graph.nodes) {
    m.node_ids.push_back(n.id);
    m.demands.push_back(params.flow_enabled ? n.demand() : 0.0);
  }
  for (const auto& e : graph.edges) {
    m.edges.emplace_back(e.src, e.dst);
    m.capacities.push_back(e.capacity_mbps);
  }
  m.donor_capacity = params.donor_capacity_mbps.value_or(graph.total_demand());

  std::map<std::pair<int, int>, double> cap;
  for (const auto& e : graph.edges) cap[{e.src, e.dst}] = e.capacity_mbps;
  const auto& ids = m.node_ids;

  for (int i : ids)
    for (int k = 1; k <= R; ++k)
      for (int l = 0; l <= D; ++l) m.add_variable({VarKind::U, i, -1, -1, l, k}, 0.0, 1.0, true);
  for (const auto& [i, j] : m.edges)
    for (int k = 1; k <= R; ++k) m.add_variable({VarKind::P, i, j, -1, -1, k}, 0.0, 1.0, true);
  if (params.flow_enabled) {
    for (const auto& [i, j] : m.edges)
      for (int k = 1; k <= R; ++k)
        for (int h : ids) m.add_variable({VarKind::F, i, j, h, -1, k}, 0.0, HUGE_VAL, false);
    for (const auto& [i, j] : m.edges) m.add_variable({VarKind::A, i, j, -1, -1, -1}, 0.0, 1.0, false);
  }

  for (int i : ids)
    for (int k = 1; k <= R; ++k) m.objective.push_back({m.u(i, 0, k), 1.0});

  // Membership: one level per edge-set unless rooted in another edge-set.
  for (int i : ids) {
    for (int k = 1; k <= R; ++k) {
      std::vector<Term> t;
      for (int l = 0; l <= D; ++l) t.push_back({m.u(i, l, k), 1.0});
      for (int r = 1; r <= R; ++r)
        if (r != k) t.push_back({m.u(i, 0, r), 1.0});
      add_row(m, "rdist", {i, k}, std::move(t), Sense::Equal, 1.0);
    }
  }
  for (int i : ids) {
    std::vector<Term> t;
    for (int k = 1; k <= R; ++k) t.push_back({m.u(i, 0, k), 1.0});
    add_row(m, "rsingleroot", {i}, std::move(t), Sense::LessEqual, 1.0);
  }
  // Exactly one parent per edge-set for non-donors, none for donors.
  for (int j : ids) {
    for (int k = 1; k <= R; ++k) {
      std::vector<Term> t;
      for (const auto& [src, dst] : m.edges)
        if (dst == j) t.push_back({*m.p(src, dst, k), 1.0});
      for (int r = 1; r <= R; ++r) t.push_back({m.u(j, 0, r), 1.0});
      add_row(m, "rdonor", {j, k}, std::move(t), Sense::Equal, 1.0);
    }
  }
  // sum_j P_ijk < delta, i.e. <= delta - 1 on integers.
  for (int i : ids) {
    for (int k = 1; k <= R; ++k) {
      std::vector<Term> t;
      for (const auto& [src, dst] : m.edges)
        if (src == i) t.push_back({*m.p(src, dst, k), 1.0});
      if (t.empty()) continue;
      add_row(m, "rdeg", {i, k}, std::move(t), Sense::LessEqual,
              static_cast<double>(params.max_out_degree - 1));
    }
  }
  // P_ijk <= 1 - u_jlk + u_i(l-1)k
  for (const auto& [i, j] : m.edges)
    for (int k = 1; k <= R; ++k)
      for (int l = 1; l <= D; ++l)
        add_row(m, "rpath", {i, j, k, l},
                {{*m.p(i, j, k), 1.0}, {m.u(j, l, k), 1.0}, {m.u(i, l - 1, k), -1.0}},
                Sense::LessEqual, 1.0);
  // Only candidate edges carry P variables; e_ij = 1 on each of them.
  for (const auto& [i, j] : m.edges)
    for (int k = 1; k <= R; ++k)
      add_row(m, "rexist", {i, j, k}, {{*m.p(i, j, k), 1.0}}, Sense::LessEqual, 1.0);
  // Each undirected pair used once, in one direction and one edge-set.
  for (const auto& [i, j] : m.edges) {
    const bool reverse = cap.count({j, i}) > 0;
    if (reverse && j < i) continue;  // pair already emitted
    std::vector<Term> t;
    for (int k = 1; k <= R; ++k) t.push_back({*m.p(i, j, k), 1.0});
    if (reverse)
      for (int k = 1; k <= R; ++k) t.push_back({*m.p(j, i, k), 1.0});
    add_row(m, "rdir", {std::min(i, j), std::max(i, j)}, std::move(t), Sense::LessEqual, 1.0);
  }

  if (!params.flow_enabled) return m;

  std::map<int, double> demand;
  for (const auto& n : graph.nodes) demand[n.id] = n.demand();

  for (const auto& [i, j] : m.edges)
    for (int k = 1; k <= R; ++k)
      add_row(m, "noselfb", {i, j, k}, {{*m.f(i, j, i, k), 1.0}}, Sense::Equal, 0.0);
  // out - in(excluding own commodity) <= C * [donor]
  for (int i : ids) {
    for (int k = 1; k <= R; ++k) {
      std::vector<Term> t;
      for (const auto& [src, dst] : m.edges)
        if (src == i)
          for (int h : ids) t.push_back({*m.f(src, dst, h, k), 1.0});
      for (const auto& [src, dst] : m.edges)
        if (dst == i)
          for (int h : ids)
            if (h != i) t.push_back({*m.f(src, dst, h, k), -1.0});
      for (int r = 1; r <= R; ++r) t.push_back({m.u(i, 0, r), -m.donor_capacity});
      add_row(m, "flowconb", {i, k}, std::move(t), Sense::LessEqual, 0.0);
    }
  }
  // sum_j f_jiik + d_i * sum_h u_i0h >= d_i
  for (int i : ids) {
    const double d = demand[i];
    if (!(d > 0.0)) continue;
    for (int k = 1; k <= R; ++k) {
      std::vector<Term> t;
      for (const auto& [src, dst] : m.edges)
        if (dst == i) t.push_back({*m.f(src, dst, i, k), 1.0});
      for (int r = 1; r <= R; ++r) t.push_back({m.u(i, 0, r), d});
      add_row(m, "incflowb", {i, k}, std::move(t), Sense::GreaterEqual, d);
    }
  }
  for (const auto& [i, j] : m.edges) {
    std::vector<Term> t{{*m.a(i, j), 1.0}};
    for (int k = 1; k <= R; ++k) t.push_back({*m.p(i, j, k), -1.0});
    add_row(m, "maxusageb", {i, j}, std::move(t), Sense::LessEqual, 0.0);
  }
  for (int j : ids) {
    std::vector<Term> t;
    for (const auto& [src, dst] : m.edges)
      if (dst == j)
        for (int h : ids)
          for (int k = 1; k <= R; ++k) t.push_back({*m.f(src, dst, h, k), 1.0});
    if (t.empty()) continue;
    for (const auto& [src, dst] : m.edges)
      if (dst == j) t.push_back({*m.a(src, dst), -cap[{src, dst}]});
    add_row(m, "maxflowpernodeb", {j}, std::move(t), Sense::LessEqual, 0.0);
  }
  for (const auto& [i, j] : m.edges) {
    std::vector<Term> t;
    for (int h : ids)
      for (int k = 1; k <= R; ++k) t.push_back({*m.f(i, j, h, k), 1.0});
    t.push_back({*m.a(i, j), -cap[{i, j}]});
    add_row(m, "maxflowlinkb", {i, j}, std::move(t), Sense::LessEqual, 0.0);
  }
  for (const auto& [i, j] : m.edges)
    for (int h : ids)
      for (int k = 1; k <= R; ++k)
        add_row(m, "maxlinkflowb", {i, j, h, k},
                {{*m.f(i, j, h, k), 1.0}, {*m.p(i, j, k), -cap[{i, j}]}}, Sense::LessEqual, 0.0);
  // Single radio per node: airtime over all incident links sums to at most 1.
  if (params.airtime_per_node) {
    for (int v : ids) {
      std::vector<Term> t;
      for (const auto& [src, dst] : m.edges)
        if (src == v || dst == v) t.push_back({*m.a(src, dst), 1.0});
      if (t.empty()) continue;
      add_row(m, "airtime", {v}, std::move(t), Sense::LessEqual, 1.0);
    }
  }
  return m;
}

/// Brownfield pinning: forces sum_k u_i0k = 1 for each listed node.
inline MilpModel fix_donors(MilpModel model, const std::vector<int>& donor_ids) {
  for (int id : donor_ids) {
    if (std::find(model.node_ids.begin(), model.node_ids.end(), id) == model.node_ids.end())
      throw ParameterError("cannot pin unknown node " + std::to_string(id));
    std::vector<Term> t;
    for (int k = 1; k <= model.params.redundancy; ++k) t.push_back({model.u(id, 0, k), 1.0});
    detail::add_row(model, "fixdonor", {id}, std::move(t), Sense::Equal, 1.0);
  }
  return model;
}

/// Replaces the unit donor cost with cost_i * sum_k u_i0k. Nodes missing
/// from the map keep cost 1.
inline MilpModel weighted_objective(MilpModel model, const std::map<int, double>& cost_per_node) {
  for (const auto& [id, c] : cost_per_node) {
    if (!(c >= 0.0)) throw ParameterError("negative donor cost for node " + std::to_string(id));
    if (std::find(model.node_ids.begin(), model.node_ids.end(), id) == model.node_ids.end())
      throw ParameterError("cost given for unknown node " + std::to_string(id));
  }
  model.objective.clear();
  for (int i : model.node_ids) {
    auto it = cost_per_node.find(i);
    const double c = it == cost_per_node.end() ? 1.0 : it->second;
    for (int k = 1; k <= model.params.redundancy; ++k) model.objective.push_back({model.u(i, 0, k), c});
  }
  return model;
}

}  // namespace iab
