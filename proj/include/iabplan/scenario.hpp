#pragma once

// Deployment graphs: gNB placement, coverage sampling, demand estimation and
// candidate-edge pruning.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "iabplan/errors.hpp"
#include "iabplan/rng.hpp"

namespace iab {

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance_2d(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance_3d(const Position& a, const Position& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

struct Gnb {
  int id = 0;
  Position position;
  std::optional<double> demand_mbps;  // unset until estimated or loaded
  bool fixed_donor = false;           // brownfield pin

  double demand() const { return demand_mbps.value_or(0.0); }

  friend bool operator==(const Gnb&, const Gnb&) = default;
};

/// Directed candidate backhaul link src -> dst.
struct CandidateEdge {
  int src = 0;
  int dst = 0;
  double snr_db = 0.0;
  double capacity_mbps = 0.0;

  friend bool operator==(const CandidateEdge&, const CandidateEdge&) = default;
};

struct ScenarioGraph {
  std::vector<Gnb> nodes;
  std::vector<CandidateEdge> edges;
  double lambda_mbps = 1000.0;
  double area_km2 = 0.0;

  std::optional<std::size_t> index_of(int id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].id == id) return i;
    return std::nullopt;
  }

  const Gnb& node(int id) const {
    auto idx = index_of(id);
    if (!idx) throw ParameterError("unknown node id " + std::to_string(id));
    return nodes[*idx];
  }

  const CandidateEdge* find_edge(int src, int dst) const {
    for (const auto& e : edges)
      if (e.src == src && e.dst == dst) return &e;
    return nullptr;
  }

  bool has_demands() const {
    return std::all_of(nodes.begin(), nodes.end(),
                       [](const Gnb& g) { return g.demand_mbps.has_value(); });
  }

  double total_demand() const {
    double s = 0.0;
    for (const auto& g : nodes) s += g.demand();
    return s;
  }

  /// Throws ParameterError when ids are duplicated, an edge is a self-loop,
  /// an ordered pair repeats, or an endpoint does not exist.
  void check() const {
    std::set<int> ids;
    for (const auto& g : nodes)
      if (!ids.insert(g.id).second)
        throw ParameterError("duplicate node id " + std::to_string(g.id));
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : edges) {
      if (!ids.count(e.src) || !ids.count(e.dst))
        throw ParameterError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                             " references a missing node");
      if (e.src == e.dst) throw ParameterError("self-loop edge on node " + std::to_string(e.src));
      if (!pairs.insert({e.src, e.dst}).second)
        throw ParameterError("duplicate edge " + std::to_string(e.src) + "->" +
                             std::to_string(e.dst));
      if (e.capacity_mbps < 0.0)
        throw ParameterError("negative capacity on edge " + std::to_string(e.src) + "->" +
                             std::to_string(e.dst));
    }
  }

  friend bool operator==(const ScenarioGraph&, const ScenarioGraph&) = default;
};

struct SyntheticOptions {
  double node_height_m = 10.0;
  double lambda_mbps = 1000.0;
};

/// Uniform random placement of `n` gNBs in a square of area n / density km^2.
/// Edges are left empty; see populate_edges().
inline ScenarioGraph generate_synthetic(int n, double density_per_km2, std::uint64_t seed,
                                        const SyntheticOptions& opts = {}) {
  if (n < 1) throw ParameterError("node count must be >= 1");
  if (!(density_per_km2 > 0.0)) throw ParameterError("density must be > 0");
  if (!(opts.node_height_m >= 0.0)) throw ParameterError("node height must be >= 0");

  ScenarioGraph g;
  g.lambda_mbps = opts.lambda_mbps;
  g.area_km2 = static_cast<double>(n) / density_per_km2;
  const double side_m = std::sqrt(g.area_km2) * 1000.0;

  std::mt19937_64 gen(detail::mix64(seed, 0x5ce7a410ULL));
  g.nodes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Gnb node;
    node.id = i;
    node.position.x = detail::unit_uniform(gen) * side_m;
    node.position.y = detail::unit_uniform(gen) * side_m;
    node.position.z = opts.node_height_m;
    g.nodes.push_back(node);
  }
  return g;
}

/// Ground points sampled on a regular grid and the coverage set of each gNB.
struct CoverageGrid {
  double resolution_m = 1.0;
  std::vector<std::pair<std::int64_t, std::int64_t>> cells;  // integer cell keys
  std::vector<int> multiplicity;                             // m_{x,y}, parallel to cells
  std::vector<int> node_ids;
  std::vector<std::vector<std::uint32_t>> coverage;  // per node: indices into cells

  std::size_t point_count() const { return cells.size(); }
};

/// 2D disc coverage: a cell belongs to node i iff its center lies within
/// `radius_m` of the node (boundary inclusive).
inline CoverageGrid sample_coverage(const ScenarioGraph& graph, double radius_m,
                                    double resolution_m = 1.0) {
  if (!(radius_m > 0.0)) throw ParameterError("coverage radius must be > 0");
  if (!(resolution_m > 0.0)) throw ParameterError("grid resolution must be > 0");

  CoverageGrid grid;
  grid.resolution_m = resolution_m;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  auto key = [](std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  };
  const double r2 = radius_m * radius_m;

  for (const auto& node : graph.nodes) {
    grid.node_ids.push_back(node.id);
    auto& sigma = grid.coverage.emplace_back();
    const double px = node.position.x, py = node.position.y;
    const auto x0 = static_cast<std::int64_t>(std::floor((px - radius_m) / resolution_m));
    const auto x1 = static_cast<std::int64_t>(std::floor((px + radius_m) / resolution_m));
    const auto y0 = static_cast<std::int64_t>(std::floor((py - radius_m) / resolution_m));
    const auto y1 = static_cast<std::int64_t>(std::floor((py + radius_m) / resolution_m));
    for (auto cx = x0; cx <= x1; ++cx) {
      const double dx = (static_cast<double>(cx) + 0.5) * resolution_m - px;
      for (auto cy = y0; cy <= y1; ++cy) {
        const double dy = (static_cast<double>(cy) + 0.5) * resolution_m - py;
        if (dx * dx + dy * dy > r2) continue;
        auto [it, inserted] = index.try_emplace(key(cx, cy), static_cast<std::uint32_t>(grid.cells.size()));
        if (inserted) {
          grid.cells.emplace_back(cx, cy);
          grid.multiplicity.push_back(0);
        }
        ++grid.multiplicity[it->second];
        sigma.push_back(it->second);
      }
    }
  }
  return grid;
}

struct DemandMap {
  std::map<int, double> demand_mbps;
  std::vector<int> empty_coverage;  // nodes assigned lambda because they cover no point
};

/// d_i = |sigma_i| * lambda / sum_{p in sigma_i} m_p.
inline DemandMap estimate_demand(const CoverageGrid& grid, double lambda_mbps) {
  DemandMap out;
  for (std::size_t i = 0; i < grid.node_ids.size(); ++i) {
    const auto& sigma = grid.coverage[i];
    const int id = grid.node_ids[i];
    if (sigma.empty()) {
      std::clog << "warning: node " << id << " covers no sampled point, demand set to lambda\n";
      out.empty_coverage.push_back(id);
      out.demand_mbps[id] = lambda_mbps;
      continue;
    }
    std::int64_t weight = 0;
    for (auto p : sigma) weight += grid.multiplicity[p];
    out.demand_mbps[id] =
        static_cast<double>(sigma.size()) * lambda_mbps / static_cast<double>(weight);
  }
  return out;
}

inline ScenarioGraph apply_demand(ScenarioGraph graph, const DemandMap& demand) {
  for (auto& node : graph.nodes) {
    auto it = demand.demand_mbps.find(node.id);
    if (it != demand.demand_mbps.end()) node.demand_mbps = it->second;
  }
  return graph;
}

/// Drops every candidate edge whose capacity cannot carry the demand of its
/// destination (L_ij < d_j).
inline ScenarioGraph prune_edges(ScenarioGraph graph) {
  std::map<int, double> demand;
  for (const auto& n : graph.nodes) demand[n.id] = n.demand();
  std::erase_if(graph.edges, [&](const CandidateEdge& e) {
    auto it = demand.find(e.dst);
    return it != demand.end() && e.capacity_mbps < it->second;
  });
  return graph;
}

struct IsolationResult {
  ScenarioGraph graph;
  std::vector<int> removed;
  double uncovered_demand_mbps = 0.0;
};

/// Removes non-donor nodes without any incident candidate edge.
inline IsolationResult remove_isolated(ScenarioGraph graph) {
  std::set<int> touched;
  for (const auto& e : graph.edges) {
    touched.insert(e.src);
    touched.insert(e.dst);
  }
  IsolationResult out;
  std::vector<Gnb> kept;
  for (auto& node : graph.nodes) {
    if (node.fixed_donor || touched.count(node.id)) {
      kept.push_back(std::move(node));
    } else {
      out.removed.push_back(node.id);
      out.uncovered_demand_mbps += node.demand();
    }
  }
  graph.nodes = std::move(kept);
  out.graph = std::move(graph);
  return out;
}

}  // namespace iab
