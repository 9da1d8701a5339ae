#pragma once

// Plan JSON. The model parameters travel with the plan so a scenario and a
// plan file are enough to re-validate it.
//
//   {"schema": "iabplan-plan/1",
//    "params": {"R": 2, "depth": 3, "out_degree": 4, "flow": true, "airtime_per_node": true},
//    "status": "optimal", "objective": 3, "gap": 0, "lower_bound": 3, "solve_time_s": 0.4,
//    "donors": [0, 4, 7],
//    "edge_sets": [[[0, 1], [1, 2]], [[4, 1], ...]],
//    "depths": [{"node": 1, "level": 1, "k": 1}, ...],
//    "flows": [{"i": 0, "j": 1, "h": 1, "k": 1, "mbps": 558.2}, ...],
//    "airtime": [{"i": 0, "j": 1, "value": 0.74}, ...]}

#include <fstream>
#include <sstream>
#include <string>

#include "iabplan/errors.hpp"
#include "iabplan/model.hpp"
#include "iabplan/solution.hpp"
#include "json.hpp"

namespace iab {

inline constexpr const char* kPlanSchemaVersion = "iabplan-plan/1";

inline nlohmann::ordered_json plan_to_json(const Solution& s, const ModelParams& p) {
  nlohmann::ordered_json doc;
  doc["schema"] = kPlanSchemaVersion;
  nlohmann::ordered_json params;
  params["R"] = p.redundancy;
  params["depth"] = p.max_depth;
  params["out_degree"] = p.max_out_degree;
  params["flow"] = p.flow_enabled;
  params["airtime_per_node"] = p.airtime_per_node;
  if (p.donor_capacity_mbps) params["donor_capacity_mbps"] = *p.donor_capacity_mbps;
  doc["params"] = params;
  doc["status"] = to_string(s.status);
  doc["objective"] = s.objective;
  doc["gap"] = std::isfinite(s.gap) ? nlohmann::ordered_json(s.gap) : nlohmann::ordered_json(nullptr);
  doc["lower_bound"] = s.lower_bound;
  doc["solve_time_s"] = s.solve_time_s;
  doc["donors"] = s.donor_set;
  auto sets = nlohmann::ordered_json::array();
  for (const auto& es : s.active_edges) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [i, j] : es) arr.push_back({i, j});
    sets.push_back(arr);
  }
  doc["edge_sets"] = sets;
  auto depths = nlohmann::ordered_json::array();
  for (const auto& d : s.depths) depths.push_back({{"node", d.node}, {"level", d.level}, {"k", d.k}});
  doc["depths"] = depths;
  auto flows = nlohmann::ordered_json::array();
  for (const auto& [key, v] : s.flows) {
    const auto [i, j, h, k] = key;
    flows.push_back({{"i", i}, {"j", j}, {"h", h}, {"k", k}, {"mbps", v}});
  }
  doc["flows"] = flows;
  auto air = nlohmann::ordered_json::array();
  for (const auto& [e, v] : s.airtime) air.push_back({{"i", e.first}, {"j", e.second}, {"value", v}});
  doc["airtime"] = air;
  return doc;
}

struct PlanFile {
  Solution solution;
  ModelParams params;
};

inline PlanFile plan_from_json(const nlohmann::json& doc) {
  auto fail = [](const std::string& why) -> void { throw ParseError("plan: " + why); };
  try {
    if (!doc.is_object()) fail("top level must be an object");
    if (doc.value("schema", std::string()) != kPlanSchemaVersion) fail("unsupported or missing schema");
    PlanFile pf;
    const auto& p = doc.at("params");
    pf.params.redundancy = p.at("R").get<int>();
    pf.params.max_depth = p.at("depth").get<int>();
    pf.params.max_out_degree = p.at("out_degree").get<int>();
    pf.params.flow_enabled = p.at("flow").get<bool>();
    pf.params.airtime_per_node = p.at("airtime_per_node").get<bool>();
    if (p.contains("donor_capacity_mbps")) pf.params.donor_capacity_mbps = p["donor_capacity_mbps"].get<double>();
    auto& s = pf.solution;
    const auto status = doc.at("status").get<std::string>();
    if (status == "optimal") s.status = SolveStatus::Optimal;
    else if (status == "feasible-gap") s.status = SolveStatus::FeasibleGap;
    else if (status == "infeasible") s.status = SolveStatus::Infeasible;
    else if (status == "timeout") s.status = SolveStatus::Timeout;
    else fail("unknown status '" + status + "'");
    s.objective = doc.at("objective").get<double>();
    s.gap = doc.at("gap").is_null() ? HUGE_VAL : doc["gap"].get<double>();
    s.lower_bound = doc.value("lower_bound", 0.0);
    s.solve_time_s = doc.value("solve_time_s", 0.0);
    s.donor_set = doc.at("donors").get<std::vector<int>>();
    for (const auto& es : doc.at("edge_sets")) {
      auto& out = s.active_edges.emplace_back();
      for (const auto& e : es) {
        if (!e.is_array() || e.size() != 2) fail("edges must be [src, dst] pairs");
        out.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
    }
    for (const auto& d : doc.at("depths"))
      s.depths.push_back({d.at("node").get<int>(), d.at("level").get<int>(), d.at("k").get<int>()});
    for (const auto& f : doc.at("flows"))
      s.flows[{f.at("i").get<int>(), f.at("j").get<int>(), f.at("h").get<int>(), f.at("k").get<int>()}] =
          f.at("mbps").get<double>();
    for (const auto& a : doc.at("airtime")) s.airtime[{a.at("i").get<int>(), a.at("j").get<int>()}] = a.at("value").get<double>();
    return pf;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
}

inline std::string dump_plan(const Solution& s, const ModelParams& p) { return plan_to_json(s, p).dump(2) + "\n"; }

inline PlanFile parse_plan(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  return plan_from_json(doc);
}

inline PlanFile load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str());
}

}  // namespace iab
