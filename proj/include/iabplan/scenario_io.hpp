#pragma once

// Scenario JSON reading and writing.
//
//   {"lambda_mbps": 1000.0, "area_km2": 1.0,
//    "nodes": [{"id": 0, "x": 0.0, "y": 0.0, "z": 10.0, "demand_mbps": 714.29,
//               "fixed_donor": false}, ...],
//    "edges": [{"src": 0, "dst": 1, "snr_db": 47.0, "capacity_mbps": 754.2}, ...]}
//
// "demand_mbps" and "edges" are optional.

#include <fstream>
#include <sstream>
#include <string>

#include "iabplan/errors.hpp"
#include "iabplan/scenario.hpp"
#include "json.hpp"

namespace iab {

inline constexpr const char* kScenarioSchemaVersion = "iabplan-scenario/1";

namespace detail {

template <typename T>
T require(const nlohmann::json& obj, const char* field, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + field + "'");
  try {
    if constexpr (std::is_same_v<T, int>) {
      if (!it->is_number_integer()) throw ParseError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ParseError("");
    } else {
      if (!it->is_number()) throw ParseError("");
    }
    return it->get<T>();
  } catch (const std::exception&) {
    throw ParseError(where + ": field '" + field + "' has the wrong type");
  }
}

template <typename T>
T optional_field(const nlohmann::json& obj, const char* field, T fallback,
                 const std::string& where) {
  if (!obj.contains(field)) return fallback;
  return require<T>(obj, field, where);
}

}  // namespace detail

inline ScenarioGraph scenario_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("scenario: top level must be an object");
  ScenarioGraph g;
  g.lambda_mbps = detail::optional_field<double>(doc, "lambda_mbps", 1000.0, "scenario");
  g.area_km2 = detail::optional_field<double>(doc, "area_km2", 0.0, "scenario");
  if (!doc.contains("nodes") || !doc["nodes"].is_array())
    throw ParseError("scenario: missing field 'nodes' (array)");

  std::size_t idx = 0;
  for (const auto& jn : doc["nodes"]) {
    const std::string where = "nodes[" + std::to_string(idx++) + "]";
    Gnb n;
    n.id = detail::require<int>(jn, "id", where);
    n.position.x = detail::require<double>(jn, "x", where);
    n.position.y = detail::require<double>(jn, "y", where);
    n.position.z = detail::optional_field<double>(jn, "z", 10.0, where);
    if (jn.contains("demand_mbps") && !jn["demand_mbps"].is_null()) {
      n.demand_mbps = detail::require<double>(jn, "demand_mbps", where);
      if (*n.demand_mbps < 0.0) throw ParseError(where + ": field 'demand_mbps' is negative");
    }
    n.fixed_donor = detail::optional_field<bool>(jn, "fixed_donor", false, where);
    g.nodes.push_back(n);
  }

  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw ParseError("scenario: field 'edges' must be an array");
    idx = 0;
    for (const auto& je : doc["edges"]) {
      const std::string where = "edges[" + std::to_string(idx++) + "]";
      CandidateEdge e;
      e.src = detail::require<int>(je, "src", where);
      e.dst = detail::require<int>(je, "dst", where);
      e.snr_db = detail::optional_field<double>(je, "snr_db", 0.0, where);
      e.capacity_mbps = detail::require<double>(je, "capacity_mbps", where);
      if (!g.index_of(e.src)) throw ParseError(where + ": field 'src' names unknown node " + std::to_string(e.src));
      if (!g.index_of(e.dst)) throw ParseError(where + ": field 'dst' names unknown node " + std::to_string(e.dst));
      g.edges.push_back(e);
    }
  }

  try {
    g.check();
  } catch (const ParameterError& err) {
    throw ParseError(std::string("scenario: ") + err.what());
  }
  return g;
}

inline nlohmann::ordered_json scenario_to_json(const ScenarioGraph& g) {
  nlohmann::ordered_json doc;
  doc["lambda_mbps"] = g.lambda_mbps;
  doc["area_km2"] = g.area_km2;
  auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) {
    nlohmann::ordered_json jn;
    jn["id"] = n.id;
    jn["x"] = n.position.x;
    jn["y"] = n.position.y;
    jn["z"] = n.position.z;
    if (n.demand_mbps) jn["demand_mbps"] = *n.demand_mbps;
    jn["fixed_donor"] = n.fixed_donor;
    nodes.push_back(std::move(jn));
  }
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    nlohmann::ordered_json je;
    je["src"] = e.src;
    je["dst"] = e.dst;
    je["snr_db"] = e.snr_db;
    je["capacity_mbps"] = e.capacity_mbps;
    edges.push_back(std::move(je));
  }
  return doc;
}

inline ScenarioGraph parse_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(std::string("scenario: invalid JSON: ") + err.what());
  }
  return scenario_from_json(doc);
}

inline ScenarioGraph load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline std::string dump_scenario(const ScenarioGraph& g) { return scenario_to_json(g).dump(2) + "\n"; }

inline void save_scenario(const ScenarioGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file '" + path + "'");
  out << dump_scenario(g);
}

}  // namespace iab
