#pragma once

// mmWave link budget: 3GPP TR 38.901 UMi street-canyon pathloss and LoS
// probability, single-dominant-ray beamforming SNR, MCS selection against a
// BLER target, and the NR downlink rate formula.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iabplan/errors.hpp"
#include "iabplan/rng.hpp"
#include "iabplan/scenario.hpp"

namespace iab {

struct RadioParams {
  double fc_ghz = 27.0;
  double bandwidth_mhz = 400.0;
  int rb_count = 132;
  int numerology = 3;
  double dl_slot_ratio = 0.7;
  double overhead = 0.18;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 7.0;
  std::pair<int, int> antenna_elems{8, 8};  // planar array, same at both ends
  int mimo_layers = 1;
  double tx_power_dbm = 33.0;
  double max_bler = 0.1;

  void validate() const {
    auto open01 = [](double v) { return v > 0.0 && v < 1.0; };
    if (!(fc_ghz > 0.0)) throw ParameterError("fc_ghz must be > 0");
    if (!(bandwidth_mhz > 0.0)) throw ParameterError("bandwidth_mhz must be > 0");
    if (rb_count <= 0) throw ParameterError("rb_count must be > 0");
    if (numerology < 0 || numerology > 6) throw ParameterError("numerology must be in 0..6");
    if (!open01(dl_slot_ratio)) throw ParameterError("dl_slot_ratio must be in (0, 1)");
    if (!open01(overhead)) throw ParameterError("overhead must be in (0, 1)");
    if (!open01(max_bler)) throw ParameterError("max_bler must be in (0, 1)");
    if (antenna_elems.first <= 0 || antenna_elems.second <= 0)
      throw ParameterError("antenna element counts must be > 0");
    if (mimo_layers <= 0) throw ParameterError("mimo_layers must be > 0");
  }

  int elements_per_array() const { return antenna_elems.first * antenna_elems.second; }

  /// Array gain of SVD beamforming on a single ray: N_tx * N_rx.
  double beamforming_gain_db() const {
    const double n = static_cast<double>(elements_per_array());
    return 10.0 * std::log10(n * n);
  }

  /// Thermal noise power N_0 + 10 log10(B) + N_f in dBm.
  double noise_floor_dbm() const {
    return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_mhz * 1e6) + noise_figure_db;
  }

  /// Average OFDM symbol duration: slot length at this numerology over 14 symbols.
  double symbol_duration_s() const { return (1e-3 / std::ldexp(1.0, numerology)) / 14.0; }
};

struct McsRow {
  double snr_db = 0.0;
  int mcs_index = 0;
  int modulation_order = 2;  // bits per symbol, Q
  double code_rate = 0.0;    // R
  double bler = 0.0;

  friend bool operator==(const McsRow&, const McsRow&) = default;
};

struct McsTable {
  std::vector<McsRow> rows;

  /// Rows must ascend in SNR, and among rows under the BLER target the MCS
  /// index must strictly increase with SNR.
  void validate(double max_bler = 0.1) const {
    if (rows.empty()) throw ParameterError("MCS table is empty");
    int last_mcs = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (i > 0 && r.snr_db < rows[i - 1].snr_db)
        throw ParameterError("MCS table rows must be sorted by snr_db");
      if (r.modulation_order <= 0 || !(r.code_rate > 0.0) || r.code_rate > 1.0)
        throw ParameterError("MCS row " + std::to_string(i) + " has invalid Q or code rate");
      if (r.bler < 0.0 || r.bler > 1.0)
        throw ParameterError("MCS row " + std::to_string(i) + " has invalid BLER");
      if (r.bler < max_bler) {
        if (r.mcs_index <= last_mcs)
          throw ParameterError("MCS index must increase with SNR (row " + std::to_string(i) + ")");
        last_mcs = r.mcs_index;
      }
    }
  }

  /// Four-row table used by the tests and the acceptance harness. Q and R
  /// are entries of the NR 256QAM MCS table (MCS 2, 10, 19, 27).
  static McsTable synthetic4() {
    return McsTable{{
        {1.0, 2, 2, 308.0 / 1024.0, 0.05},
        {9.0, 10, 4, 658.0 / 1024.0, 0.05},
        {17.0, 19, 6, 873.0 / 1024.0, 0.05},
        {24.0, 27, 8, 948.0 / 1024.0, 0.05},
    }};
  }
};

/// Parses `snr_db,mcs_index,modulation_order,code_rate,bler` CSV (header required).
inline McsTable parse_mcs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("MCS table: empty input");
  auto trim = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    return s;
  };
  if (trim(line) != "snr_db,mcs_index,modulation_order,code_rate,bler")
    throw ParseError("MCS table: unexpected header '" + line + "'");
  McsTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5)
      throw ParseError("MCS table line " + std::to_string(lineno) + ": expected 5 fields");
    try {
      McsRow r;
      r.snr_db = std::stod(cells[0]);
      r.mcs_index = std::stoi(cells[1]);
      r.modulation_order = std::stoi(cells[2]);
      r.code_rate = std::stod(cells[3]);
      r.bler = std::stod(cells[4]);
      table.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError("MCS table line " + std::to_string(lineno) + ": non-numeric field");
    }
  }
  try {
    table.validate();
  } catch (const ParameterError& e) {
    throw ParseError(std::string("MCS table: ") + e.what());
  }
  return table;
}

inline McsTable load_mcs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open MCS table '" + path + "'");
  return parse_mcs_csv(in);
}

/// UMi street-canyon pathloss in dB, distance in meters.
inline double pathloss_db(double distance_m, bool los, const RadioParams& params) {
  if (!(distance_m > 0.0)) throw ParameterError("distance must be > 0");
  const double pl_los = 32.4 + 21.0 * std::log10(distance_m) + 20.0 * std::log10(params.fc_ghz);
  if (los) return pl_los;
  const double pl_nlos = 22.4 + 35.3 * std::log10(distance_m) + 21.3 * std::log10(params.fc_ghz);
  return std::max(pl_los, pl_nlos);
}

/// UMi outdoor LoS probability.
inline double los_probability(double distance_m) {
  if (!(distance_m > 0.0)) throw ParameterError("distance must be > 0");
  if (distance_m <= 18.0) return 1.0;
  return 18.0 / distance_m + std::exp(-distance_m / 36.0) * (1.0 - 18.0 / distance_m);
}

inline double link_snr_db(double pathloss, const RadioParams& params) {
  return params.tx_power_dbm - pathloss + params.beamforming_gain_db() - params.noise_floor_dbm();
}

/// Highest MCS whose BLER is under `max_bler` and whose threshold the SNR meets.
inline std::optional<McsRow> select_mcs(double snr_db, const McsTable& table, double max_bler) {
  std::optional<McsRow> best;
  for (const auto& r : table.rows) {
    if (r.bler >= max_bler || snr_db < r.snr_db) continue;
    if (!best || r.mcs_index > best->mcs_index) best = r;
  }
  return best;
}

/// Downlink rate in Mb/s for the given MCS.
inline double link_capacity_mbps(const McsRow& mcs, const RadioParams& params) {
  const double re_per_second = 12.0 * params.rb_count / params.symbol_duration_s();
  return params.mimo_layers * mcs.modulation_order * mcs.code_rate * re_per_second *
         (1.0 - params.overhead) * params.dl_slot_ratio / 1e6;
}

inline double link_capacity_mbps(const std::optional<McsRow>& mcs, const RadioParams& params) {
  return mcs ? link_capacity_mbps(*mcs, params) : 0.0;
}

/// LoS draw for the unordered pair {a, b}; depends only on (seed, min, max).
inline bool draw_los(std::uint64_t seed, int a, int b, double distance_m) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  std::mt19937_64 gen(detail::mix64(seed, lo, hi));
  return detail::unit_uniform(gen) < los_probability(distance_m);
}

/// Fills in candidate edges for every ordered node pair with a feasible MCS.
/// Any existing edges are replaced. Distances below 1 m are clamped to 1 m.
inline ScenarioGraph populate_edges(ScenarioGraph graph, const RadioParams& params,
                                    const McsTable& table, std::uint64_t seed) {
  params.validate();
  table.validate(params.max_bler);
  graph.edges.clear();
  const auto& nodes = graph.nodes;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const double d = std::max(1.0, distance_3d(nodes[a].position, nodes[b].position));
      const bool los = draw_los(seed, nodes[a].id, nodes[b].id, d);
      const double snr = link_snr_db(pathloss_db(d, los, params), params);
      const auto mcs = select_mcs(snr, table, params.max_bler);
      if (!mcs) continue;
      const double cap = link_capacity_mbps(*mcs, params);
      graph.edges.push_back({nodes[a].id, nodes[b].id, snr, cap});
      graph.edges.push_back({nodes[b].id, nodes[a].id, snr, cap});
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end(), [](const auto& x, const auto& y) {
    return std::pair(x.src, x.dst) < std::pair(y.src, y.dst);
  });
  return graph;
}

}  // namespace iab
