#pragma once

// Free-format MPS export of a MilpModel, and a reader for the same dialect
// (used for round-trip checks and by tests).

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iabplan/errors.hpp"
#include "iabplan/model.hpp"

namespace iab {

inline constexpr std::size_t kMpsMaxName = 255;
inline constexpr const char* kMpsObjectiveRow = "obj";

/// MPS names of a model's rows and columns, in model order.
struct MpsNames {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
};

namespace detail {

// Free MPS names are whitespace-delimited tokens. Anything outside a
// conservative character set becomes '_', long names are cut, and clashes
// get a "~N" suffix.
class MpsNamer {
 public:
  std::string operator()(const std::string& raw) {
    std::string s;
    for (char c : raw) {
      const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '[' || c == ']' ||
                      c == ',' || c == '.' || c == '-';
      s.push_back(ok ? c : '_');
    }
    if (s.empty() || s[0] == '$' || s[0] == '*') s.insert(s.begin(), '_');
    if (s.size() > kMpsMaxName) s.resize(kMpsMaxName);
    if (used_.insert(s).second) return s;
    for (int n = 1;; ++n) {
      const std::string suffix = "~" + std::to_string(n);
      std::string t = s.substr(0, std::min(s.size(), kMpsMaxName - suffix.size())) + suffix;
      if (used_.insert(t).second) return t;
    }
  }

  void reserve(const std::string& name) { used_.insert(name); }

 private:
  std::set<std::string> used_;
};

inline std::string mps_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

inline MpsNames mps_names(const MilpModel& model) {
  MpsNames names;
  detail::MpsNamer rows;
  rows.reserve(kMpsObjectiveRow);
  for (const auto& c : model.constraints) names.rows.push_back(rows(c.name));
  detail::MpsNamer cols;
  for (const auto& v : model.variables) names.cols.push_back(cols(v.name));
  return names;
}

inline void write_mps(const MilpModel& model, std::ostream& os, const std::string& name = "IABPLAN") {
  const auto names = mps_names(model);
  const std::size_t nv = model.variables.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> col(nv);  // (row index + 1, coef); 0 = objective
  for (const auto& t : model.objective) col[t.var].emplace_back(0, t.coef);
  for (std::size_t r = 0; r < model.constraints.size(); ++r)
    for (const auto& t : model.constraints[r].terms) col[t.var].emplace_back(r + 1, t.coef);
  auto row_name = [&](std::size_t r) { return r == 0 ? std::string(kMpsObjectiveRow) : names.rows[r - 1]; };

  os << "NAME " << name << "\n";
  os << "ROWS\n";
  os << " N " << kMpsObjectiveRow << "\n";
  for (std::size_t r = 0; r < model.constraints.size(); ++r) {
    const char* t = model.constraints[r].sense == Sense::LessEqual ? "L"
                    : model.constraints[r].sense == Sense::Equal   ? "E"
                                                                    : "G";
    os << " " << t << " " << names.rows[r] << "\n";
  }
  os << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    const bool integer = model.variables[j].integer;
    if (integer != in_int) {
      os << " MARKER" << marker++ << " 'MARKER' " << (integer ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = integer;
    }
    if (col[j].empty()) {
      // Keep the column declared even without coefficients.
      os << " " << names.cols[j] << " " << kMpsObjectiveRow << " 0\n";
      continue;
    }
    for (const auto& [r, a] : col[j]) os << " " << names.cols[j] << " " << row_name(r) << " " << detail::mps_num(a) << "\n";
  }
  if (in_int) os << " MARKER" << marker++ << " 'MARKER' 'INTEND'\n";
  os << "RHS\n";
  for (std::size_t r = 0; r < model.constraints.size(); ++r)
    if (model.constraints[r].rhs != 0.0)
      os << " RHS " << names.rows[r] << " " << detail::mps_num(model.constraints[r].rhs) << "\n";
  os << "RANGES\n";
  os << "BOUNDS\n";
  for (std::size_t j = 0; j < nv; ++j) {
    const auto& v = model.variables[j];
    const auto& n = names.cols[j];
    if (v.integer && v.lower == 0.0 && v.upper == 1.0) {
      os << " BV BND " << n << "\n";
      continue;
    }
    if (v.lower == v.upper) {
      os << " FX BND " << n << " " << detail::mps_num(v.lower) << "\n";
      continue;
    }
    if (v.lower != 0.0) {
      if (std::isinf(v.lower)) os << " MI BND " << n << "\n";
      else os << " LO BND " << n << " " << detail::mps_num(v.lower) << "\n";
    }
    if (!std::isinf(v.upper)) os << " UP BND " << n << " " << detail::mps_num(v.upper) << "\n";
  }
  os << "ENDATA\n";
}

inline void export_mps(const MilpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_mps(model, out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// Parsed free MPS. Coefficients are keyed by (row name, column name).
struct MpsData {
  std::string name;
  std::string objective_row;
  std::vector<std::pair<std::string, char>> rows;  // (name, N/L/G/E), objective excluded
  std::vector<std::string> cols;
  std::set<std::string> integer_cols;
  std::map<std::pair<std::string, std::string>, double> coef;
  std::map<std::string, double> rhs;
  std::map<std::string, double> range;
  std::map<std::string, double> lower, upper;  // explicit bounds only
};

inline MpsData read_mps(std::istream& in) {
  MpsData d;
  std::string line, section;
  std::set<std::string> row_names, col_names;
  bool in_int = false;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("MPS line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      section = tok[0];
      if (section == "NAME") d.name = tok.size() > 1 ? tok[1] : "";
      else if (section == "ENDATA") break;
      else if (section != "ROWS" && section != "COLUMNS" && section != "RHS" && section != "RANGES" &&
               section != "BOUNDS")
        fail("unknown section " + section);
      continue;
    }
    auto num = [&](const std::string& s) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) fail("bad number '" + s + "'");
        return v;
      } catch (const std::logic_error&) {
        fail("bad number '" + s + "'");
      }
      return 0.0;
    };
    if (section == "ROWS") {
      if (tok.size() != 2 || tok[0].size() != 1) fail("malformed row");
      const char t = tok[0][0];
      if (t == 'N') {
        if (d.objective_row.empty()) d.objective_row = tok[1];
      } else if (t == 'L' || t == 'G' || t == 'E') {
        d.rows.emplace_back(tok[1], t);
      } else {
        fail("unknown row type");
      }
      row_names.insert(tok[1]);
    } else if (section == "COLUMNS") {
      if (tok.size() == 3 && tok[1] == "'MARKER'") {
        if (tok[2] == "'INTORG'") in_int = true;
        else if (tok[2] == "'INTEND'") in_int = false;
        else fail("unknown marker");
        continue;
      }
      if (tok.size() != 3 && tok.size() != 5) fail("malformed column entry");
      const auto& c = tok[0];
      if (col_names.insert(c).second) d.cols.push_back(c);
      if (in_int) d.integer_cols.insert(c);
      for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
        if (!row_names.count(tok[k])) fail("unknown row " + tok[k]);
        const double v = num(tok[k + 1]);
        if (v != 0.0 || tok[k] != d.objective_row) d.coef[{tok[k], c}] += v;
      }
    } else if (section == "RHS" || section == "RANGES") {
      if (tok.size() != 3 && tok.size() != 5) fail("malformed " + section + " entry");
      for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
        if (!row_names.count(tok[k])) fail("unknown row " + tok[k]);
        (section == "RHS" ? d.rhs : d.range)[tok[k]] = num(tok[k + 1]);
      }
    } else if (section == "BOUNDS") {
      if (tok.size() < 3) fail("malformed bound");
      const auto& type = tok[0];
      const auto& c = tok[2];
      if (!col_names.count(c)) fail("unknown column " + c);
      const double inf = std::numeric_limits<double>::infinity();
      if (type == "BV") {
        d.lower[c] = 0.0;
        d.upper[c] = 1.0;
        d.integer_cols.insert(c);
      } else if (type == "FR") {
        d.lower[c] = -inf;
        d.upper[c] = inf;
      } else if (type == "MI") {
        d.lower[c] = -inf;
      } else if (type == "PL") {
        d.upper[c] = inf;
      } else {
        if (tok.size() != 4) fail("bound without value");
        const double v = num(tok[3]);
        if (type == "UP") d.upper[c] = v;
        else if (type == "LO") d.lower[c] = v;
        else if (type == "FX") d.lower[c] = d.upper[c] = v;
        else fail("unknown bound type " + type);
      }
    } else {
      fail("data outside a section");
    }
  }
  if (d.objective_row.empty()) throw ParseError("MPS: no objective row");
  return d;
}

inline MpsData read_mps_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open MPS file '" + path + "'");
  return read_mps(in);
}

}  // namespace iab
