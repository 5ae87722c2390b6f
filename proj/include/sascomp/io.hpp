#ifndef SASCOMP_IO_HPP
#define SASCOMP_IO_HPP

// JSON and CSV serialisation of reports. Every JSON document written by the
// tools carries "schema": "sascomp/v1".

#include "sascomp/distops.hpp"
#include "sascomp/models.hpp"
#include "sascomp/types.hpp"
#include "sascomp/volume.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace sascomp {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "sascomp/v1";

/// JSON has no infinities or NaNs; they are written as strings.
inline Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline Json to_json(const Vec3& v) { return Json::array({number(v(0)), number(v(1)), number(v(2))}); }

inline Json to_json(const Mat3& m) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(to_json(Vec3(m.row(i).transpose())));
  return rows;
}

inline Json to_json(const ModelSpace& m) { return {{"kind", m.name()}, {"c", m.c}, {"k", m.k()}}; }

inline Json to_json(const ComparisonReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"label", s.label},
                       {"parameter", number(s.parameter)},
                       {"lhs", number(s.lhs)},
                       {"rhs", number(s.rhs)},
                       {"margin", number(s.margin)},
                       {"pass", s.pass}});
  return {{"name", r.name},
          {"pass", r.pass()},
          {"hypotheses_hold", r.hypotheses_hold},
          {"tolerance", r.tolerance},
          {"min_margin", number(r.min_margin())},
          {"notes", r.notes},
          {"samples", samples}};
}

inline Json to_json(const cut::CutReport& r) {
  return {{"r1", r.r1},
          {"r2", r.r2},
          {"r3", r.r3},
          {"argmin_r1", number(r.argmin_r1)},
          {"argmin_r2", number(r.argmin_r2)},
          {"argmin_r3", number(r.argmin_r3)},
          {"r2_error", r.r2_error},
          {"f1g_residual", r.f1g_residual},
          {"stationarity_residual", r.stationarity_residual},
          {"ordering_holds", r.ordering_holds},
          {"pass", r.pass}};
}

inline Json to_json(const BallVolumeResult& v) {
  return {{"model", to_json(v.model)},
          {"R", v.R},
          {"k", v.k},
          {"method", to_string(v.method)},
          {"volume", v.volume},
          {"error", v.error},
          {"excluded_points", v.excluded_points}};
}

inline Json to_json(const DistanceResult& d) {
  return {{"r", d.r},
          {"alpha", to_json(d.alpha)},
          {"alpha_end", to_json(d.alpha_end)},
          {"v0r", d.v0r},
          {"residual", d.residual},
          {"in_domain", d.in_domain},
          {"ambiguous", d.ambiguous}};
}

inline Json to_json(const HessianSample& s) {
  return {{"alpha", to_json(s.alpha)},
          {"r", s.r},
          {"v0r", s.v0r},
          {"fd", to_json(s.fd)},
          {"space_form", to_json(s.space_form)},
          {"entry_error", s.entry_error},
          {"symmetry_residual", s.symmetry_residual},
          {"trace_residual", s.trace_residual},
          {"laplacian_r_fd", s.laplacian_r_fd},
          {"laplacian_r_formula", s.laplacian_r_formula}};
}

/// A document skeleton: {"schema": ..., "command": ...}.
inline Json document(const std::string& command) { return {{"schema", kSchema}, {"command", command}}; }

/// Minimal CSV table with a fixed header; numbers use 17 significant digits.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row() {
    rows_.emplace_back();
    return *this;
  }
  CsvTable& operator<<(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    rows_.back().push_back(s.str());
    return *this;
  }
  CsvTable& operator<<(const std::string& v) {
    rows_.back().push_back(v);
    return *this;
  }
  CsvTable& operator<<(const char* v) { return *this << std::string(v); }

  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& os) const {
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
  }

  std::string str() const {
    std::ostringstream s;
    write(s);
    return s.str();
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        os << cells[i];
        continue;
      }
      os << '"';
      for (char ch : cells[i]) os << (ch == '"' ? "\"\"" : std::string(1, ch));
      os << '"';
    }
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes text to a file, creating parent directories.
inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot open " + path.string() + " for writing");
  f << text;
}

}  // namespace sascomp

#endif  // SASCOMP_IO_HPP
