#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ncpath/experiment_io.hpp"
#include "ncpath/sorkin.hpp"

namespace ncpath {

namespace detail {

/// Scientific notation with 17 significant digits: doubles round-trip
/// losslessly and the formatting is byte-stable across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace detail

inline constexpr const char* kScanCsvHeader =
    "y_detector_m,intensity_normalized,epsilon_full,epsilon_linear,kappa_full,kappa_linear,"
    "point_valid";

/// CSV rows in scan order, header included, newline-terminated.
inline void write_scan_csv(const SorkinScan& scan, std::ostream& out) {
  out << kScanCsvHeader << "\n";
  for (std::size_t i = 0; i < scan.y_values.size(); ++i) {
    out << detail::format_double(scan.y_values[i]) << ','
        << detail::format_double(scan.intensity_normalized[i]) << ','
        << detail::format_double(scan.epsilon_full[i]) << ','
        << detail::format_double(scan.epsilon_linear[i]) << ','
        << detail::format_double(scan.kappa_full[i]) << ','
        << detail::format_double(scan.kappa_linear[i]) << ','
        << static_cast<int>(scan.point_valid[i]) << "\n";
  }
}

inline void write_scan_csv(const SorkinScan& scan, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + path + "'");
  write_scan_csv(scan, out);
  if (!out) throw Error("write failure on '" + path + "'");
}

inline nlohmann::json quadrature_to_json(const QuadratureSpec& q) {
  return {{"points_per_cycle", q.points_per_cycle},
          {"rel_tolerance", q.rel_tolerance},
          {"max_refinements", q.max_refinements}};
}

inline nlohmann::json metadata_to_json(const ScanMetadata& m) {
  nlohmann::json j;
  j["tool_version"] = m.tool_version;
  if (!m.preset.empty()) j["preset"] = m.preset;
  j["resolved_config"] = setup_to_config_json(m.setup);
  j["quadrature"] = quadrature_to_json(m.quadrature);
  j["include_nonclassical"] = m.include_nonclassical;
  j["normalization"] = to_string(m.delta_mode);
  j["delta_y_m"] = m.delta_y;
  j["delta_from_empirical_max"] = m.delta_from_empirical_max;
  j["mirror_symmetric"] = m.mirror_symmetric;
  j["intensity_reference"] = m.intensity_reference;
  j["assumptions"] = m.assumptions;
  nlohmann::json invalid = nlohmann::json::array();
  for (const auto& [index, message] : m.invalid_points) {
    invalid.push_back({{"index", index}, {"message", message}});
  }
  j["invalid_points"] = invalid;
  return j;
}

/// JSON mirror of SorkinScan, one key per field. NaNs of invalid points
/// serialize as null.
inline nlohmann::json scan_to_json(const SorkinScan& scan) {
  nlohmann::json j;
  j["y_values_m"] = scan.y_values;
  j["intensity_normalized"] = scan.intensity_normalized;
  j["epsilon_full"] = scan.epsilon_full;
  j["epsilon_linear"] = scan.epsilon_linear;
  j["kappa_full"] = scan.kappa_full;
  j["kappa_linear"] = scan.kappa_linear;
  j["point_valid"] = scan.point_valid;
  j["delta"] = scan.delta;
  j["metadata"] = metadata_to_json(scan.metadata);
  return j;
}

}  // namespace ncpath
