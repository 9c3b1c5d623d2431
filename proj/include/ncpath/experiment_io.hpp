#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ncpath/experiment.hpp"

namespace ncpath {

/// Configuration-file schema (JSON):
///
///   wavelength_m         required
///   slit_centers_m       list, or slit_spacing_m -> centers {-d, 0, +d}
///   slit_width_m         required
///   slit_half_height_m   number or "inf" (default "inf")
///   source_distance_m    required
///   screen_distance_m    required
///   source_offset_m      default 0
///   apply_inclination_factor   default true
///   include_z_factor           default false
///   include_global_prefactor   default false

inline nlohmann::json setup_to_config_json(const ExperimentSetup& s) {
  nlohmann::json j;
  j["wavelength_m"] = s.beam.wavelength();
  j["slit_centers_m"] = s.geometry.centers;
  j["slit_width_m"] = s.geometry.width;
  if (std::isinf(s.geometry.height_half)) {
    j["slit_half_height_m"] = "inf";
  } else {
    j["slit_half_height_m"] = s.geometry.height_half;
  }
  j["source_distance_m"] = s.source_distance;
  j["screen_distance_m"] = s.screen_distance;
  j["source_offset_m"] = s.source_offset;
  j["apply_inclination_factor"] = s.apply_inclination_factor;
  j["include_z_factor"] = s.include_z_factor;
  j["include_global_prefactor"] = s.include_global_prefactor;
  return j;
}

inline ExperimentSetup setup_from_config_json(const nlohmann::json& j) {
  const auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key))
      throw ConfigParseError(std::string("config: missing key '") + key + "'");
    return j.at(key);
  };
  const auto number = [&](const nlohmann::json& v, const char* key) -> double {
    if (!v.is_number()) throw ConfigParseError(std::string("config: '") + key + "' must be a number");
    return v.get<double>();
  };

  ExperimentSetup s;
  const double lambda = number(need("wavelength_m"), "wavelength_m");
  if (!(lambda > 0.0)) throw ConfigParseError("config: wavelength_m must be > 0");
  s.beam.wavenumber = 2.0 * M_PI / lambda;
  s.beam.particle_label = Particle::other;

  const bool has_centers = j.contains("slit_centers_m");
  const bool has_spacing = j.contains("slit_spacing_m");
  if (has_centers == has_spacing)
    throw ConfigParseError("config: provide exactly one of slit_centers_m / slit_spacing_m");
  if (has_centers) {
    const auto& c = j.at("slit_centers_m");
    if (!c.is_array() || c.empty())
      throw ConfigParseError("config: slit_centers_m must be a non-empty list");
    for (const auto& v : c) s.geometry.centers.push_back(number(v, "slit_centers_m"));
  } else {
    const double d = number(j.at("slit_spacing_m"), "slit_spacing_m");
    s.geometry.centers = {-d, 0.0, d};
  }

  s.geometry.width = number(need("slit_width_m"), "slit_width_m");
  if (j.contains("slit_half_height_m")) {
    const auto& h = j.at("slit_half_height_m");
    if (h.is_string()) {
      const std::string hs = h.get<std::string>();
      if (hs != "inf" && hs != "infinity")
        throw ConfigParseError("config: slit_half_height_m string must be \"inf\"");
      s.geometry.height_half = kInfiniteHeight;
    } else {
      s.geometry.height_half = number(h, "slit_half_height_m");
    }
  }

  s.source_distance = number(need("source_distance_m"), "source_distance_m");
  s.screen_distance = number(need("screen_distance_m"), "screen_distance_m");
  if (j.contains("source_offset_m")) s.source_offset = number(j.at("source_offset_m"), "source_offset_m");
  if (j.contains("apply_inclination_factor"))
    s.apply_inclination_factor = j.at("apply_inclination_factor").get<bool>();
  if (j.contains("include_z_factor")) s.include_z_factor = j.at("include_z_factor").get<bool>();
  if (j.contains("include_global_prefactor"))
    s.include_global_prefactor = j.at("include_global_prefactor").get<bool>();
  return s;
}

/// Loads a setup from a config file. A metadata sidecar written by the CLI is
/// accepted too: its embedded "resolved_config" object is used.
inline ExperimentSetup load_setup_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError("config: parse failure in '" + path + "': " + e.what());
  }
  try {
    if (j.contains("resolved_config")) return setup_from_config_json(j.at("resolved_config"));
    return setup_from_config_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError("config: bad value in '" + path + "': " + e.what());
  }
}

}  // namespace ncpath
