// Command-line front end: loads a preset or config file, runs kappa scans,
// single-point reports and the analytic error budget, and writes CSV/JSON
// results plus a metadata sidecar suitable for exact reproduction.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncpath/ncpath.hpp"

namespace {

// Distinct exit codes per failure class.
enum ExitCode {
  kOk = 0,
  kUsageError = 2,
  kConfigParseError = 3,
  kValidationError = 4,
  kOutputError = 5,
  kNumericalError = 6,
};

struct Options {
  std::string preset;
  std::string config_path;
  std::vector<double> scan;  // y_min y_max n
  std::optional<double> point;
  std::string normalization = "central-max";
  std::string out_path;
  std::string format = "csv";
  double points_per_cycle = 0.0;  // 0 = library default
  double tolerance = 0.0;
  bool disable_nonclassical = false;
  bool no_inclination = false;
  bool include_z = false;
  bool errors = false;
  double metal_thickness_m = -1.0;   // <0 = default
  double metal_attenuation = -1.0;
};

nlohmann::json run_request_json(const Options& opt, const ncpath::QuadratureSpec& spec,
                                double y_min, double y_max, int n_points, bool is_point) {
  nlohmann::json run;
  run["mode"] = is_point ? "point" : "scan";
  if (is_point) {
    run["point_y_m"] = y_min;
  } else {
    run["y_min_m"] = y_min;
    run["y_max_m"] = y_max;
    run["n_points"] = n_points;
  }
  run["normalization"] = opt.normalization;
  run["format"] = opt.format;
  run["quadrature"] = ncpath::quadrature_to_json(spec);
  run["include_nonclassical"] = !opt.disable_nonclassical;
  return run;
}

void print_error_budget(const ncpath::ErrorBudget& b) {
  std::printf("error budget (relative):\n");
  std::printf("  metal transmission   %.6e\n", b.metal_transmission_rel);
  std::printf("  stationary phase     %.6e\n", b.stationary_phase_rel);
  std::printf("  Fraunhofer           %.6e\n", b.fraunhofer_rel);
  std::printf("  leading kappa error  %.6e\n", b.kappa_rel_leading);
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Sorkin-parameter scans for non-classical (looped) paths in multi-slit "
               "interference"};
  app.add_option("--preset", opt.preset, "photon | electron | microwave");
  app.add_option("--config", opt.config_path, "configuration file (JSON)");
  app.add_option("--scan", opt.scan, "Y_MIN Y_MAX N_POINTS (meters, count)")->expected(3);
  auto* point_opt = app.add_option("--point", opt.point, "single detector position (meters)");
  app.add_option("--normalization", opt.normalization, "central-max | interference-sum")
      ->check(CLI::IsMember({"central-max", "interference-sum"}));
  app.add_option("--out", opt.out_path, "output file path");
  app.add_option("--format", opt.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--points-per-cycle", opt.points_per_cycle, "mesh density per oscillation");
  app.add_option("--tolerance", opt.tolerance, "quadrature relative tolerance");
  app.add_flag("--disable-nonclassical", opt.disable_nonclassical,
               "suppress the two-crossing kernels");
  app.add_flag("--no-inclination-factor", opt.no_inclination,
               "drop the Kirchhoff 1/4 obliquity factor");
  app.add_flag("--include-z-factor", opt.include_z, "multiply kernels by the C_z factor");
  app.add_flag("--errors", opt.errors, "print the analytic error budget");
  app.add_option("--metal-thickness", opt.metal_thickness_m,
                 "mask thickness in meters for the metal-transmission estimate");
  app.add_option("--metal-attenuation", opt.metal_attenuation,
                 "imaginary refractive index for the metal-transmission estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kUsageError : kOk;
  }

  const bool has_preset = !opt.preset.empty();
  const bool has_config = !opt.config_path.empty();
  if (has_preset == has_config) {
    std::cerr << "usage error: provide exactly one of --preset / --config\n";
    return kUsageError;
  }

  try {
    // Resolve the setup and any run parameters embedded in a sidecar config.
    ncpath::ExperimentSetup setup;
    nlohmann::json embedded_run;
    if (has_preset) {
      setup = ncpath::preset(opt.preset);
    } else {
      setup = ncpath::load_setup_file(opt.config_path);
      std::ifstream in(opt.config_path);
      nlohmann::json doc;
      in >> doc;
      if (doc.contains("run")) embedded_run = doc.at("run");
    }
    if (opt.no_inclination) setup.apply_inclination_factor = false;
    if (opt.include_z) setup.include_z_factor = true;

    ncpath::QuadratureSpec spec;
    if (!embedded_run.is_null() && embedded_run.contains("quadrature")) {
      const auto& q = embedded_run.at("quadrature");
      spec.points_per_cycle = q.value("points_per_cycle", spec.points_per_cycle);
      spec.rel_tolerance = q.value("rel_tolerance", spec.rel_tolerance);
      spec.max_refinements = q.value("max_refinements", spec.max_refinements);
    }
    if (opt.points_per_cycle > 0.0) spec.points_per_cycle = opt.points_per_cycle;
    if (opt.tolerance > 0.0) spec.rel_tolerance = opt.tolerance;
    spec.validate();

    bool include_nonclassical = !opt.disable_nonclassical;
    if (!embedded_run.is_null() && embedded_run.contains("include_nonclassical") &&
        !opt.disable_nonclassical) {
      include_nonclassical = embedded_run.at("include_nonclassical").get<bool>();
    }

    // Fill scan/point from an embedded run section when not given on the line.
    if (opt.scan.empty() && !point_opt->count() && !embedded_run.is_null()) {
      if (embedded_run.value("mode", "") == "scan") {
        opt.scan = {embedded_run.at("y_min_m").get<double>(),
                    embedded_run.at("y_max_m").get<double>(),
                    static_cast<double>(embedded_run.at("n_points").get<int>())};
      } else if (embedded_run.value("mode", "") == "point") {
        opt.point = embedded_run.at("point_y_m").get<double>();
      }
      if (app.count("--normalization") == 0 && embedded_run.contains("normalization"))
        opt.normalization = embedded_run.at("normalization").get<std::string>();
      if (app.count("--format") == 0 && embedded_run.contains("format"))
        opt.format = embedded_run.at("format").get<std::string>();
    }

    const bool has_scan = !opt.scan.empty();
    const bool has_point = opt.point.has_value();
    if (has_scan && has_point) {
      std::cerr << "usage error: --scan and --point are mutually exclusive\n";
      return kUsageError;
    }
    if (!has_scan && !has_point && !opt.errors) {
      std::cerr << "usage error: nothing to do (need --scan, --point or --errors)\n";
      return kUsageError;
    }

    const ncpath::ValidatedSetup validated = ncpath::validate(setup);
    for (const auto& warning : validated.diagnostics().warnings) {
      std::cerr << "warning: " << warning << "\n";
    }

    ncpath::MaterialDefaults material;
    if (opt.metal_thickness_m >= 0.0) material.thickness_m = opt.metal_thickness_m;
    if (opt.metal_attenuation > 0.0) material.attenuation = opt.metal_attenuation;
    const ncpath::ErrorBudget budget = ncpath::error_budget(validated, material);

    if (opt.errors) {
      print_error_budget(budget);
      if (budget.fraunhofer_rel > 0.01) {
        std::printf("  note: Fraunhofer term %.3f is large for this geometry\n",
                    budget.fraunhofer_rel);
      }
      if (!has_scan && !has_point) return kOk;
    }

    const ncpath::DeltaMode mode = opt.normalization == "central-max"
                                       ? ncpath::DeltaMode::central_max
                                       : ncpath::DeltaMode::interference_sum;

    const auto t0 = std::chrono::steady_clock::now();
    ncpath::SorkinScan scan;
    if (has_scan) {
      const int n_points = static_cast<int>(opt.scan[2]);
      if (n_points < 2 || !(opt.scan[0] < opt.scan[1])) {
        std::cerr << "usage error: --scan needs y_min < y_max and n >= 2\n";
        return kUsageError;
      }
      scan = ncpath::kappa_scan(validated, opt.scan[0], opt.scan[1], n_points, mode, spec,
                                include_nonclassical);
    } else {
      // Single-point report assembled from one kernel bundle.
      const double y = *opt.point;
      const ncpath::KernelBundle b =
          ncpath::kernel_bundle(validated, y, spec, include_nonclassical);
      scan.y_values = {y};
      scan.epsilon_full = {ncpath::epsilon_full_from_bundle(b)};
      scan.epsilon_linear = {ncpath::epsilon_linear_from_bundle(b)};
      scan.delta = ncpath::delta(validated, mode, 0.0, spec, include_nonclassical);
      scan.kappa_full = {scan.epsilon_full[0] / scan.delta};
      scan.kappa_linear = {scan.epsilon_linear[0] / scan.delta};
      const double inten = std::norm(b.k_total_of(ncpath::SlitSubset::all(b.slit_count)));
      const double center =
          std::norm(ncpath::kernel_bundle(validated, 0.0, spec, include_nonclassical)
                        .k_total_of(ncpath::SlitSubset::all(b.slit_count)));
      scan.intensity_normalized = {inten / center};
      scan.point_valid = {1};
      scan.metadata.setup = setup;
      scan.metadata.quadrature = spec;
      scan.metadata.include_nonclassical = include_nonclassical;
      scan.metadata.delta_mode = mode;
      scan.metadata.mirror_symmetric = validated.mirror_symmetric();
      scan.metadata.intensity_reference = "|K^{ABC}(0)|^2";
    }
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();

    scan.metadata.tool_version = ncpath::kVersion;
    if (has_preset) {
      scan.metadata.preset = opt.preset;
      if (opt.preset == "microwave") {
        scan.metadata.assumptions.push_back(
            "source/screen distances L = D = 200 m are assumed; the published scenario "
            "states only wavelength, slit width and spacing");
      }
    }

    // Console summary.
    if (has_point) {
      std::printf("y = %.6e m\n", scan.y_values[0]);
      std::printf("kappa_full   = %+.6e\n", scan.kappa_full[0]);
      std::printf("kappa_linear = %+.6e\n", scan.kappa_linear[0]);
      std::printf("epsilon_full = %+.6e (delta = %.6e, arbitrary units)\n", scan.epsilon_full[0],
                  scan.delta);
      std::printf("I / I(0)     = %.6f\n", scan.intensity_normalized[0]);
    } else {
      double kappa_peak = 0.0;
      for (std::size_t i = 0; i < scan.kappa_full.size(); ++i) {
        if (scan.point_valid[i]) kappa_peak = std::max(kappa_peak, std::abs(scan.kappa_full[i]));
      }
      std::printf("scan: %zu points, peak |kappa| = %.6e, delta = %.6e, %.0f ms\n",
                  scan.y_values.size(), kappa_peak, scan.delta, wall_ms);
      if (!scan.metadata.invalid_points.empty()) {
        std::printf("  %zu point(s) failed to converge and are marked invalid\n",
                    scan.metadata.invalid_points.size());
      }
    }

    // Artifacts.
    if (!opt.out_path.empty()) {
      try {
        if (opt.format == "csv") {
          ncpath::write_scan_csv(scan, opt.out_path);
        } else {
          std::ofstream out(opt.out_path, std::ios::binary);
          if (!out) throw ncpath::Error("cannot open output file '" + opt.out_path + "'");
          out << ncpath::scan_to_json(scan).dump(2) << "\n";
          if (!out) throw ncpath::Error("write failure on '" + opt.out_path + "'");
        }

        nlohmann::json sidecar;
        sidecar["tool"] = "ncpath";
        sidecar["tool_version"] = ncpath::kVersion;
        sidecar["wall_clock_ms"] = wall_ms;
        sidecar["resolved_config"] = ncpath::setup_to_config_json(setup);
        sidecar["run"] = run_request_json(opt, spec, has_scan ? opt.scan[0] : *opt.point,
                                          has_scan ? opt.scan[1] : 0.0,
                                          has_scan ? static_cast<int>(opt.scan[2]) : 1, has_point);
        sidecar["error_budget"] = {{"metal_transmission_rel", budget.metal_transmission_rel},
                                   {"stationary_phase_rel", budget.stationary_phase_rel},
                                   {"fraunhofer_rel", budget.fraunhofer_rel},
                                   {"kappa_rel_leading", budget.kappa_rel_leading}};
        sidecar["scan_metadata"] = ncpath::metadata_to_json(scan.metadata);
        const std::string sidecar_path = opt.out_path + ".meta.json";
        std::ofstream meta(sidecar_path, std::ios::binary);
        if (!meta) throw ncpath::Error("cannot open sidecar '" + sidecar_path + "'");
        meta << sidecar.dump(2) << "\n";
        if (!meta) throw ncpath::Error("write failure on '" + sidecar_path + "'");
      } catch (const ncpath::Error& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kOutputError;
      }
    }
    return kOk;
  } catch (const ncpath::ConfigParseError& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return kConfigParseError;
  } catch (const ncpath::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const ncpath::DegenerateNormalizationError& e) {
    std::cerr << "normalization error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const ncpath::Error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  }
}
