#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <limits>
#include <sstream>

#include "ncpath/scan_io.hpp"

using namespace ncpath;

namespace {

SorkinScan tiny_scan() {
  SorkinScan s;
  s.y_values = {-1.5e-3, 0.0, 1.5e-3};
  s.intensity_normalized = {0.25, 1.0, 0.25};
  s.epsilon_full = {1.23456789012345e10, -9.87654321098765e9, 1.23456789012345e10};
  s.epsilon_linear = {1.2e10, -9.9e9, 1.2e10};
  s.kappa_full = {6.8e-7, -5.5e-7, 6.8e-7};
  s.kappa_linear = {6.7e-7, -5.4e-7, 6.7e-7};
  s.point_valid = {1, 1, 1};
  s.delta = 1.798e16;
  s.metadata.tool_version = "test";
  s.metadata.setup = preset(PresetName::photon);
  s.metadata.intensity_reference = "scan maximum of |K^{ABC}|^2";
  return s;
}

}  // namespace

TEST_CASE("CSV output is byte-stable and lossless") {
  const SorkinScan scan = tiny_scan();
  std::ostringstream a, b;
  write_scan_csv(scan, a);
  write_scan_csv(scan, b);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == std::string(kScanCsvHeader));

  // first data row round-trips the doubles exactly
  std::string row;
  std::getline(in, row);
  double y = 0, inten = 0;
  char* end = nullptr;
  y = std::strtod(row.c_str(), &end);
  REQUIRE(*end == ',');
  inten = std::strtod(end + 1, &end);
  CHECK(y == scan.y_values[0]);
  CHECK(inten == scan.intensity_normalized[0]);

  int rows = 1;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("invalid points are printed as nan with a zero flag") {
  SorkinScan scan = tiny_scan();
  scan.kappa_full[1] = std::numeric_limits<double>::quiet_NaN();
  scan.point_valid[1] = 0;
  std::ostringstream out;
  write_scan_csv(scan, out);
  const std::string text = out.str();
  CHECK(text.find("nan") != std::string::npos);
  CHECK(text.find(",0\n") != std::string::npos);
}

TEST_CASE("JSON mirrors the scan record") {
  const SorkinScan scan = tiny_scan();
  const nlohmann::json j = scan_to_json(scan);
  CHECK(j.at("y_values_m").size() == 3);
  CHECK(j.at("kappa_full").size() == 3);
  CHECK(j.at("delta").get<double>() == scan.delta);
  CHECK(j.at("point_valid")[0].get<int>() == 1);
  const auto& meta = j.at("metadata");
  CHECK(meta.at("tool_version") == "test");
  CHECK(meta.contains("resolved_config"));
  CHECK(meta.at("resolved_config").at("slit_width_m").get<double>() == 30e-6);
  CHECK(meta.contains("quadrature"));
  CHECK(meta.contains("invalid_points"));
}
