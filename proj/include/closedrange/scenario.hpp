#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "closedrange/carleson.hpp"
#include "closedrange/dirichlet.hpp"
#include "closedrange/symbols.hpp"
#include "json.hpp"

namespace closedrange::scenario {

inline constexpr int kSchemaVersion = 1;

/// Library version baked in at build time.
const char* version();

struct QuadratureConfig {
  int radial_order = quadrature::kDefaultRadialOrder;  // boundedness estimate
  int angular_order = quadrature::kFamilyAngularOrder;
  int peak_radial_order = quadrature::kPeakRadialOrder;  // peak-function table
  int peak_angular_order = 1024;
  double truncation_eps = 1e-12;  // z-side rules stop at |z| = 1 - truncation_eps

  bool operator==(const QuadratureConfig&) const = default;
};

struct AnalysisConfig {
  double delta_floor = 0.05;
  double delta_decay = 1e-3;
  int tail_order = 8;
  std::vector<int> tail_orders{1, 2, 4, 8};
  double tail_threshold = 1e-6;
  int count_bound = 8;
  double boundedness_eps = 1e-2;
  double growth_threshold = 2.0;
  std::vector<double> alphas{0.25, 0.5, 0.75, 1.0};
  std::vector<int> peak_orders{1, 2, 4, 8, 16, 32, 64, 100, 200, 400};
  DiskPoint peak_zeta{1.0, 0.0};

  bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
  bool report = true;
  std::vector<std::string> heatmaps;  // n_phi, tau, coverage, gc_indicator
  int heatmap_resolution = 128;
  std::string heatmap_layout = "polar";  // or "cartesian"
  bool svg = false;
  bool rings = true;
  bool timings = false;  // off by default so reports are byte-stable

  bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  symbols::SymbolDescriptor symbol;
  carleson::DensityQuery query;
  QuadratureConfig quadrature;
  dirichlet::FamilyConfig family;
  AnalysisConfig analysis;
  OutputConfig outputs;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses and validates; unknown fields and bad values raise
/// ValidationError with a dotted path such as "query.rings" or
/// "symbol.zeros[1]".
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Full serialization; parse_scenario(to_json(c)) == c.
nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const symbols::SymbolDescriptor& symbol);
symbols::SymbolDescriptor parse_symbol(const nlohmann::json& doc, const std::string& path = "symbol");

/// Checks every section, including that the symbol builds.
void validate(const ScenarioConfig& config);

carleson::ClassifyOptions classify_options(const ScenarioConfig& config);

enum ExitCode { kExitOk = 0, kExitConfigError = 1, kExitInconclusiveWithErrors = 2, kExitInternalError = 3 };

struct RunReport {
  nlohmann::json document;
  carleson::VerdictLabel label = carleson::VerdictLabel::inconclusive;
  std::vector<std::string> errors;
  std::string ring_table;  // human-readable per-ring delta table

  int exit_code() const;
  /// Stable text form: two-space indent and a trailing newline.
  std::string dump() const;
};

/// Build symbol, run every estimator, classify, and assemble the report.
/// Estimator failures are embedded in the report, not thrown.
RunReport run_scenario(const ScenarioConfig& config);

/// Per-ring minima for coverage and each alpha, one ring per line.
std::string format_ring_table(const carleson::DensitySweep& sweep);

}  // namespace closedrange::scenario
