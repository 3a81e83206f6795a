// Command-line front end: analyze, heatmap, verify, rings.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "closedrange/carleson.hpp"
#include "closedrange/errors.hpp"
#include "closedrange/heatmap.hpp"
#include "closedrange/scenario.hpp"
#include "closedrange/symbols.hpp"
#include "closedrange/verify.hpp"

namespace fs = std::filesystem;
using namespace closedrange;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> radial_order;
  std::optional<int> angular_order;
  std::optional<double> eps_truncation;
  std::optional<double> alpha;
  std::optional<double> r;
  std::string out_dir = ".";
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed for every Monte Carlo stream");
  cmd->add_option("--radial-order", o.radial_order, "Radial Gauss order of the boundedness rule");
  cmd->add_option("--angular-order", o.angular_order, "Angular order of the boundedness rule");
  cmd->add_option("--eps-truncation", o.eps_truncation, "Counting truncation eps (search radius 1 - eps)");
  cmd->add_option("--alpha", o.alpha, "Exponent on n_phi for the reverse-Carleson criterion");
  cmd->add_option("--r", o.r, "Bergman radius of the test disks");
  cmd->add_option("--out-dir", o.out_dir, "Directory for reports and images");
}

scenario::ScenarioConfig load(const std::string& path, const Overrides& o) {
  auto config = scenario::load_scenario(path);
  if (o.seed) config.query.seed = *o.seed;
  if (o.radial_order) config.quadrature.radial_order = *o.radial_order;
  if (o.angular_order) config.quadrature.angular_order = *o.angular_order;
  if (o.eps_truncation) config.query.truncation_eps = *o.eps_truncation;
  if (o.alpha) config.query.alpha = *o.alpha;
  if (o.r) config.query.bergman_radius = *o.r;
  scenario::validate(config);
  return config;
}

std::string stem_of(const scenario::ScenarioConfig& config) { return config.name.empty() ? "scenario" : config.name; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit_heatmaps(const scenario::ScenarioConfig& config, const std::vector<std::string>& fields, int resolution,
                   const std::string& layout, bool svg, const fs::path& out_dir) {
  const auto phi = symbols::build_symbol(config.symbol);
  for (const auto& name : fields) {
    const auto field = heatmap::field_from_string(name);
    const auto map = heatmap::sample(phi, config.query, field, resolution, heatmap::layout_from_string(layout));
    const auto files = heatmap::emit(map, out_dir, stem_of(config) + "." + name, svg);
    std::cout << "wrote " << files.pgm.string() << " (sentinel pixels: " << files.sentinel_count << ")\n";
  }
}

int run_analyze(const std::string& path, const Overrides& o) {
  const auto config = load(path, o);
  const auto report = scenario::run_scenario(config);
  const fs::path out_dir = o.out_dir;
  if (config.outputs.report) {
    const auto file = out_dir / (stem_of(config) + ".report.json");
    write_text(file, report.dump());
    std::cout << "wrote " << file.string() << "\n";
  }
  if (!config.outputs.heatmaps.empty()) {
    emit_heatmaps(config, config.outputs.heatmaps, config.outputs.heatmap_resolution, config.outputs.heatmap_layout,
                  config.outputs.svg, out_dir);
  }
  if (config.outputs.rings && !report.ring_table.empty()) std::cout << report.ring_table;
  const auto& v = report.document["verdict"];
  std::cout << "verdict: " << v["label"].get<std::string>() << " (rule " << v["rule"].get<std::string>() << ")\n";
  for (const auto& e : report.errors) std::cerr << "estimator error: " << e << "\n";
  return report.exit_code();
}

int run_rings(const std::string& path, const Overrides& o) {
  const auto config = load(path, o);
  const auto phi = symbols::build_symbol(config.symbol);
  auto alphas = config.analysis.alphas;
  if (std::find(alphas.begin(), alphas.end(), config.query.alpha) == alphas.end()) alphas.push_back(config.query.alpha);
  const auto sweep = carleson::density_sweep(phi, config.query.bergman_radius, alphas, config.query);
  std::cout << scenario::format_ring_table(sweep);
  return scenario::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-range analysis of composition operators on the Dirichlet space"};
  app.set_version_flag("--version", std::string(scenario::version()));
  app.require_subcommand(1);

  Overrides analyze_opts;
  std::string analyze_path;
  auto* analyze = app.add_subcommand("analyze", "Run a scenario and write its report");
  analyze->add_option("scenario", analyze_path, "Scenario JSON file")->required();
  add_overrides(analyze, analyze_opts);

  Overrides heatmap_opts;
  std::string heatmap_path;
  std::vector<std::string> heatmap_fields{"n_phi"};
  int heatmap_resolution = 128;
  std::string heatmap_layout = "polar";
  bool heatmap_svg = false;
  auto* heat = app.add_subcommand("heatmap", "Render field images for a scenario");
  heat->add_option("scenario", heatmap_path, "Scenario JSON file")->required();
  heat->add_option("--field", heatmap_fields, "n_phi, tau, coverage or gc_indicator (repeatable)");
  heat->add_option("--resolution", heatmap_resolution, "Pixels per side (at most 2048)");
  heat->add_option("--layout", heatmap_layout, "polar or cartesian");
  heat->add_flag("--svg", heatmap_svg, "Also write an SVG");
  add_overrides(heat, heatmap_opts);

  std::vector<std::string> verify_tags{"all"};
  std::uint64_t verify_seed = 42;
  std::string verify_out;
  auto* ver = app.add_subcommand("verify", "Run module invariant checks");
  ver->add_option("--tags", verify_tags, "geometry, symbols, counting, dirichlet, changevar, carleson, all")
      ->delimiter(',');
  ver->add_option("--seed", verify_seed, "Seed for the randomized checks");
  ver->add_option("--out", verify_out, "Write the JSON summary to this file");

  Overrides rings_opts;
  std::string rings_path;
  auto* rings = app.add_subcommand("rings", "Print the per-ring delta table");
  rings->add_option("scenario", rings_path, "Scenario JSON file")->required();
  add_overrides(rings, rings_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? scenario::kExitOk : scenario::kExitConfigError;
  }

  try {
    if (*analyze) return run_analyze(analyze_path, analyze_opts);
    if (*heat) {
      if (heatmap_resolution < 1 || heatmap_resolution > heatmap::kMaxResolution)
        throw ValidationError("--resolution", "must lie in [1, 2048]");
      const auto config = load(heatmap_path, heatmap_opts);
      emit_heatmaps(config, heatmap_fields, heatmap_resolution, heatmap_layout, heatmap_svg, heatmap_opts.out_dir);
      return scenario::kExitOk;
    }
    if (*ver) {
      const auto summary = verify::verify_suite(verify_tags, verify_seed);
      const std::string text = summary.to_json().dump(2) + "\n";
      if (!verify_out.empty()) write_text(verify_out, text);
      std::cout << text;
      // A failed invariant is reported like an inconclusive run with errors.
      return summary.pass ? scenario::kExitOk : scenario::kExitInconclusiveWithErrors;
    }
    if (*rings) return run_rings(rings_path, rings_opts);
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return scenario::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return scenario::kExitInternalError;
  }
  return scenario::kExitInternalError;
}
