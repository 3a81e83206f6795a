#include "closedrange/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "closedrange/errors.hpp"
#include "closedrange/heatmap.hpp"

#ifndef CLOSEDRANGE_VERSION
#define CLOSEDRANGE_VERSION "0.0.0"
#endif

namespace closedrange::scenario {

using nlohmann::json;
using symbols::SymbolDescriptor;
using symbols::SymbolKind;

const char* version() { return CLOSEDRANGE_VERSION; }

namespace {

// Nominal relative accuracy of the w-side rule, as validated by the
// change-of-variables checks.
constexpr double kTailRelativeTolerance = 1e-5;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double read_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(path, "must be finite");
  return v;
}

int read_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < -2147483647LL || v > 2147483647LL) throw ValidationError(path, "integer out of range");
  return static_cast<int>(v);
}

std::uint64_t read_seed(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  throw ValidationError(path, "expected a non-negative integer");
}

bool read_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path, "expected true or false");
  return j.get<bool>();
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path, "expected a string");
  return j.get<std::string>();
}

// A complex number is [re, im]; a bare number is read as real.
Complex read_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {read_double(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) throw ValidationError(path, "expected [re, im]");
  return {read_double(j[0], index(path, 0)), read_double(j[1], index(path, 1))};
}

template <class T, class F>
std::vector<T> read_list(const json& j, const std::string& path, F item) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  std::vector<T> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], index(path, i)));
  return out;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

// Tracks which keys of an object were consumed so leftovers can be rejected.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "$" : path_, "expected an object");
  }

  const json* take(const std::string& key) {
    known_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string at(const std::string& key) const { return join(path_, key); }

  template <class T, class F>
  void read(const std::string& key, T& out, F convert) {
    if (const json* v = take(key)) out = convert(*v, at(key));
  }
  void number(const std::string& key, double& out) { read(key, out, read_double); }
  void integer(const std::string& key, int& out) { read(key, out, read_int); }
  void boolean(const std::string& key, bool& out) { read(key, out, read_bool); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!known_.count(it.key())) throw ValidationError(at(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ValidationError(path, message);
}

carleson::DensityQuery parse_query(const json& j, const std::string& path) {
  carleson::DensityQuery q;
  Fields f(j, path);
  f.number("bergman_radius", q.bergman_radius);
  f.number("alpha", q.alpha);
  f.number("level", q.level);
  f.read("rings", q.rings, [](const json& v, const std::string& p) { return read_list<double>(v, p, read_double); });
  f.integer("angles_per_ring", q.angles_per_ring);
  f.read("seed", q.seed, read_seed);
  f.integer("samples_per_disk", q.samples_per_disk);
  f.number("truncation_eps", q.truncation_eps);
  f.read("box_radii", q.box_radii,
         [](const json& v, const std::string& p) { return read_list<double>(v, p, read_double); });
  f.integer("box_angles", q.box_angles);
  f.finish();
  return q;
}

QuadratureConfig parse_quadrature(const json& j, const std::string& path) {
  QuadratureConfig c;
  Fields f(j, path);
  f.integer("radial_order", c.radial_order);
  f.integer("angular_order", c.angular_order);
  f.integer("peak_radial_order", c.peak_radial_order);
  f.integer("peak_angular_order", c.peak_angular_order);
  f.number("truncation_eps", c.truncation_eps);
  f.finish();
  return c;
}

dirichlet::FamilyConfig parse_family(const json& j, const std::string& path) {
  dirichlet::FamilyConfig c;
  Fields f(j, path);
  f.integer("max_monomial_degree", c.max_monomial_degree);
  f.integer("random_count", c.random_count);
  f.integer("random_degree", c.random_degree);
  f.read("seed", c.seed, read_seed);
  f.read("peak_orders", c.peak_orders, [](const json& v, const std::string& p) { return read_list<int>(v, p, read_int); });
  f.read("probe_radii", c.probe_radii,
         [](const json& v, const std::string& p) { return read_list<double>(v, p, read_double); });
  f.integer("probe_angles", c.probe_angles);
  f.finish();
  return c;
}

AnalysisConfig parse_analysis(const json& j, const std::string& path) {
  AnalysisConfig c;
  Fields f(j, path);
  f.number("delta_floor", c.delta_floor);
  f.number("delta_decay", c.delta_decay);
  f.integer("tail_order", c.tail_order);
  f.read("tail_orders", c.tail_orders, [](const json& v, const std::string& p) { return read_list<int>(v, p, read_int); });
  f.number("tail_threshold", c.tail_threshold);
  f.integer("count_bound", c.count_bound);
  f.number("boundedness_eps", c.boundedness_eps);
  f.number("growth_threshold", c.growth_threshold);
  f.read("alphas", c.alphas, [](const json& v, const std::string& p) { return read_list<double>(v, p, read_double); });
  f.read("peak_orders", c.peak_orders, [](const json& v, const std::string& p) { return read_list<int>(v, p, read_int); });
  f.read("peak_zeta", c.peak_zeta, read_complex);
  f.finish();
  return c;
}

OutputConfig parse_outputs(const json& j, const std::string& path) {
  OutputConfig c;
  Fields f(j, path);
  f.boolean("report", c.report);
  f.read("heatmaps", c.heatmaps,
         [](const json& v, const std::string& p) { return read_list<std::string>(v, p, read_string); });
  f.integer("heatmap_resolution", c.heatmap_resolution);
  f.read("heatmap_layout", c.heatmap_layout, read_string);
  f.boolean("svg", c.svg);
  f.boolean("rings", c.rings);
  f.boolean("timings", c.timings);
  f.finish();
  return c;
}

void validate_quadrature(const QuadratureConfig& c) {
  require(c.radial_order >= 4, "quadrature.radial_order", "must be at least 4");
  require(c.angular_order >= 4, "quadrature.angular_order", "must be at least 4");
  require(c.peak_radial_order >= 8, "quadrature.peak_radial_order", "must be at least 8");
  require(c.peak_angular_order >= 8, "quadrature.peak_angular_order", "must be at least 8");
  require(c.truncation_eps > 0.0 && c.truncation_eps < 0.1, "quadrature.truncation_eps", "must lie in (0, 0.1)");
}

void validate_family(const dirichlet::FamilyConfig& c) {
  require(c.max_monomial_degree >= 0 && c.max_monomial_degree <= dirichlet::kMaxDegree,
          "family.max_monomial_degree", "must lie in [0, 4096]");
  require(c.random_count >= 0, "family.random_count", "must be non-negative");
  require(c.random_degree >= 1 && c.random_degree <= dirichlet::kMaxDegree, "family.random_degree",
          "must lie in [1, 4096]");
  for (std::size_t i = 0; i < c.peak_orders.size(); ++i)
    require(c.peak_orders[i] >= 1, index("family.peak_orders", i), "must be positive");
  for (std::size_t i = 0; i < c.probe_radii.size(); ++i)
    require(c.probe_radii[i] >= 0.0 && c.probe_radii[i] < 1.0, index("family.probe_radii", i), "must lie in [0, 1)");
  require(c.probe_angles >= 1, "family.probe_angles", "must be positive");
}

void validate_analysis(const AnalysisConfig& c) {
  require(c.delta_floor > 0.0, "analysis.delta_floor", "must be positive");
  require(c.delta_decay > 0.0 && c.delta_decay < c.delta_floor, "analysis.delta_decay",
          "must be positive and below delta_floor");
  require(c.tail_order >= 1, "analysis.tail_order", "must be at least 1");
  for (std::size_t i = 0; i < c.tail_orders.size(); ++i)
    require(c.tail_orders[i] >= 1, index("analysis.tail_orders", i), "must be at least 1");
  require(c.tail_threshold >= 0.0, "analysis.tail_threshold", "must be non-negative");
  require(c.count_bound >= 1, "analysis.count_bound", "must be at least 1");
  require(c.boundedness_eps > 0.0 && c.boundedness_eps < 0.1, "analysis.boundedness_eps", "must lie in (0, 0.1)");
  require(c.growth_threshold > 1.0, "analysis.growth_threshold", "must exceed 1");
  require(!c.alphas.empty(), "analysis.alphas", "must not be empty");
  for (std::size_t i = 0; i < c.alphas.size(); ++i)
    require(c.alphas[i] > 0.0 && c.alphas[i] <= 1.0, index("analysis.alphas", i), "must lie in (0, 1]");
  for (std::size_t i = 0; i < c.peak_orders.size(); ++i) {
    require(c.peak_orders[i] >= 1 && c.peak_orders[i] <= dirichlet::kMaxDegree, index("analysis.peak_orders", i),
            "must lie in [1, 4096]");
    require(i == 0 || c.peak_orders[i] > c.peak_orders[i - 1], index("analysis.peak_orders", i),
            "must be strictly increasing");
  }
  require(std::abs(std::abs(c.peak_zeta) - 1.0) <= 1e-12, "analysis.peak_zeta", "must lie on the unit circle");
}

void validate_outputs(const OutputConfig& c) {
  for (std::size_t i = 0; i < c.heatmaps.size(); ++i) {
    try {
      heatmap::field_from_string(c.heatmaps[i]);
    } catch (const ValidationError& e) {
      throw ValidationError(index("outputs.heatmaps", i), "unknown heatmap field '" + c.heatmaps[i] + "'");
    }
  }
  require(c.heatmap_resolution >= 1 && c.heatmap_resolution <= heatmap::kMaxResolution, "outputs.heatmap_resolution",
          "must lie in [1, 2048]");
  require(c.heatmap_layout == "polar" || c.heatmap_layout == "cartesian", "outputs.heatmap_layout",
          "must be 'polar' or 'cartesian'");
}

json ring_json(const carleson::RingMinimum& r) {
  return {{"modulus", r.modulus}, {"min_ratio", r.min_ratio}, {"argmin", complex_json(r.argmin)},
          {"std_error", r.std_error}};
}

json delta_json(const carleson::DeltaEstimate& d) {
  json rings = json::array();
  for (const auto& r : d.per_ring) rings.push_back(ring_json(r));
  json out{{"delta", d.delta},
           {"standard_error", d.standard_error},
           {"argmin_z", complex_json(d.argmin_z)},
           {"per_ring", rings}};
  if (d.alpha) out["alpha"] = *d.alpha;
  return out;
}

json box_json(const carleson::BoxMinimum& b) {
  json radii = json::array();
  for (const auto& [r, v] : b.per_radius) radii.push_back({{"radius", r}, {"min_ratio", v}});
  return {{"delta", b.delta},
          {"standard_error", b.standard_error},
          {"argmin_anchor", complex_json(b.argmin.anchor)},
          {"argmin_radius", b.argmin.radius},
          {"per_radius", radii}};
}

json verdict_json(const carleson::Verdict& v) {
  json criteria = json::object();
  for (const auto& [key, c] : v.criteria) {
    criteria[key] = {{"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}, {"evaluated", c.evaluated}};
  }
  return {{"label", carleson::to_string(v.label)}, {"rule", v.rule}, {"criteria", criteria}, {"notes", v.notes}};
}

}  // namespace

json to_json(const SymbolDescriptor& s) {
  json out{{"kind", symbols::to_string(s.kind)}};
  switch (s.kind) {
    case SymbolKind::identity:
    case SymbolKind::atomic_singular:
      break;
    case SymbolKind::mobius:
      out["a"] = complex_json(s.a);
      out["phase"] = s.phase;
      break;
    case SymbolKind::power:
      out["degree"] = s.degree;
      break;
    case SymbolKind::blaschke: {
      json zeros = json::array();
      for (const auto& z : s.zeros) zeros.push_back(complex_json(z));
      out["zeros"] = zeros;
      out["phase"] = s.phase;
      break;
    }
    case SymbolKind::crescent:
      out["tangent_point"] = complex_json(s.tangent_point);
      out["inner_radius"] = s.inner_radius;
      break;
    case SymbolKind::scaled:
      out["factor"] = s.factor;
      break;
    case SymbolKind::chain: {
      json maps = json::array();
      for (const auto& m : s.maps) maps.push_back(to_json(m));
      out["maps"] = maps;
      break;
    }
  }
  return out;
}

SymbolDescriptor parse_symbol(const json& doc, const std::string& path) {
  Fields f(doc, path);
  const json* kind_json = f.take("kind");
  if (!kind_json) throw ValidationError(f.at("kind"), "missing symbol kind");
  const std::string kind_name = read_string(*kind_json, f.at("kind"));
  SymbolDescriptor s;
  try {
    s.kind = symbols::symbol_kind_from_string(kind_name);
  } catch (const ValidationError&) {
    throw ValidationError(f.at("kind"), "unknown symbol kind '" + kind_name + "'");
  }
  switch (s.kind) {
    case SymbolKind::identity:
    case SymbolKind::atomic_singular:
      break;
    case SymbolKind::mobius:
      f.read("a", s.a, read_complex);
      f.number("phase", s.phase);
      break;
    case SymbolKind::power:
      f.integer("degree", s.degree);
      break;
    case SymbolKind::blaschke:
      f.read("zeros", s.zeros,
             [](const json& v, const std::string& p) { return read_list<Complex>(v, p, read_complex); });
      f.number("phase", s.phase);
      break;
    case SymbolKind::crescent:
      f.read("tangent_point", s.tangent_point, read_complex);
      f.number("inner_radius", s.inner_radius);
      break;
    case SymbolKind::scaled:
      f.number("factor", s.factor);
      break;
    case SymbolKind::chain:
      f.read("maps", s.maps, [](const json& v, const std::string& p) {
        return read_list<SymbolDescriptor>(v, p, [](const json& m, const std::string& mp) { return parse_symbol(m, mp); });
      });
      break;
  }
  f.finish();
  return s;
}

void validate(const ScenarioConfig& c) {
  require(c.schema_version == kSchemaVersion, "schema_version", "unsupported schema version");
  try {
    symbols::build_symbol(c.symbol);
  } catch (const ValidationError& e) {
    std::string message = e.what();
    const std::string prefix = e.field() + ": ";
    if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    // Builder paths already start at "symbol".
    const bool rooted = e.field().rfind("symbol", 0) == 0;
    throw ValidationError(rooted ? e.field() : join("symbol", e.field()), message);
  } catch (const DomainError& e) {
    throw ValidationError("symbol", e.what());
  }
  carleson::validate(c.query);
  validate_quadrature(c.quadrature);
  validate_family(c.family);
  validate_analysis(c.analysis);
  validate_outputs(c.outputs);
}

ScenarioConfig parse_scenario(const json& doc) {
  ScenarioConfig c;
  Fields f(doc, "");
  const json* version_json = f.take("schema_version");
  if (!version_json) throw ValidationError("schema_version", "missing");
  c.schema_version = read_int(*version_json, "schema_version");
  f.read("name", c.name, read_string);
  const json* symbol_json = f.take("symbol");
  if (!symbol_json) throw ValidationError("symbol", "missing");
  c.symbol = parse_symbol(*symbol_json, "symbol");
  f.read("query", c.query, parse_query);
  f.read("quadrature", c.quadrature, parse_quadrature);
  f.read("family", c.family, parse_family);
  f.read("analysis", c.analysis, parse_analysis);
  f.read("outputs", c.outputs, parse_outputs);
  f.finish();
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string(), "cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string(), std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const ScenarioConfig& c) {
  const auto& q = c.query;
  const auto& fam = c.family;
  const auto& a = c.analysis;
  const auto& o = c.outputs;
  return {
      {"schema_version", c.schema_version},
      {"name", c.name},
      {"symbol", to_json(c.symbol)},
      {"query",
       {{"bergman_radius", q.bergman_radius},
        {"alpha", q.alpha},
        {"level", q.level},
        {"rings", q.rings},
        {"angles_per_ring", q.angles_per_ring},
        {"seed", q.seed},
        {"samples_per_disk", q.samples_per_disk},
        {"truncation_eps", q.truncation_eps},
        {"box_radii", q.box_radii},
        {"box_angles", q.box_angles}}},
      {"quadrature",
       {{"radial_order", c.quadrature.radial_order},
        {"angular_order", c.quadrature.angular_order},
        {"peak_radial_order", c.quadrature.peak_radial_order},
        {"peak_angular_order", c.quadrature.peak_angular_order},
        {"truncation_eps", c.quadrature.truncation_eps}}},
      {"family",
       {{"max_monomial_degree", fam.max_monomial_degree},
        {"random_count", fam.random_count},
        {"random_degree", fam.random_degree},
        {"seed", fam.seed},
        {"peak_orders", fam.peak_orders},
        {"probe_radii", fam.probe_radii},
        {"probe_angles", fam.probe_angles}}},
      {"analysis",
       {{"delta_floor", a.delta_floor},
        {"delta_decay", a.delta_decay},
        {"tail_order", a.tail_order},
        {"tail_orders", a.tail_orders},
        {"tail_threshold", a.tail_threshold},
        {"count_bound", a.count_bound},
        {"boundedness_eps", a.boundedness_eps},
        {"growth_threshold", a.growth_threshold},
        {"alphas", a.alphas},
        {"peak_orders", a.peak_orders},
        {"peak_zeta", complex_json(a.peak_zeta)}}},
      {"outputs",
       {{"report", o.report},
        {"heatmaps", o.heatmaps},
        {"heatmap_resolution", o.heatmap_resolution},
        {"heatmap_layout", o.heatmap_layout},
        {"svg", o.svg},
        {"rings", o.rings},
        {"timings", o.timings}}},
  };
}

carleson::ClassifyOptions classify_options(const ScenarioConfig& c) {
  carleson::ClassifyOptions o;
  o.delta_floor = c.analysis.delta_floor;
  o.delta_decay = c.analysis.delta_decay;
  o.tail_order = c.analysis.tail_order;
  o.tail_orders = c.analysis.tail_orders;
  o.tail_threshold = c.analysis.tail_threshold;
  o.count_bound = c.analysis.count_bound;
  o.boundedness_eps = c.analysis.boundedness_eps;
  o.alphas = c.analysis.alphas;
  o.family = c.family;
  o.grid.eps = c.query.truncation_eps;
  o.boundedness.radial_order = c.quadrature.radial_order;
  o.boundedness.angular_order = c.quadrature.angular_order;
  o.boundedness.growth_threshold = c.analysis.growth_threshold;
  return o;
}

int RunReport::exit_code() const {
  return label == carleson::VerdictLabel::inconclusive && !errors.empty() ? kExitInconclusiveWithErrors : kExitOk;
}

std::string RunReport::dump() const { return document.dump(2) + "\n"; }

std::string format_ring_table(const carleson::DensitySweep& sweep) {
  std::ostringstream os;
  char buf[64];
  os << "|z|       coverage";
  for (const auto& r : sweep.reverse) {
    std::snprintf(buf, sizeof buf, "  alpha=%-6g", r.alpha.value_or(0.0));
    os << buf;
  }
  os << "\n";
  for (std::size_t i = 0; i < sweep.coverage.per_ring.size(); ++i) {
    const auto& c = sweep.coverage.per_ring[i];
    std::snprintf(buf, sizeof buf, "%-8g  %-8.4f", c.modulus, c.min_ratio);
    os << buf;
    for (const auto& r : sweep.reverse) {
      std::snprintf(buf, sizeof buf, "  %-12.4f", r.per_ring[i].min_ratio);
      os << buf;
    }
    os << "\n";
  }
  std::snprintf(buf, sizeof buf, "delta     %-8.4f", sweep.coverage.delta);
  os << buf;
  for (const auto& r : sweep.reverse) {
    std::snprintf(buf, sizeof buf, "  %-12.4f", r.delta);
    os << buf;
  }
  os << "\n";
  return os.str();
}

RunReport run_scenario(const ScenarioConfig& config) {
  validate(config);
  using clock = std::chrono::steady_clock;
  RunReport report;
  json timings = json::object();
  auto stamp = [&](const char* stage, clock::time_point t0) {
    timings[stage] = std::chrono::duration<double>(clock::now() - t0).count();
  };

  const auto phi = symbols::build_symbol(config.symbol);
  auto t0 = clock::now();
  const auto analysis = carleson::analyze(phi, config.query, classify_options(config));
  stamp("analyze", t0);
  report.errors = analysis.errors;
  report.label = analysis.verdict.label;

  json& doc = report.document;
  doc["schema_version"] = kSchemaVersion;
  doc["version"] = version();
  doc["seed"] = config.query.seed;
  doc["scenario"] = to_json(config);
  doc["verdict"] = verdict_json(analysis.verdict);

  json deltas = json::object();
  if (analysis.disks) {
    const auto& d = *analysis.disks;
    deltas["coverage"] = delta_json(d.coverage);
    json rev = json::array();
    for (const auto& r : d.reverse) rev.push_back(delta_json(r));
    deltas["reverse_carleson"] = rev;
    report.ring_table = format_ring_table(d);
  }
  if (analysis.boxes) {
    const auto& b = *analysis.boxes;
    json rev = json::array();
    for (std::size_t i = 0; i < b.reverse.size(); ++i) {
      json entry = box_json(b.reverse[i]);
      entry["alpha"] = analysis.disks && i < analysis.disks->reverse.size() ? *analysis.disks->reverse[i].alpha : 0.0;
      rev.push_back(entry);
    }
    json acc{{"pass", b.accumulation.pass},
             {"inconclusive", b.accumulation.inconclusive},
             {"boxes", b.accumulation.boxes},
             {"boxes_hit", b.accumulation.boxes_hit}};
    if (b.accumulation.witness) {
      acc["witness"] = {{"anchor", complex_json(b.accumulation.witness->anchor)},
                        {"radius", b.accumulation.witness->radius}};
    }
    deltas["boxes"] = {{"coverage", box_json(b.coverage)},
                       {"reverse_carleson", rev},
                       {"gc_density", box_json(b.gc)},
                       {"gc_level", config.query.level},
                       {"accumulation", acc}};
  }
  doc["delta_estimates"] = deltas;

  json tails = json::array();
  for (const auto& [k, v] : analysis.tails) {
    tails.push_back({{"k", k}, {"value", v}, {"tolerance", kTailRelativeTolerance * v}});
  }
  doc["tail_estimates"] = tails;

  json peaks = json::array();
  if (!config.analysis.peak_orders.empty()) {
    t0 = clock::now();
    try {
      dirichlet::PeakRatioOptions full;
      full.radial_order = config.quadrature.peak_radial_order;
      full.angular_order = config.quadrature.peak_angular_order;
      full.truncation = 1.0 - config.quadrature.truncation_eps;
      full.eps = config.query.truncation_eps;
      // Half-resolution rerun; the difference is the reported error estimate.
      auto half = full;
      half.radial_order = full.radial_order / 2;
      half.angular_order = full.angular_order / 2;
      half.w_angular_order = full.w_angular_order / 2;
      const auto& ks = config.analysis.peak_orders;
      const auto fine = dirichlet::peak_ratio_sequence(phi, config.analysis.peak_zeta, ks, full);
      const auto coarse = dirichlet::peak_ratio_sequence(phi, config.analysis.peak_zeta, ks, half);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        peaks.push_back({{"k", ks[i]},
                         {"ratio", fine[i]},
                         {"root", std::pow(fine[i], 1.0 / ks[i])},
                         {"error_estimate", std::abs(fine[i] - coarse[i])}});
      }
    } catch (const std::exception& e) {
      report.errors.push_back(std::string("peak ratios: ") + e.what());
    }
    stamp("peak_ratios", t0);
  }
  doc["peak_ratios"] = peaks;

  if (analysis.boundedness) {
    const auto& b = *analysis.boundedness;
    doc["boundedness"] = {{"estimate", b.estimate},
                          {"coarse", b.coarse},
                          {"growth", b.growth},
                          {"divergence_suspected", b.divergence_suspected},
                          {"argmax", b.argmax},
                          {"eps", b.eps},
                          {"refined_eps", b.eps / 10.0},
                          {"truncation_sensitivity", std::abs(b.estimate - b.coarse)}};
  } else {
    doc["boundedness"] = nullptr;
  }

  json counting{{"grid_max_count", analysis.grid_max_count}};
  if (analysis.disks) {
    json hist = json::object();
    for (const auto& [n, c] : analysis.disks->histogram) hist[std::to_string(n)] = c;
    int max_n = analysis.disks->max_count;
    if (analysis.boxes) max_n = std::max(max_n, analysis.boxes->max_count);
    counting["max_n"] = max_n;
    counting["histogram"] = hist;
    counting["samples"] = analysis.disks->samples;
    counting["failed"] = analysis.disks->failed;
    counting["failure_fraction"] =
        analysis.disks->samples > 0 ? static_cast<double>(analysis.disks->failed) / analysis.disks->samples : 0.0;
  }
  doc["counting"] = counting;
  doc["errors"] = report.errors;
  if (config.outputs.timings) doc["timings"] = timings;
  return report;
}

}  // namespace closedrange::scenario
