#include "closedrange/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "closedrange/carleson.hpp"
#include "closedrange/counting.hpp"
#include "closedrange/dirichlet.hpp"
#include "closedrange/errors.hpp"
#include "closedrange/geometry.hpp"
#include "closedrange/pushforward.hpp"
#include "closedrange/quadrature.hpp"
#include "closedrange/symbols.hpp"

namespace closedrange::verify {

namespace {

using symbols::SymbolDescriptor;

Check at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

Check at_least(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value >= threshold};
}

DiskPoint random_point(std::mt19937_64& rng, double max_radius) {
  const double r = max_radius * std::sqrt(unit_uniform(rng));
  return std::polar(r, 2.0 * kPi * unit_uniform(rng));
}

std::vector<std::pair<std::string, SymbolDescriptor>> corpus() {
  return {{"identity", SymbolDescriptor::identity()},
          {"power2", SymbolDescriptor::power(2)},
          {"blaschke2", SymbolDescriptor::blaschke({0.5, -0.3})},
          {"scaled", SymbolDescriptor::scaled(0.5)},
          {"crescent", SymbolDescriptor::crescent()},
          {"mobius", SymbolDescriptor::mobius({0.3, 0.2}, 0.7)},
          {"atomic_singular", SymbolDescriptor::atomic_singular()}};
}

// Lens area of the unit disk and the disk of radius r centred on the circle.
double box_area_closed_form(double r) {
  if (r >= 2.0) return kPi;
  const double a = std::acos(1.0 - r * r / 2.0);  // half-angle at the origin
  const double b = std::acos(r / 2.0);            // half-angle at the anchor
  return a - 0.5 * std::sin(2.0 * a) + r * r * (b - 0.5 * std::sin(2.0 * b));
}

std::vector<Check> geometry_checks(std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 1));
  std::vector<Check> out;
  long disagreements = 0;
  for (int d = 0; d < 100; ++d) {
    const DiskPoint z = random_point(rng, 0.999);
    const double r = 0.05 + 2.95 * unit_uniform(rng);
    const auto disk = geometry::bergman_disk(z, r);
    const double eta = geometry::eta_from_radius(r);
    for (int i = 0; i < 1000; ++i) {
      // Half the points near the disk, half anywhere in D.
      const DiskPoint w = i % 2 == 0 ? random_point(rng, 0.999999)
                                     : disk.euclidean_center + disk.euclidean_radius * 1.2 * random_point(rng, 1.0);
      if (!(std::abs(w) < 1.0)) continue;
      const double rho = geometry::pseudo_hyperbolic_distance(z, w);
      if (std::abs(rho - eta) < 1e-9) continue;
      if (disk.contains(w) != (rho < eta)) ++disagreements;
    }
  }
  out.push_back(at_most("disk_membership_disagreements", static_cast<double>(disagreements), 0.0));

  double tanh_gap = 0.0;
  double involution_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DiskPoint z = random_point(rng, 0.99);
    const DiskPoint w = random_point(rng, 0.99);
    tanh_gap = std::max(tanh_gap, std::abs(std::tanh(geometry::bergman_distance(z, w)) -
                                           geometry::pseudo_hyperbolic_distance(z, w)));
    involution_gap = std::max(involution_gap,
                              std::abs(geometry::disk_automorphism(z, geometry::disk_automorphism(z, w)) - w));
  }
  out.push_back(at_most("tanh_bergman_equals_rho", tanh_gap, 1e-12));
  out.push_back(at_most("automorphism_involution", involution_gap, 1e-12));

  double area_gap = 0.0;
  for (double r : {0.2, 0.5, 1.0}) {
    const double exact = box_area_closed_form(r);
    const double measured = geometry::carleson_box_area(geometry::carleson_box(1.0, r), 1024);
    area_gap = std::max(area_gap, std::abs(measured - exact) / exact);
  }
  out.push_back(at_most("box_area_vs_lens_formula", area_gap, 1e-3));
  return out;
}

std::vector<Check> symbol_checks(std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 2));
  std::vector<Check> out;
  double worst_margin = 1.0;
  double derivative_gap = 0.0;
  for (const auto& [name, d] : corpus()) {
    const auto phi = symbols::build_symbol(d);
    worst_margin = std::min(worst_margin, symbols::verify_self_map(phi));
    for (int i = 0; i < 50; ++i) {
      const DiskPoint z = random_point(rng, 0.9);
      const double h = 1e-6;
      const auto e = phi.evaluate(z);
      const Complex fd = (phi(z + h) - phi(z - h)) / (2.0 * h);
      derivative_gap = std::max(derivative_gap, std::abs(fd - e.derivative) / std::max(1.0, std::abs(e.derivative)));
    }
  }
  out.push_back(at_least("self_map_margin", worst_margin, -1e-9));
  out.push_back(at_most("derivative_vs_central_difference", derivative_gap, 1e-6));

  const auto crescent = symbols::build_symbol(SymbolDescriptor::crescent());
  const auto* region = crescent.crescent_region();
  out.push_back(at_most("crescent_origin_normalization",
                        std::abs(crescent(0.0) + region->inner_radius * region->tangent_point), 1e-12));
  double roundtrip = 0.0;
  int tested = 0;
  while (tested < 200) {
    const DiskPoint w = random_point(rng, 0.999);
    if (!region->contains(w)) continue;
    ++tested;
    roundtrip = std::max(roundtrip, std::abs(crescent(crescent.crescent_inverse(w)) - w));
  }
  out.push_back(at_most("crescent_inverse_roundtrip", roundtrip, 1e-10));
  return out;
}

std::vector<Check> counting_checks(std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 3));
  std::vector<Check> out;
  const auto power2 = symbols::build_symbol(SymbolDescriptor::power(2));
  int power_miss = 0;
  for (int i = 0; i < 100; ++i)
    if (counting::count_preimages(power2, random_point(rng, 0.9)) != 2) ++power_miss;
  out.push_back(at_most("power2_count_is_two", power_miss, 0));

  const auto blaschke = symbols::build_symbol(SymbolDescriptor::blaschke({0.5, {-0.2, 0.4}, {0.1, -0.6}}));
  double gap = 0.0;
  int count_mismatch = 0;
  for (int i = 0; i < 20; ++i) {
    const DiskPoint w = random_point(rng, 0.9);
    const auto fast = counting::preimages(blaschke, w);
    const auto slow = counting::preimages(blaschke, w, counting::kDefaultTruncation, counting::PreimageMethod::subdivision);
    if (fast.size() != slow.size()) {
      ++count_mismatch;
      continue;
    }
    for (std::size_t k = 0; k < fast.size(); ++k) gap = std::max(gap, std::abs(fast[k].point - slow[k].point));
    if (counting::winding_count(blaschke, w, 1.0 - counting::kDefaultTruncation) != 3) ++count_mismatch;
  }
  out.push_back(at_most("blaschke_algebraic_vs_subdivision_count", count_mismatch, 0));
  out.push_back(at_most("blaschke_algebraic_vs_subdivision_points", gap, 1e-9));

  const auto identity = symbols::build_symbol(SymbolDescriptor::identity());
  double tau_gap = 0.0;
  for (int i = 0; i < 100; ++i) {
    DiskPoint w = random_point(rng, 0.99);
    if (std::abs(w) < 1e-3) w = 0.5;
    const auto s = counting::counting_sample(identity, w);
    tau_gap = std::max(tau_gap, std::abs(s.tau.value_or(0.0) - 1.0));
  }
  out.push_back(at_most("identity_tau_is_one", tau_gap, 1e-12));
  return out;
}

std::vector<Check> dirichlet_checks(std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 4));
  std::vector<Check> out;
  double basis_gap = 0.0;
  for (int n = 0; n <= 40; ++n)
    basis_gap = std::max(basis_gap, std::abs(dirichlet::dirichlet_norm(dirichlet::DirichletFunction::basis(n)) - 1.0));
  out.push_back(at_most("basis_norms", basis_gap, 1e-10));

  double reproduce = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto f = dirichlet::random_polynomial(rng, 1 + i % 12);
    reproduce = std::max(reproduce, dirichlet::kernel_reproduce_check(f, random_point(rng, 0.9)).residual);
  }
  out.push_back(at_most("kernel_reproducing_residual", reproduce, 1e-8));

  const auto quad = quadrature::build_quadrature();
  const auto identity = symbols::build_symbol(SymbolDescriptor::identity());
  double norm_gap = 0.0;
  double identity_gap = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto f = dirichlet::random_polynomial(rng, 8);
    const double exact = dirichlet::dirichlet_norm(f);
    norm_gap = std::max(norm_gap, std::abs(dirichlet::dirichlet_norm_quadrature(f, quad) - exact) / exact);
    identity_gap = std::max(identity_gap, std::abs(dirichlet::composition_norm(identity, f, quad) - exact) / exact);
  }
  out.push_back(at_most("norm_quadrature_vs_coefficients", norm_gap, 1e-8));
  out.push_back(at_most("identity_composition_norm", identity_gap, 1e-8));
  return out;
}

std::vector<Check> changevar_checks(std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 5));
  const std::vector<dirichlet::TestFunction> functions{
      dirichlet::DirichletFunction::monomial(1), dirichlet::DirichletFunction::monomial(2),
      dirichlet::DirichletFunction::basis(3), dirichlet::random_polynomial(rng, 8)};
  const std::vector<SymbolDescriptor> symbols{SymbolDescriptor::identity(), SymbolDescriptor::power(2),
                                              SymbolDescriptor::blaschke({0.5, -0.3}), SymbolDescriptor::scaled(0.5)};
  double worst = 0.0;
  for (const auto& d : symbols) {
    const auto phi = symbols::build_symbol(d);
    for (const auto& f : functions) worst = std::max(worst, dirichlet::change_of_variables_residual(phi, f));
  }
  return {at_most("change_of_variables_residual", worst, 1e-4)};
}

std::vector<Check> carleson_checks(std::uint64_t seed) {
  std::vector<Check> out;
  carleson::DensityQuery q;
  q.seed = seed;
  const auto identity = symbols::build_symbol(SymbolDescriptor::identity());
  double identity_gap = 0.0;
  for (DiskPoint z : {DiskPoint{0.0, 0.0}, DiskPoint{0.5, 0.0}, DiskPoint{0.0, 0.9}, DiskPoint{-0.99, 0.0}}) {
    identity_gap = std::max(identity_gap, std::abs(carleson::coverage_ratio(identity, z, 1.0, q).value - 1.0));
  }
  out.push_back(at_most("identity_coverage_is_one", identity_gap, 0.0));

  const auto power2 = symbols::build_symbol(SymbolDescriptor::power(2));
  const auto r1 = carleson::reverse_carleson_ratio(power2, 0.0, 1.0, 1.0, q);
  const auto rh = carleson::reverse_carleson_ratio(power2, 0.0, 1.0, 0.5, q);
  out.push_back(at_most("power2_reverse_ratio_alpha1_z_score", std::abs(r1.value - 2.0) / r1.std_error, 2.0));
  out.push_back(
      at_most("power2_reverse_ratio_alpha_half_z_score", std::abs(rh.value - std::sqrt(2.0)) / rh.std_error, 2.0));

  const auto scaled = symbols::build_symbol(SymbolDescriptor::scaled(0.5));
  const auto sc = carleson::coverage_ratio(scaled, 0.0, 1.0, q);
  const double exact = 0.25 / std::pow(std::tanh(1.0), 2);
  out.push_back(at_most("scaled_coverage_z_score", std::abs(sc.value - exact) / sc.std_error, 3.0));

  double violation = 0.0;
  for (const auto* name : {"blaschke", "crescent"}) {
    const auto phi = symbols::build_symbol(std::string(name) == "crescent"
                                               ? SymbolDescriptor::crescent()
                                               : SymbolDescriptor::blaschke({0.5, -0.3}));
    for (DiskPoint z : {DiskPoint{0.9, 0.0}, DiskPoint{0.5, 0.5}, DiskPoint{-0.3, 0.0}}) {
      const double c = carleson::coverage_ratio(phi, z, 1.0, q).value;
      const double a = carleson::reverse_carleson_ratio(phi, z, 1.0, 0.5, q).value;
      const double b = carleson::reverse_carleson_ratio(phi, z, 1.0, 1.0, q).value;
      violation = std::max({violation, c - a, a - b});
    }
  }
  out.push_back(at_most("dominance_violation", violation, 0.0));

  carleson::DensityQuery small = q;
  small.rings = {0.0, 0.9};
  const auto crescent = symbols::build_symbol(SymbolDescriptor::crescent());
  const auto d1 = carleson::delta_infimum(crescent, 1.0, std::nullopt, small);
  const auto d2 = carleson::delta_infimum(crescent, 1.0, std::nullopt, small);
  out.push_back(at_most("seeded_delta_repeatable", d1.delta == d2.delta && d1.argmin_z == d2.argmin_z ? 0.0 : 1.0, 0.0));
  return out;
}

using Runner = std::function<std::vector<Check>(std::uint64_t)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"geometry", geometry_checks}, {"symbols", symbol_checks},     {"counting", counting_checks},
      {"dirichlet", dirichlet_checks}, {"changevar", changevar_checks}, {"carleson", carleson_checks}};
  return table;
}

}  // namespace

const std::vector<std::string>& known_tags() {
  static const std::vector<std::string> tags{"geometry", "symbols", "counting", "dirichlet", "changevar", "carleson"};
  return tags;
}

nlohmann::json Summary::to_json() const {
  nlohmann::json doc{{"pass", pass}};
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : tags) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : t.checks)
      checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
    list.push_back({{"tag", t.tag}, {"pass", t.pass}, {"checks", checks}});
  }
  doc["tags"] = list;
  return doc;
}

Summary verify_suite(const std::vector<std::string>& tags, std::uint64_t seed) {
  std::vector<std::string> selected;
  for (const auto& tag : tags) {
    if (tag == "all") {
      selected = known_tags();
      break;
    }
    if (!runners().count(tag)) throw ValidationError("tags", "unknown verify tag '" + tag + "'");
    if (std::find(selected.begin(), selected.end(), tag) == selected.end()) selected.push_back(tag);
  }
  Summary summary;
  for (const auto& tag : selected) {
    TagResult result;
    result.tag = tag;
    try {
      result.checks = runners().at(tag)(seed);
    } catch (const std::exception& e) {
      result.checks.push_back({std::string("exception: ") + e.what(), 1.0, 0.0, false});
    }
    for (const auto& c : result.checks) result.pass = result.pass && c.pass;
    summary.pass = summary.pass && result.pass;
    summary.tags.push_back(std::move(result));
  }
  return summary;
}

}  // namespace closedrange::verify
