#include <cmath>
#include <random>

#include "closedrange/counting.hpp"
#include "closedrange/errors.hpp"
#include "closedrange/symbols.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace closedrange;
using namespace closedrange::symbols;
using testing_support::random_point;

namespace {

std::vector<SymbolMap> corpus() {
  return {build_symbol(SymbolDescriptor::identity()),
          build_symbol(SymbolDescriptor::mobius({0.3, -0.4}, 0.7)),
          build_symbol(SymbolDescriptor::power(3)),
          build_symbol(SymbolDescriptor::blaschke({{0.5, 0.0}, {-0.3, 0.2}, {0.0, 0.6}}, 0.4)),
          build_symbol(SymbolDescriptor::crescent()),
          build_symbol(SymbolDescriptor::scaled(0.5)),
          build_symbol(SymbolDescriptor::atomic_singular()),
          build_symbol(SymbolDescriptor::chain({SymbolDescriptor::power(2), SymbolDescriptor::mobius({0.2, 0.1})}))};
}

Complex central_difference(const SymbolMap& phi, Complex z, double h) {
  return (phi(z + h) - phi(z - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("evaluation examples") {
  const auto id = build_symbol(SymbolDescriptor::identity());
  const auto e = eval_with_derivative(id, {0.0, 0.7});
  CHECK(e.value == Complex(0.0, 0.7));
  CHECK(e.derivative == Complex(1.0, 0.0));

  const auto sq = build_symbol(SymbolDescriptor::power(2));
  CHECK(std::abs(sq({0.3, 0.4}) - Complex(-0.07, 0.24)) < 1e-15);

  const auto half = build_symbol(SymbolDescriptor::scaled(0.5));
  CHECK(half(0.8) == Complex(0.4, 0.0));

  const auto m = eval_with_derivative(build_symbol(SymbolDescriptor::mobius(0.5)), 0.5);
  CHECK(std::abs(m.value) < 1e-15);
  CHECK(std::abs(m.derivative - Complex(-4.0 / 3.0, 0.0)) < 1e-14);

  // exp((z+1)/(z-1)) and its derivative exp(...) * (-2 / (z-1)^2) at 0.
  const auto atom = eval_with_derivative(build_symbol(SymbolDescriptor::atomic_singular()), 0.0);
  CHECK(std::abs(atom.value - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(atom.derivative - Complex(-2.0 * std::exp(-1.0), 0.0)) < 1e-15);
  CHECK(std::abs(atom.derivative) == doctest::Approx(2.0 * std::exp(-1.0)));
}

TEST_CASE("evaluation guards") {
  const auto id = build_symbol(SymbolDescriptor::identity());
  CHECK_THROWS_AS(id(1.0), DomainError);
  CHECK_THROWS_AS(id(Complex(0.0, 1.0 - 1e-13)), DomainError);
  CHECK_NOTHROW(id(1.0 - 1e-11));
  const auto atom = build_symbol(SymbolDescriptor::atomic_singular());
  CHECK_THROWS_AS(atom(1.0 - 1e-10), OverflowError);
  CHECK_THROWS_AS(atom(Complex(1.0 - 5e-10, 5e-10)), OverflowError);
  CHECK_NOTHROW(atom(1.0 - 1e-8));
}

TEST_CASE("descriptor validation names the field") {
  auto field_of = [](const SymbolDescriptor& d) {
    try {
      build_symbol(d);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of(SymbolDescriptor::power(0)) == "symbol.degree");
  CHECK(field_of(SymbolDescriptor::scaled(1.0)) == "symbol.factor");
  CHECK(field_of(SymbolDescriptor::scaled(0.0)) == "symbol.factor");
  CHECK(field_of(SymbolDescriptor::mobius(1.0)) == "symbol.a");
  CHECK(field_of(SymbolDescriptor::blaschke({})) == "symbol.zeros");
  CHECK(field_of(SymbolDescriptor::blaschke({{0.1, 0.0}, {0.0, 1.0}})) == "symbol.zeros[1]");
  CHECK(field_of(SymbolDescriptor::crescent({1.0, 0.0}, 0.6)) == "symbol.inner_radius");
  CHECK(field_of(SymbolDescriptor::crescent({1.0, 0.0}, 0.0)) == "symbol.inner_radius");
  CHECK(field_of(SymbolDescriptor::crescent({0.5, 0.0}, 0.25)) == "symbol.tangent_point");
  CHECK(field_of(SymbolDescriptor::chain({})) == "symbol.maps");
  CHECK(field_of(SymbolDescriptor::chain({SymbolDescriptor::identity(), SymbolDescriptor::power(-1)})) ==
        "symbol.maps[1].degree");
  CHECK(field_of(SymbolDescriptor::crescent({1.0, 0.0}, 0.5)) == "<none>");
  CHECK_THROWS_AS(symbol_kind_from_string("spiral"), ValidationError);
  for (auto k : {SymbolKind::identity, SymbolKind::mobius, SymbolKind::power, SymbolKind::blaschke,
                 SymbolKind::crescent, SymbolKind::scaled, SymbolKind::atomic_singular, SymbolKind::chain})
    CHECK(symbol_kind_from_string(to_string(k)) == k);
}

TEST_CASE("self-map margin") {
  CHECK(verify_self_map(build_symbol(SymbolDescriptor::identity())) == doctest::Approx(1e-6).epsilon(1e-6));
  CHECK(verify_self_map(build_symbol(SymbolDescriptor::scaled(0.5))) == doctest::Approx(0.5).epsilon(1e-6));
  const double b = verify_self_map(build_symbol(SymbolDescriptor::blaschke({{0.5, 0.0}, {-0.3, 0.0}})));
  CHECK(b > 0.0);
  CHECK(b < 1e-5);
  for (const auto& phi : corpus()) CHECK(verify_self_map(phi) >= -1e-9);
}

TEST_CASE("derivative matches central differences (100 points per symbol)") {
  std::mt19937_64 g(21);
  for (const auto& phi : corpus()) {
    CAPTURE(to_string(phi.kind()));
    for (int i = 0; i < 100; ++i) {
      const Complex z = random_point(g, 0.9);
      const Complex d = phi.evaluate(z).derivative;
      const Complex fd = central_difference(phi, z, 1e-6);
      CHECK(std::abs(d - fd) <= 1e-6 * std::max(std::abs(d), 1e-3));
    }
  }
}

TEST_CASE("chain rule") {
  const auto inner = build_symbol(SymbolDescriptor::blaschke({{0.4, 0.1}, {-0.2, -0.5}}));
  const auto outer = build_symbol(SymbolDescriptor::mobius({0.1, 0.6}, 1.1));
  const auto chain = build_symbol(SymbolDescriptor::chain({inner.descriptor(), outer.descriptor()}));
  CHECK(chain.degree() == 2);
  std::mt19937_64 g(22);
  for (int i = 0; i < 100; ++i) {
    const Complex z = random_point(g, 0.99);
    const auto a = inner.evaluate(z);
    const auto b = outer.evaluate(a.value);
    const auto c = chain.evaluate(z);
    CHECK(std::abs(c.value - b.value) <= 1e-14);
    CHECK(std::abs(c.derivative - b.derivative * a.derivative) <= 1e-8 * std::abs(c.derivative));
  }
}

TEST_CASE("Blaschke product attains sampled values d times") {
  const auto phi = build_symbol(SymbolDescriptor::blaschke({{0.5, 0.0}, {-0.3, 0.2}, {0.0, 0.6}}));
  std::mt19937_64 g(23);
  for (int i = 0; i < 50; ++i) {
    const Complex w = random_point(g, 0.9);
    CHECK(counting::count_preimages(phi, w, 1e-6) == 3);
  }
}

TEST_CASE("crescent region geometry") {
  for (double angle : {0.0, 0.7, -2.5}) {
    const Complex zeta = std::polar(1.0, angle);
    for (double rho0 : {0.1, 0.25, 0.5}) {
      const auto region = CrescentRegion::make(zeta, rho0);
      CHECK(std::abs(std::abs(region.inner_center) + region.inner_radius - 1.0) < 1e-15);
      CHECK(std::abs(region.inner_center - (1.0 - rho0) * zeta) < 1e-15);
    }
  }
  const auto region = CrescentRegion::make(1.0, 0.25);
  CHECK(region.contains(-0.5));
  CHECK_FALSE(region.contains(0.9));
  CHECK_FALSE(region.contains(1.0));
  CHECK(region.contains(Complex(0.0, 0.9)));
}

TEST_CASE("crescent Riemann map") {
  const auto phi = build_symbol(SymbolDescriptor::crescent());
  const auto& region = *phi.crescent_region();
  CHECK(phi.degree() == 1);
  CHECK_FALSE(phi.boundary_regular());

  SUBCASE("normalization: phi(0) on the ray through -zeta") {
    for (double angle : {0.0, 1.3}) {
      const Complex zeta = std::polar(1.0, angle);
      const auto c = build_symbol(SymbolDescriptor::crescent(zeta, 0.25));
      CHECK(std::abs(c(0.0) + 0.25 * zeta) < 1e-12);
    }
  }
  SUBCASE("images lie in the region") {
    std::mt19937_64 g(24);
    for (int i = 0; i < 2000; ++i) {
      const Complex w = phi(random_point(g, 1.0 - 1e-6));
      CHECK(std::abs(w) < 1.0);
      CHECK(std::abs(w - 0.75) > 0.25);
    }
  }
  SUBCASE("univalent: n in {0, 1} on sampled targets") {
    std::mt19937_64 g(25);
    for (int i = 0; i < 1000; ++i) {
      const int n = counting::count_preimages(phi, random_point(g, 0.999), 1e-6);
      CHECK((n == 0 || n == 1));
    }
    CHECK(counting::count_preimages(phi, -0.5, 1e-6) == 1);
    // Independent argument-principle count for the far-side point.
    CHECK(counting::winding_count(phi, -0.5, 0.9) == 1);
  }
  SUBCASE("inverse round trip at 100 points") {
    std::mt19937_64 g(26);
    for (int i = 0; i < 100; ++i) {
      const Complex z = random_point(g, 0.99);
      CHECK(std::abs(phi.crescent_inverse(phi(z)) - z) <= 1e-8);
    }
    CHECK_THROWS_AS(phi.crescent_inverse(0.9), DomainError);
  }
  SUBCASE("boundary samples approach both circles") {
    double outer = 1.0;
    double inner = 1.0;
    for (int i = 0; i < 4096; ++i) {
      const Complex w = phi(std::polar(1.0 - 1e-6, 2.0 * kPi * (i + 0.5) / 4096));
      outer = std::min(outer, 1.0 - std::abs(w));
      inner = std::min(inner, std::abs(w - region.inner_center) - region.inner_radius);
    }
    CHECK(outer < 1e-3);
    CHECK(inner < 1e-3);
  }
}

TEST_CASE("degree bookkeeping") {
  CHECK(build_symbol(SymbolDescriptor::power(5)).degree() == 5);
  CHECK(build_symbol(SymbolDescriptor::blaschke({{0.1, 0.0}, {0.2, 0.0}})).degree() == 2);
  CHECK_FALSE(build_symbol(SymbolDescriptor::atomic_singular()).degree().has_value());
  CHECK(build_symbol(SymbolDescriptor::atomic_singular()).boundary_singularity() == Complex(1.0, 0.0));
}
