#include <cmath>
#include <random>

#include "closedrange/dirichlet.hpp"
#include "closedrange/errors.hpp"
#include "closedrange/quadrature.hpp"
#include "closedrange/symbols.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace closedrange;
using namespace closedrange::dirichlet;
using symbols::build_symbol;
using symbols::SymbolDescriptor;
using testing_support::random_point;
using testing_support::rel_err;

TEST_CASE("Dirichlet norm examples") {
  CHECK(dirichlet_norm(DirichletFunction(std::vector<Complex>{Complex(3.0, -4.0)})) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(dirichlet_norm(DirichletFunction::monomial(1)) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-15));
  for (int n = 0; n <= 40; ++n) CHECK(std::abs(dirichlet_norm(DirichletFunction::basis(n)) - 1.0) <= 1e-10);
  CHECK_THROWS_AS(DirichletFunction::basis(-1), ValidationError);
  CHECK_THROWS_AS(DirichletFunction(std::vector<Complex>(kMaxDegree + 2, 1.0)), ValidationError);
}

TEST_CASE("inner product examples") {
  for (int m = 0; m <= 12; ++m) {
    for (int n = 0; n <= 12; ++n) {
      const Complex ip = inner_product(DirichletFunction::basis(m), DirichletFunction::basis(n));
      CHECK(std::abs(ip - Complex(m == n ? 1.0 : 0.0, 0.0)) <= 1e-12);
    }
  }
  CHECK(std::abs(inner_product(DirichletFunction::monomial(1), DirichletFunction::monomial(0))) == 0.0);
  CHECK(inner_product(DirichletFunction::monomial(2), DirichletFunction::monomial(2)).real() ==
        doctest::Approx(2.0 * kPi).epsilon(1e-15));
  // Sesquilinear: <c f, g> = c <f, g>, <f, c g> = conj(c) <f, g>.
  std::mt19937_64 g(41);
  const auto f = random_polynomial(g, 6);
  const auto h = random_polynomial(g, 9);
  const Complex c(0.3, -1.2);
  CHECK(std::abs(inner_product(f.scaled(c), h) - c * inner_product(f, h)) <= 1e-12);
  CHECK(std::abs(inner_product(f, h.scaled(c)) - std::conj(c) * inner_product(f, h)) <= 1e-12);
  CHECK(std::abs(inner_product(f, h) - std::conj(inner_product(h, f))) <= 1e-12);
}

TEST_CASE("Parseval on the orthonormal basis (random degree-20 vectors)") {
  std::mt19937_64 g(42);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> coeffs(21);
    double sum = 0.0;
    std::vector<Complex> c(21);
    for (int n = 0; n <= 20; ++n) {
      c[n] = {normal(g), normal(g)};
      sum += std::norm(c[n]);
      const double scale = n == 0 ? 1.0 : 1.0 / std::sqrt(kPi * n);
      coeffs[n] = c[n] * scale;
    }
    const double norm = dirichlet_norm(DirichletFunction(coeffs));
    CHECK(rel_err(norm * norm, sum) <= 1e-8);
  }
}

TEST_CASE("quadrature norm path agrees with the coefficient formula") {
  std::mt19937_64 g(43);
  const auto quad = quadrature::build_quadrature();
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_polynomial(g, 3 + trial * 3);
    const double exact = dirichlet_norm(f);
    CHECK(rel_err(dirichlet_norm_quadrature(f, quad), exact) <= 1e-8);
  }
}

TEST_CASE("evaluation agrees with coefficients") {
  std::mt19937_64 g(44);
  const auto f = random_polynomial(g, 12);
  for (int i = 0; i < 100; ++i) {
    const Complex z = random_point(g, 0.99);
    Complex v = 0.0;
    for (int n = f.degree(); n >= 0; --n) v = v * z + f.coefficients()[n];
    CHECK(std::abs(f.value(z) - v) <= 1e-12 * std::max(1.0, std::abs(v)));
    const double h = 1e-6;
    const Complex fd = (f.value(z + h) - f.value(z - h)) / (2 * h);
    CHECK(std::abs(f.derivative(z) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("random polynomials are seeded and aligned") {
  std::mt19937_64 a(5);
  std::mt19937_64 b(5);
  const auto f = random_polynomial(a, 8);
  const auto h = random_polynomial(b, 8, true);
  REQUIRE(f.coefficients().size() == 9);
  CHECK(h.coefficients()[0] == Complex(0.0, 0.0));
  for (int n = 1; n <= 8; ++n) CHECK(f.coefficients()[n] == h.coefficients()[n]);
  CHECK(a() == b());  // the zeroed constant term still consumed its draws
}

TEST_CASE("kernel reproduction") {
  CHECK(kernel_reproduce_check(DirichletFunction::monomial(0), {0.6, 0.3}).residual <= 1e-15);
  CHECK(kernel_reproduce_check(DirichletFunction::monomial(5), 0.5).residual <= 1e-10);
  CHECK(kernel_reproduce_check(DirichletFunction::basis(3), {0.3, 0.2}).residual <= 1e-9);
  CHECK_FALSE(kernel_reproduce_check(DirichletFunction::monomial(2), 0.9).truncation_warning);
  CHECK(kernel_reproduce_check(DirichletFunction::monomial(2), 0.96).truncation_warning);
  std::mt19937_64 g(45);
  for (int i = 0; i < 50; ++i) {
    const auto f = random_polynomial(g, 12);
    const Complex w = random_point(g, 0.9);
    CHECK(kernel_reproduce_check(f, w).residual <= 1e-8);
  }
}

TEST_CASE("Dirichlet kernel series") {
  std::mt19937_64 g(46);
  for (int i = 0; i < 20; ++i) {
    const Complex w = random_point(g, 0.95);
    const Complex z = random_point(g, 1.0);
    const KernelSpec k{w, KernelKind::dirichlet_kernel};
    const auto series = k.series();
    CHECK(std::abs(series.value(z) - k.value(z)) <= 1e-11);
    const Complex closed = 1.0 + std::log(1.0 / (1.0 - z * std::conj(w))) / kPi;
    CHECK(std::abs(k.value(z) - closed) <= 1e-13);
    // Tail bound at the series length: sum_{n > N} |w|^n / (pi n) < 1e-12.
    const int n = kernel_series_length(std::abs(w));
    CHECK(std::pow(std::abs(w), n + 1) / (kPi * (n + 1) * (1.0 - std::abs(w))) < 1e-12);
    CHECK(k.norm() == doctest::Approx(dirichlet_norm(series)).epsilon(1e-10));
  }
}

TEST_CASE("peak functions") {
  const auto f1 = peak_function(1.0, 1);
  REQUIRE(f1.coefficients().size() == 2);
  CHECK(std::abs(f1.coefficients()[0] - 0.5) < 1e-15);
  CHECK(std::abs(f1.coefficients()[1] - 0.5) < 1e-15);
  for (int k : {1, 3, 10, 40}) {
    const Complex zeta = std::polar(1.0, 0.4 * k);
    const auto f = peak_function(zeta, k);
    CHECK(std::abs(f.value(0.0) - std::pow(0.5, k)) <= 1e-15);
    CHECK(std::abs(f.value(zeta * (1.0 - 1e-12)) - 1.0) <= 1e-9);
    const PeakProbe probe{zeta, k};
    CHECK(std::abs(probe.value(Complex(0.2, 0.3)) - f.value(Complex(0.2, 0.3))) <= 1e-13);
    CHECK(probe.norm() == doctest::Approx(dirichlet_norm(f)).epsilon(1e-12));
  }
  for (int k : {1, 5, 20}) {
    const PeakProbe f{1.0, k};
    double sup = 0.0;
    for (int i = 0; i < 720; ++i) sup = std::max(sup, std::abs(f.value(std::polar(0.5, kPi * i / 360))));
    CHECK(sup == doctest::Approx(std::pow(0.75, k)).epsilon(1e-12));
    std::mt19937_64 g(47);
    for (int i = 0; i < 200; ++i) CHECK(std::abs(f.value(random_point(g, 1.0 - 1e-9))) < 1.0);
  }
}

TEST_CASE("default test family is normalized") {
  const auto family = default_family();
  CHECK(family.normalized);
  CHECK(family.members.size() == 40 + 100 + 8 * (6 + 5));
  for (const auto& f : family.members) CHECK(std::abs(f.norm() - 1.0) <= 1e-8);
  FamilyConfig small;
  small.random_count = 3;
  small.max_monomial_degree = 2;
  small.peak_orders = {1};
  small.probe_radii = {0.5};
  small.probe_angles = 2;
  CHECK(default_family(small).members.size() == 2 + 3 + 2 * (1 + 1));
}

TEST_CASE("normalized Bergman kernel probes have comparable L2 mass") {
  // The mass is exactly pi for every anchor; the frozen bracket guards the quadrature.
  for (double m : {0.0, 0.5, 0.9, 0.99}) {
    const Complex a = std::polar(m, 0.3);
    const KernelSpec k{a, KernelKind::normalized_bergman};
    const auto quad = m > 0.0 ? quadrature::build_graded_quadrature(a / std::abs(a), 1.0 - 1e-12)
                              : quadrature::build_quadrature();
    const double mass = quad.integrate([&](Complex w) { return std::norm(k.value(w)); });
    CHECK(mass / kPi >= 1.0 - 1e-6);
    CHECK(mass / kPi <= 1.0 + 1e-6);
  }
}

TEST_CASE("composition norms") {
  const auto id = build_symbol(SymbolDescriptor::identity());
  std::mt19937_64 g(48);
  for (int i = 0; i < 5; ++i) {
    const auto f = random_polynomial(g, 8);
    CHECK(rel_err(composition_norm(id, f), dirichlet_norm(f)) <= 1e-8);
  }
  const auto z = DirichletFunction::monomial(1);
  CHECK(rel_err(composition_norm(build_symbol(SymbolDescriptor::power(2)), z), std::sqrt(2.0 * kPi)) <= 1e-8);
  CHECK(rel_err(composition_norm(build_symbol(SymbolDescriptor::scaled(0.5)), z), std::sqrt(kPi) / 2.0) <= 1e-8);
  // f(phi(0)) enters: constant 1 composes to 1.
  CHECK(rel_err(composition_norm(build_symbol(SymbolDescriptor::mobius({0.4, 0.1})), DirichletFunction::monomial(0)),
                1.0) <= 1e-12);
  // Automorphisms preserve the seminorm of functions vanishing at the image of 0.
  const auto m = build_symbol(SymbolDescriptor::mobius({0.3, -0.2}));
  const Complex c = m(0.0);
  const DirichletFunction shifted({-c, 1.0});
  CHECK(rel_err(composition_norm(m, shifted), dirichlet_norm(DirichletFunction({0.0, 1.0}))) <= 1e-8);
}

TEST_CASE("peak ratio sequences") {
  const auto id = build_symbol(SymbolDescriptor::identity());
  for (double r : peak_ratio_sequence(id, 1.0, {1, 2, 8, 32, 100})) CHECK(std::abs(r - 1.0) <= 1e-8);

  const auto crescent = build_symbol(SymbolDescriptor::crescent());
  const auto ratios = peak_ratio_sequence(crescent, 1.0, {1, 8, 64, 200, 400});
  // zeta lies in the closure of the image, so the ratios stay bounded below.
  for (double r : ratios) CHECK(r >= 0.6);
  CHECK(ratios.back() == doctest::Approx(0.6232).epsilon(2e-3));

  CHECK_THROWS_AS(peak_ratio_sequence(id, 1.0, {4, 2}), ValidationError);
  CHECK_THROWS_AS(peak_ratio_sequence(id, 0.5, {1}), DomainError);
}

TEST_CASE("boundedness estimate") {
  const auto family = default_family();
  const auto id = boundedness_estimate(build_symbol(SymbolDescriptor::identity()), family, 1e-6);
  CHECK(std::abs(id.estimate - 1.0) <= 1e-6);
  CHECK(id.estimate <= 1.0);
  CHECK_FALSE(id.divergence_suspected);

  const auto sq = boundedness_estimate(build_symbol(SymbolDescriptor::power(2)), family, 1e-6);
  CHECK(sq.estimate <= 2.0);
  CHECK(sq.estimate >= 2.0 - 1e-3);
  CHECK(sq.growth == doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(boundedness_estimate(build_symbol(SymbolDescriptor::identity()), family, 0.5), ValidationError);
  CHECK_THROWS_AS(boundedness_estimate(build_symbol(SymbolDescriptor::identity()), TestFamily{}, 1e-2),
                  ValidationError);
}
