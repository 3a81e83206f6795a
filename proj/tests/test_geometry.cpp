#include <cmath>
#include <random>

#include "closedrange/errors.hpp"
#include "closedrange/geometry.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace closedrange;
using namespace closedrange::geometry;
using testing_support::random_point;
using testing_support::rel_err;

namespace {

// Closed-form area of the lens D ∩ {|w - zeta| < r}, |zeta| = 1, 0 < r < 2.
double lens_area(double r) {
  const double a = std::acos(1.0 - r * r / 2.0);
  const double b = std::acos(r / 2.0);
  return a - 0.5 * std::sin(2.0 * a) + r * r * (b - 0.5 * std::sin(2.0 * b));
}

// Endpoints of D(x, r) on the real axis by bisection on the rho-membership
// oracle alone, for real x.
std::pair<double, double> real_axis_extent(double x, double r) {
  const double eta = std::tanh(r);
  auto edge = [&](double inside, double outside) {
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (inside + outside);
      (pseudo_hyperbolic_distance(x, m) < eta ? inside : outside) = m;
    }
    return 0.5 * (inside + outside);
  };
  return {edge(x, -1.0 + 1e-13), edge(x, 1.0 - 1e-13)};
}

}  // namespace

TEST_CASE("pseudo-hyperbolic distance examples") {
  CHECK(pseudo_hyperbolic_distance(0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pseudo_hyperbolic_distance(0.5, 0.5) == 0.0);
  CHECK(pseudo_hyperbolic_distance(0.5, -0.5) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(pseudo_hyperbolic_distance(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(pseudo_hyperbolic_distance(0.0, Complex(0.0, -1.0)), DomainError);
  CHECK_THROWS_AS(pseudo_hyperbolic_distance(0.0, 1.0 - 1e-13), DomainError);
}

TEST_CASE("Bergman distance examples") {
  CHECK(bergman_distance(0.0, 0.0) == 0.0);
  CHECK(bergman_distance(0.0, std::tanh(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bergman_distance(0.3, Complex(0.0, -0.2)) == bergman_distance(Complex(0.0, -0.2), 0.3));
  CHECK_THROWS_AS(bergman_distance(Complex(0.6, 0.8), 0.0), DomainError);
}

TEST_CASE("eta and radius are inverse") {
  CHECK(eta_from_radius(1.0) == doctest::Approx(0.7615942).epsilon(1e-7));
  CHECK(eta_from_radius(1e-12) < 1e-11);
  CHECK(std::abs(radius_from_eta(eta_from_radius(0.37)) - 0.37) < 1e-12);
  CHECK_THROWS_AS(eta_from_radius(0.0), DomainError);
  CHECK_THROWS_AS(eta_from_radius(-1.0), DomainError);
  CHECK_THROWS_AS(radius_from_eta(1.0), DomainError);
  double last = 0.0;
  for (double r = 0.05; r < 5.0; r += 0.05) {
    const double e = eta_from_radius(r);
    CHECK(e > last);
    CHECK(std::abs(e - (std::exp(2 * r) - 1) / (std::exp(2 * r) + 1)) < 1e-12);
    last = e;
  }
}

TEST_CASE("Bergman disk realization") {
  SUBCASE("centered at the origin") {
    for (double r : {0.1, 1.0, 3.0}) {
      const auto d = bergman_disk(0.0, r);
      CHECK(std::abs(d.euclidean_center) == 0.0);
      CHECK(d.euclidean_radius == doctest::Approx(std::tanh(r)).epsilon(1e-15));
    }
  }
  SUBCASE("z = 0.5, r = 1 against the bisection oracle") {
    const auto d = bergman_disk(0.5, 1.0);
    const auto [lo, hi] = real_axis_extent(0.5, 1.0);
    CHECK(std::abs(d.euclidean_center.real() - 0.5 * (lo + hi)) < 1e-12);
    CHECK(std::abs(d.euclidean_radius - 0.5 * (hi - lo)) < 1e-12);
    CHECK(d.euclidean_center.real() == doctest::Approx(0.245601).epsilon(1e-5));
    CHECK(d.euclidean_radius == doctest::Approx(0.668070).epsilon(1e-5));
  }
  SUBCASE("membership just inside and outside the rim") {
    const auto d = bergman_disk(0.5, 1.0);
    const Complex in = d.euclidean_center + (d.euclidean_radius - 1e-6);
    const Complex out = d.euclidean_center + (d.euclidean_radius + 1e-6);
    CHECK(d.contains(in));
    CHECK_FALSE(d.contains(out));
    CHECK(pseudo_hyperbolic_distance(0.5, in) < d.pseudo_radius);
    CHECK(pseudo_hyperbolic_distance(0.5, out) > d.pseudo_radius);
  }
  SUBCASE("contained in the unit disk") {
    std::mt19937_64 g(7);
    for (int i = 0; i < 200; ++i) {
      const auto d = bergman_disk(random_point(g, 0.999), 0.1 + 3.0 * unit_uniform(g));
      CHECK(std::abs(d.euclidean_center) + d.euclidean_radius <= 1.0 + 1e-15);
    }
  }
  CHECK_THROWS_AS(bergman_disk(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(bergman_disk(0.2, 0.0), DomainError);
}

TEST_CASE("disk area") {
  CHECK(disk_area(bergman_disk(0.0, 1.0)) == doctest::Approx(1.82219).epsilon(1e-5));
  CHECK(disk_area(bergman_disk(0.0, 1e-8)) < 1e-15);
  // area / (1 - |z|^2)^2 = pi s^2 / (1 - s^2 |z|^2)^2 lies in [pi s^2, pi s^2 / (1 - s^2)^2].
  const double s2 = std::pow(std::tanh(1.0), 2);
  const double c1 = kPi * s2;
  const double c2 = kPi * s2 / std::pow(1.0 - s2, 2);
  CHECK(c1 == doctest::Approx(1.8222).epsilon(1e-4));
  CHECK(c2 == doctest::Approx(10.331).epsilon(1e-3));
  for (double m : {0.5, 0.9, 0.99, 0.999999}) {
    const double ratio = disk_area(bergman_disk(m, 1.0)) / std::pow(1.0 - m * m, 2);
    CHECK(ratio >= c1);
    CHECK(ratio <= c2);
  }
}

TEST_CASE("Carleson box membership and area") {
  const auto box = carleson_box(Complex(0.0, 1.0), 0.3);
  CHECK(box.contains(Complex(0.0, 0.8)));
  CHECK_FALSE(box.contains(Complex(0.0, 0.6)));
  CHECK_FALSE(box.contains(Complex(0.0, 1.05)));  // inside the circle |w - zeta| < r but not in D
  CHECK_THROWS_AS(carleson_box(0.5, 0.3), DomainError);
  CHECK_THROWS_AS(carleson_box(1.0, 0.0), DomainError);

  CHECK(carleson_box_area(carleson_box(1.0, 2.0)) == doctest::Approx(kPi));
  CHECK(carleson_box_area(carleson_box(Complex(0.0, -1.0), 2.5)) == doctest::Approx(kPi));

  SUBCASE("default resolution meets the closed-form lens to 1e-4") {
    for (double r : {1.0, 0.5, 0.2, 1.7}) {
      CHECK(rel_err(carleson_box_area(carleson_box(1.0, r)), lens_area(r)) <= 1e-4);
    }
    const Complex zeta = std::polar(1.0, 2.1);
    CHECK(rel_err(carleson_box_area(carleson_box(zeta, 0.6)), lens_area(0.6)) <= 1e-4);
  }
  SUBCASE("zeta = 1, r = 1 against a Monte Carlo oracle") {
    std::mt19937_64 g(2024);
    const int n = 400000;
    int hits = 0;
    const auto box = carleson_box(1.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const Complex w(unit_uniform(g), -1.0 + 2.0 * unit_uniform(g));  // bounding rectangle [0,1] x [-1,1]
      hits += box.contains(w) ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / n;
    const double estimate = 2.0 * p;
    const double se = 2.0 * std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(carleson_box_area(box) - estimate) <= 3.0 * se);
  }
  SUBCASE("small boxes: area / r^2 is stable") {
    const double a = carleson_box_area(carleson_box(1.0, 1e-2)) / 1e-4;
    const double b = carleson_box_area(carleson_box(1.0, 5e-3)) / 2.5e-5;
    CHECK(std::abs(a - b) / b < 0.05);
    CHECK(b == doctest::Approx(kPi / 2).epsilon(0.02));
  }
  SUBCASE("area never exceeds pi and grows with r") {
    double last = 0.0;
    for (double r = 0.1; r <= 2.0; r += 0.1) {
      const double a = carleson_box_area(carleson_box(1.0, r), 512);
      CHECK(a <= kPi + 1e-12);
      CHECK(a >= last);
      last = a;
    }
  }
}

TEST_CASE("automorphism invariance of rho (100 random triples)") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 100; ++i) {
    const Complex a = random_point(g, 0.95);
    const Complex z = random_point(g, 0.95);
    const Complex w = random_point(g, 0.95);
    const Complex az = disk_automorphism(a, z);
    const Complex aw = disk_automorphism(a, w);
    CHECK(std::abs(pseudo_hyperbolic_distance(az, aw) - pseudo_hyperbolic_distance(z, w)) <= 1e-10);
    CHECK(std::abs(disk_automorphism(a, az) - z) <= 1e-12);
  }
}

TEST_CASE("metric axioms for rho at sampled triples") {
  std::mt19937_64 g(12);
  for (int i = 0; i < 500; ++i) {
    const Complex z = random_point(g, 0.99);
    const Complex w = random_point(g, 0.99);
    const Complex u = random_point(g, 0.99);
    const double zw = pseudo_hyperbolic_distance(z, w);
    CHECK(zw == pseudo_hyperbolic_distance(w, z));
    const double zu = pseudo_hyperbolic_distance(z, u);
    const double uw = pseudo_hyperbolic_distance(u, w);
    CHECK(zw <= (zu + uw) / (1.0 + zu * uw) + 1e-10);
  }
}

TEST_CASE("Euclidean realization agrees with the rho oracle") {
  std::mt19937_64 g(13);
  long disagreements = 0;
  for (int disk = 0; disk < 20; ++disk) {
    const Complex z = random_point(g, 0.99);
    const double r = 0.05 + 2.5 * unit_uniform(g);
    const auto d = bergman_disk(z, r);
    for (int i = 0; i < 5000; ++i) {
      const Complex w = random_point(g, 1.0 - 1e-9);
      const double rho = pseudo_hyperbolic_distance(z, w);
      if (std::abs(rho - d.pseudo_radius) < 1e-9) continue;
      if ((rho < d.pseudo_radius) != d.contains(w)) ++disagreements;
    }
  }
  CHECK(disagreements == 0);
}
