#include <algorithm>
#include <cmath>
#include <random>

#include "closedrange/counting.hpp"
#include "closedrange/errors.hpp"
#include "closedrange/symbols.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace closedrange;
using namespace closedrange::counting;
using symbols::build_symbol;
using symbols::SymbolDescriptor;
using testing_support::random_point;

namespace {

// Multiset distance: sorted expansions by multiplicity, matched greedily.
double multiset_gap(std::vector<Preimage> a, std::vector<Preimage> b) {
  auto expand = [](const std::vector<Preimage>& v) {
    std::vector<Complex> out;
    for (const auto& p : v)
      for (int i = 0; i < p.multiplicity; ++i) out.push_back(p.point);
    return out;
  };
  auto x = expand(a);
  auto y = expand(b);
  if (x.size() != y.size()) return INFINITY;
  double worst = 0.0;
  std::vector<bool> used(y.size(), false);
  for (const auto& p : x) {
    double best = INFINITY;
    std::size_t at = 0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(p - y[j]) < best) {
        best = std::abs(p - y[j]);
        at = j;
      }
    }
    used[at] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("winding count examples") {
  CHECK(winding_count(build_symbol(SymbolDescriptor::identity()), 0.3, 0.9) == 1);
  const auto sq = build_symbol(SymbolDescriptor::power(2));
  CHECK(winding_count(sq, 0.25, 0.9) == 2);
  CHECK(winding_count(sq, 0.25, 0.4) == 0);
  // Preimages +-0.5 sit on the circle of radius 0.5; the radius is nudged.
  const int on_circle = winding_count(sq, 0.25, 0.5);
  CHECK((on_circle == 0 || on_circle == 2));
  CHECK(winding_count(build_symbol(SymbolDescriptor::power(3)), 0.0, 0.5) == 3);
}

TEST_CASE("preimage examples") {
  const auto id = build_symbol(SymbolDescriptor::identity());
  const auto p = preimages(id, {0.2, -0.4}, 1e-3);
  REQUIRE(p.size() == 1);
  CHECK(std::abs(p[0].point - Complex(0.2, -0.4)) < 1e-15);
  CHECK(p[0].multiplicity == 1);

  const auto sq = preimages(build_symbol(SymbolDescriptor::power(2)), 0.25, 0.01);
  CHECK(multiset_gap(sq, {{-0.5, 1}, {0.5, 1}}) < 1e-12);

  const auto b = preimages(build_symbol(SymbolDescriptor::blaschke({{0.5, 0.0}, {-0.5, 0.0}})), 0.0, 0.01);
  CHECK(multiset_gap(b, {{-0.5, 1}, {0.5, 1}}) < 1e-12);

  // A double root at the critical point of z^2.
  const auto crit = preimages(build_symbol(SymbolDescriptor::power(2)), 0.0, 0.01);
  REQUIRE(crit.size() == 1);
  CHECK(crit[0].multiplicity == 2);
  CHECK(std::abs(crit[0].point) < 1e-12);

  // Sorted by (re, im).
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i - 1].point.real() <= b[i].point.real());
}

TEST_CASE("counting sample examples") {
  const auto s = counting_sample(build_symbol(SymbolDescriptor::power(2)), 0.25);
  CHECK(s.n == 2);
  CHECK(s.distinct == 2);
  CHECK(s.nevanlinna == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  REQUIRE(s.tau.has_value());
  CHECK(*s.tau == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.truncation == doctest::Approx(1.0 - 1e-3));

  const auto id = build_symbol(SymbolDescriptor::identity());
  std::mt19937_64 g(31);
  for (int i = 0; i < 50; ++i) {
    const auto t = counting_sample(id, random_point(g, 0.99));
    REQUIRE(t.tau.has_value());
    CHECK(*t.tau == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_FALSE(counting_sample(id, 0.0).tau.has_value());

  const auto half = build_symbol(SymbolDescriptor::scaled(0.5));
  for (Complex w : {Complex(0.5, 0.0), Complex(0.0, -0.7), Complex(0.6, 0.6)}) {
    const auto e = counting_sample(half, w);
    CHECK(e.n == 0);
    CHECK(e.nevanlinna == 0.0);
    CHECK(e.preimages.empty());
  }
}

TEST_CASE("counting sample invariants on the corpus") {
  const std::vector<symbols::SymbolMap> maps{
      build_symbol(SymbolDescriptor::power(3)),
      build_symbol(SymbolDescriptor::blaschke({{0.5, 0.0}, {-0.3, 0.2}})),
      build_symbol(SymbolDescriptor::mobius({0.2, 0.3})),
      build_symbol(SymbolDescriptor::crescent()),
      build_symbol(SymbolDescriptor::atomic_singular()),
  };
  std::mt19937_64 g(32);
  for (const auto& phi : maps) {
    CAPTURE(symbols::to_string(phi.kind()));
    for (int i = 0; i < 40; ++i) {
      const Complex w = random_point(g, 0.95);
      const auto s = counting_sample(phi, w, 1e-3);
      int n = 0;
      double nev = 0.0;
      for (const auto& p : s.preimages) {
        n += p.multiplicity;
        nev += p.multiplicity * std::log(1.0 / std::abs(p.point));
        CHECK(std::abs(p.point) <= 1.0 - 1e-3);
        CHECK(std::abs(phi(p.point) - w) <= 1e-10);
      }
      CHECK(s.n == n);
      CHECK(s.nevanlinna >= 0.0);
      CHECK(s.nevanlinna == doctest::Approx(nev).epsilon(1e-10));
      REQUIRE(s.tau.has_value());
      CHECK(*s.tau == doctest::Approx(nev / std::log(1.0 / std::abs(w))).epsilon(1e-10));
      CHECK(count_preimages(phi, w, 1e-3) == s.n);
      CHECK(in_image(phi, w, 1e-3) == (s.n >= 1));
    }
  }
}

TEST_CASE("in_image examples") {
  const auto id = build_symbol(SymbolDescriptor::identity());
  CHECK(in_image(id, {0.3, 0.3}));
  CHECK_FALSE(in_image(build_symbol(SymbolDescriptor::scaled(0.5)), 0.75));
  const auto c = build_symbol(SymbolDescriptor::crescent());
  CHECK_FALSE(in_image(c, 0.9));
  CHECK(in_image(c, -0.5));
  CHECK(count_preimages(id, 1.0) == 0);
  CHECK(count_preimages(id, Complex(3.0, 0.0)) == 0);
}

TEST_CASE("truncation range is enforced") {
  const auto id = build_symbol(SymbolDescriptor::identity());
  CHECK_THROWS_AS(preimages(id, 0.1, 0.5), ValidationError);
  CHECK_THROWS_AS(count_preimages(id, 0.1, 1e-7), ValidationError);
  CHECK_THROWS_AS(counting_sample(id, 0.1, 0.0), ValidationError);
  CHECK_NOTHROW(count_preimages(id, 0.1, 1e-6));
  CHECK_NOTHROW(count_preimages(id, 0.1, 1e-1));
}

TEST_CASE("subdivision agrees with algebraic roots (100 targets)") {
  const std::vector<symbols::SymbolMap> maps{
      build_symbol(SymbolDescriptor::power(3)),
      build_symbol(SymbolDescriptor::blaschke({{0.5, 0.0}, {-0.3, 0.2}, {0.1, -0.7}}, 0.3)),
  };
  std::mt19937_64 g(33);
  for (const auto& phi : maps) {
    CAPTURE(symbols::to_string(phi.kind()));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Complex w = random_point(g, 0.9);
      const auto a = preimages(phi, w, 1e-2, PreimageMethod::automatic);
      const auto b = preimages(phi, w, 1e-2, PreimageMethod::subdivision);
      worst = std::max(worst, multiset_gap(a, b));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("subdivision agrees with closed forms for transcendental and chained maps") {
  const auto atom = build_symbol(SymbolDescriptor::atomic_singular());
  for (Complex w : {Complex(0.3, 0.1), Complex(-0.2, 0.0), Complex(0.05, -0.05)}) {
    const auto a = preimages(atom, w, 0.1, PreimageMethod::automatic);
    const auto b = preimages(atom, w, 0.1, PreimageMethod::subdivision);
    CHECK(multiset_gap(a, b) <= 1e-10);
  }
  const auto chain = build_symbol(
      SymbolDescriptor::chain({SymbolDescriptor::power(2), SymbolDescriptor::mobius({0.3, 0.0})}));
  std::mt19937_64 g(34);
  for (int i = 0; i < 20; ++i) {
    const Complex w = random_point(g, 0.8);
    CHECK(count_preimages(chain, w, 1e-3) == 2);
    for (const auto& p : preimages(chain, w, 1e-3)) CHECK(std::abs(chain(p.point) - w) <= 1e-10);
  }
}

TEST_CASE("crescent membership agrees with the exact region test") {
  const auto phi = build_symbol(SymbolDescriptor::crescent());
  const auto& region = *phi.crescent_region();
  std::mt19937_64 g(35);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    const Complex w = random_point(g, 1.0 - 1e-9);
    if (std::abs(std::abs(w - region.inner_center) - region.inner_radius) < 1e-6) continue;
    if (in_image(phi, w, 1e-6) != region.contains(w)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("count is monotone in the truncation") {
  const std::vector<symbols::SymbolMap> maps{
      build_symbol(SymbolDescriptor::atomic_singular()),
      build_symbol(SymbolDescriptor::power(4)),
      build_symbol(SymbolDescriptor::blaschke({{0.9, 0.0}, {0.0, -0.95}})),
  };
  std::mt19937_64 g(36);
  for (const auto& phi : maps) {
    for (int i = 0; i < 200; ++i) {
      const Complex w = random_point(g, 0.999);
      int last = 0;
      for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const int n = count_preimages(phi, w, eps);
        CHECK(n >= last);
        last = n;
      }
    }
  }
}

TEST_CASE("atomic singular count grows without bound as eps shrinks") {
  const auto atom = build_symbol(SymbolDescriptor::atomic_singular());
  const Complex w(0.2, 0.1);
  const int a = count_preimages(atom, w, 1e-2);
  const int b = count_preimages(atom, w, 1e-4);
  const int c = count_preimages(atom, w, 1e-6);
  CHECK(a >= 1);
  CHECK(b > 5 * a);
  CHECK(c > 5 * b);
  const auto s = counting_sample(atom, w, 1e-3);
  REQUIRE(s.annulus_error_bar.has_value());
  CHECK(*s.annulus_error_bar > 0.0);
  // Tighter truncation, smaller bound on the missing Nevanlinna mass.
  CHECK(*counting_sample(atom, w, 1e-5).annulus_error_bar < *s.annulus_error_bar);
}

TEST_CASE("Newton polishing") {
  const auto phi = build_symbol(SymbolDescriptor::blaschke({{0.5, 0.0}, {-0.3, 0.2}}));
  const Complex w(0.1, 0.2);
  const auto exact = preimages(phi, w, 1e-3);
  REQUIRE_FALSE(exact.empty());
  const auto [z, residual] = newton_polish(phi, w, exact[0].point + Complex(1e-3, -1e-3));
  CHECK(residual <= 1e-12);
  CHECK(std::abs(z - exact[0].point) <= 1e-10);
}
