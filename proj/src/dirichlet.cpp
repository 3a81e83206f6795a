#include "closedrange/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "closedrange/errors.hpp"
#include "closedrange/geometry.hpp"
#include "closedrange/polynomial.hpp"
#include "closedrange/pushforward.hpp"

namespace closedrange::dirichlet {

namespace {

constexpr double kSeriesTail = 1e-12;
constexpr double kWarnRadius = 0.95;

// Binomial weights C(k, j) / 2^k.
std::vector<double> binomial_weights(int k) {
  std::vector<double> c(static_cast<std::size_t>(k) + 1);
  if (k <= 1000) {
    c[0] = std::ldexp(1.0, -k);
    for (int j = 0; j < k; ++j) c[j + 1] = c[j] * (k - j) / (j + 1);
  } else {
    const double base = std::lgamma(k + 1.0) - k * std::log(2.0);
    for (int j = 0; j <= k; ++j) c[j] = std::exp(base - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0));
  }
  return c;
}

double gaussian(std::mt19937_64& engine) {
  // Box-Muller on the portable uniform stream.
  const double u1 = 1.0 - unit_uniform(engine);
  const double u2 = unit_uniform(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::string format_point(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

DirichletFunction::DirichletFunction(std::vector<Complex> coefficients, std::string label)
    : coefficients_(std::move(coefficients)), label_(std::move(label)) {
  if (coefficients_.empty()) coefficients_.push_back(Complex{0.0, 0.0});
  if (static_cast<int>(coefficients_.size()) - 1 > kMaxDegree) {
    throw ValidationError("function.coefficients", "degree exceeds the configured maximum");
  }
}

DirichletFunction DirichletFunction::monomial(int n, Complex c) {
  if (n < 0) throw ValidationError("function.degree", "monomial degree must be >= 0");
  std::vector<Complex> coeffs(static_cast<std::size_t>(n) + 1, Complex{0.0, 0.0});
  coeffs[n] = c;
  return DirichletFunction(std::move(coeffs), "z^" + std::to_string(n));
}

DirichletFunction DirichletFunction::basis(int n) {
  if (n == 0) return DirichletFunction({Complex{1.0, 0.0}}, "e_0");
  auto f = monomial(n, 1.0 / std::sqrt(kPi * n));
  f.label_ = "e_" + std::to_string(n);
  return f;
}

Complex DirichletFunction::value(Complex z) const { return polynomial::evaluate(coefficients_, z); }

Complex DirichletFunction::derivative(Complex z) const { return value_and_derivative(z).second; }

std::pair<Complex, Complex> DirichletFunction::value_and_derivative(Complex z) const {
  return polynomial::evaluate_with_derivative(coefficients_, z);
}

DirichletFunction DirichletFunction::scaled(Complex c) const {
  auto coeffs = coefficients_;
  for (auto& a : coeffs) a *= c;
  return DirichletFunction(std::move(coeffs), label_);
}

double dirichlet_norm(const DirichletFunction& f) {
  const auto& a = f.coefficients();
  CompensatedSum sum;
  for (std::size_t n = 1; n < a.size(); ++n) sum.add(static_cast<double>(n) * std::norm(a[n]));
  return std::sqrt(std::norm(a[0]) + kPi * sum.value());
}

double dirichlet_norm_quadrature(const DirichletFunction& f, const DiskQuadrature& quad) {
  const double energy = quad.integrate([&](Complex z) { return std::norm(f.derivative(z)); });
  return std::sqrt(std::norm(f.value(0.0)) + energy);
}

Complex inner_product(const DirichletFunction& f, const DirichletFunction& g) {
  const auto& a = f.coefficients();
  const auto& b = g.coefficients();
  const std::size_t n = std::min(a.size(), b.size());
  Complex sum{0.0, 0.0};
  for (std::size_t k = 1; k < n; ++k) sum += static_cast<double>(k) * a[k] * std::conj(b[k]);
  return a[0] * std::conj(b[0]) + kPi * sum;
}

// ---------------------------------------------------------------------------

Complex KernelSpec::value(Complex z) const {
  if (kind == KernelKind::dirichlet_kernel) return 1.0 + std::log(1.0 / (1.0 - z * std::conj(anchor))) / kPi;
  const Complex den = 1.0 - std::conj(anchor) * z;
  return (1.0 - std::norm(anchor)) / (den * den);
}

Complex KernelSpec::derivative(Complex z) const {
  const Complex den = 1.0 - std::conj(anchor) * z;
  if (kind == KernelKind::dirichlet_kernel) return std::conj(anchor) / (kPi * den);
  return 2.0 * std::conj(anchor) * (1.0 - std::norm(anchor)) / (den * den * den);
}

double KernelSpec::norm() const {
  const double x = std::norm(anchor);
  if (kind == KernelKind::dirichlet_kernel) return std::sqrt(1.0 - std::log1p(-x) / kPi);
  const double one_minus = 1.0 - x;
  return std::sqrt(one_minus * one_minus + kPi * x * (4.0 + 2.0 * x) / (one_minus * one_minus));
}

int kernel_series_length(double modulus) {
  if (modulus == 0.0) return 0;
  int n = 1;
  while (n < kMaxDegree && std::pow(modulus, n + 1) / (kPi * (n + 1) * (1.0 - modulus)) >= kSeriesTail) ++n;
  return n;
}

DirichletFunction KernelSpec::series() const {
  const double r = std::abs(anchor);
  const Complex wbar = std::conj(anchor);
  std::vector<Complex> coeffs;
  if (kind == KernelKind::dirichlet_kernel) {
    const int n = kernel_series_length(r);
    coeffs.resize(static_cast<std::size_t>(n) + 1);
    coeffs[0] = 1.0;
    Complex p = 1.0;
    for (int k = 1; k <= n; ++k) {
      p *= wbar;
      coeffs[k] = p / (kPi * k);
    }
    return DirichletFunction(std::move(coeffs), "K_" + format_point(anchor));
  }
  const double scale = 1.0 - r * r;
  Complex p = 1.0;
  coeffs.push_back(scale);
  for (int k = 1; k <= kMaxDegree; ++k) {
    p *= wbar;
    coeffs.push_back(scale * (k + 1.0) * p);
    if ((k + 2.0) * std::pow(r, k + 1) / ((1.0 - r) * (1.0 - r)) < kSeriesTail) break;
  }
  return DirichletFunction(std::move(coeffs), "k_" + format_point(anchor));
}

ReproduceCheck kernel_reproduce_check(const DirichletFunction& f, DiskPoint w) {
  geometry::require_interior(w, "kernel anchor");
  ReproduceCheck check;
  check.truncation_warning = std::abs(w) > kWarnRadius;
  const KernelSpec kernel{w, KernelKind::dirichlet_kernel};
  check.residual = std::abs(inner_product(f, kernel.series()) - f.value(w));
  return check;
}

// ---------------------------------------------------------------------------

Complex PeakProbe::value(Complex z) const { return std::pow(0.5 * (1.0 + std::conj(zeta) * z), k); }

Complex PeakProbe::derivative(Complex z) const {
  const Complex base = 0.5 * (1.0 + std::conj(zeta) * z);
  return 0.5 * k * std::conj(zeta) * (k == 1 ? Complex{1.0, 0.0} : std::pow(base, k - 1));
}

double PeakProbe::norm() const {
  const auto c = binomial_weights(k);
  CompensatedSum sum;
  for (int j = 1; j <= k; ++j) sum.add(j * c[j] * c[j]);
  return std::sqrt(c[0] * c[0] + kPi * sum.value());
}

DirichletFunction peak_function(DiskPoint zeta, int k) {
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw DomainError("peak point must lie on the unit circle");
  if (k < 1 || k > kMaxDegree) throw ValidationError("k", "peak order must lie in [1, kMaxDegree]");
  const auto c = binomial_weights(k);
  std::vector<Complex> coeffs(c.size());
  Complex p = 1.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    coeffs[j] = c[j] * p;
    p *= std::conj(zeta);
  }
  return DirichletFunction(std::move(coeffs), "f_" + std::to_string(k) + "@" + format_point(zeta));
}

// ---------------------------------------------------------------------------

Complex TestFunction::value(Complex z) const {
  return scale_ * std::visit([&](const auto& s) { return s.value(z); }, shape_);
}

Complex TestFunction::derivative(Complex z) const {
  return scale_ * std::visit([&](const auto& s) { return s.derivative(z); }, shape_);
}

double TestFunction::norm() const {
  const double raw = std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, DirichletFunction>) {
          return dirichlet_norm(s);
        } else {
          return s.norm();
        }
      },
      shape_);
  return scale_ * raw;
}

TestFunction TestFunction::normalized() const {
  TestFunction out = *this;
  const double n = norm();
  if (n > 0.0) out.scale_ = scale_ / n;
  return out;
}

std::string TestFunction::label() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DirichletFunction>) {
          return s.label();
        } else if constexpr (std::is_same_v<T, KernelSpec>) {
          return (s.kind == KernelKind::dirichlet_kernel ? "K_" : "k_") + format_point(s.anchor);
        } else {
          return "f_" + std::to_string(s.k) + "@" + format_point(s.zeta);
        }
      },
      shape_);
}

DirichletFunction random_polynomial(std::mt19937_64& engine, int degree, bool vanish_at_origin, std::string label) {
  if (degree < 0 || degree > kMaxDegree) throw ValidationError("degree", "must lie in [0, 4096]");
  std::vector<Complex> coeffs(static_cast<std::size_t>(degree) + 1);
  for (auto& c : coeffs) {
    const double re = gaussian(engine);
    const double im = gaussian(engine);
    c = Complex{re, im};
  }
  if (vanish_at_origin) coeffs[0] = 0.0;
  return DirichletFunction(std::move(coeffs), std::move(label));
}

TestFamily default_family(const FamilyConfig& config) {
  TestFamily family;
  family.normalized = true;
  for (int n = 1; n <= config.max_monomial_degree; ++n) family.members.emplace_back(DirichletFunction::basis(n));

  std::mt19937_64 engine(config.seed);
  for (int i = 0; i < config.random_count; ++i) {
    const auto f = random_polynomial(engine, config.random_degree, false, "random_" + std::to_string(i));
    family.members.push_back(TestFunction(f).normalized());
  }

  for (int a = 0; a < config.probe_angles; ++a) {
    const Complex dir = std::polar(1.0, 2.0 * kPi * a / config.probe_angles);
    for (int k : config.peak_orders) family.members.push_back(TestFunction(PeakProbe{dir, k}).normalized());
    for (double r : config.probe_radii) {
      family.members.push_back(TestFunction(KernelSpec{r * dir, KernelKind::normalized_bergman}).normalized());
    }
  }
  return family;
}

// ---------------------------------------------------------------------------

Pullback pullback(const SymbolMap& phi, const DiskQuadrature& quad) {
  Pullback out;
  out.value.reserve(quad.nodes.size());
  out.derivative.reserve(quad.nodes.size());
  out.weight.reserve(quad.nodes.size());
  for (const auto& node : quad.nodes) {
    try {
      const auto e = phi.evaluate(node.point);
      if (!std::isfinite(std::abs(e.derivative))) {
        ++out.failures;
        continue;
      }
      out.value.push_back(e.value);
      out.derivative.push_back(e.derivative);
      out.weight.push_back(node.weight);
    } catch (const std::exception&) {
      ++out.failures;
    }
  }
  out.value_at_origin = phi(0.0);
  return out;
}

double pullback_energy(const Pullback& nodes, const TestFunction& f) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < nodes.value.size(); ++i) {
    sum.add(nodes.weight[i] * std::norm(f.derivative(nodes.value[i]) * nodes.derivative[i]));
  }
  return sum.value();
}

double composition_norm(const SymbolMap& phi, const TestFunction& f, const DiskQuadrature& quad) {
  const auto nodes = pullback(phi, quad);
  return std::sqrt(std::norm(f.value(nodes.value_at_origin)) + pullback_energy(nodes, f));
}

double composition_norm(const SymbolMap& phi, const TestFunction& f) {
  static const DiskQuadrature quad = quadrature::build_quadrature();
  return composition_norm(phi, f, quad);
}

std::vector<double> peak_ratio_sequence(const SymbolMap& phi, DiskPoint zeta, const std::vector<int>& ks,
                                        const PeakRatioOptions& options) {
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw DomainError("peak point must lie on the unit circle");
  if (!std::is_sorted(ks.begin(), ks.end()) || std::adjacent_find(ks.begin(), ks.end()) != ks.end()) {
    throw ValidationError("ks", "peak orders must be strictly increasing");
  }
  std::vector<double> ratios;
  ratios.reserve(ks.size());
  const Complex origin_image = phi(0.0);
  if (phi.boundary_regular()) {
    const auto quad = quadrature::build_quadrature(options.radial_order, options.angular_order, options.truncation);
    const auto nodes = pullback(phi, quad);
    for (int k : ks) {
      const PeakProbe f{zeta, k};
      const double numerator = std::norm(f.value(origin_image)) + pullback_energy(nodes, f);
      const double denominator = f.norm() * f.norm();
      ratios.push_back(numerator / denominator);
    }
  } else {
    PushforwardOptions grid_options;
    grid_options.eps = options.eps;
    grid_options.angular_order = options.w_angular_order;
    const auto grid = PushforwardGrid::build(phi, grid_options);
    for (int k : ks) {
      const PeakProbe f{zeta, k};
      const double numerator = std::norm(f.value(origin_image)) + grid.energy(f);
      const double denominator = f.norm() * f.norm();
      ratios.push_back(numerator / denominator);
    }
  }
  return ratios;
}

namespace {

struct EnergyMax {
  double value = 0.0;
  std::string argmax;
};

// Pulling back stretches angular features by |phi'| on the circle, so the
// angular rule is refined by that factor (rounded up to a power of two).
int pulled_back_angular_order(const SymbolMap& phi, int angular_order) {
  double stretch = 1.0;
  for (int j = 0; j < 256; ++j) {
    const Complex z = std::polar(1.0 - 1e-9, 2.0 * kPi * j / 256.0);
    stretch = std::max(stretch, std::abs(symbols::eval_with_derivative(phi, z).derivative));
  }
  int factor = 1;
  while (factor < stretch && factor < 16) factor *= 2;
  return angular_order * factor;
}

EnergyMax family_energy_max(const SymbolMap& phi, const TestFamily& family, double eps,
                            const BoundednessOptions& options) {
  EnergyMax best;
  auto consider = [&](const TestFunction& f, double energy) {
    if (energy > best.value) {
      best.value = energy;
      best.argmax = f.label();
    }
  };
  if (phi.boundary_regular() || phi.boundary_singularity()) {
    const auto quad = phi.boundary_regular()
                          ? quadrature::build_quadrature(options.radial_order,
                                                         pulled_back_angular_order(phi, options.angular_order), 1.0 - eps)
                          : quadrature::build_graded_quadrature(*phi.boundary_singularity(), 1.0 - eps);
    const auto nodes = pullback(phi, quad);
    for (const auto& f : family.members) consider(f, pullback_energy(nodes, f));
  } else {
    PushforwardOptions grid_options;
    grid_options.eps = eps;
    const auto grid = PushforwardGrid::build(phi, grid_options);
    for (const auto& f : family.members) consider(f, grid.energy(f));
  }
  return best;
}

}  // namespace

BoundednessEstimate boundedness_estimate(const SymbolMap& phi, const TestFamily& family, double eps,
                                         const BoundednessOptions& options) {
  if (!(eps > 0.0 && eps < 0.1)) throw ValidationError("eps", "boundedness truncation must lie in (0, 0.1)");
  if (family.members.empty()) throw ValidationError("family", "test family is empty");
  BoundednessEstimate out;
  out.eps = eps;
  const auto coarse = family_energy_max(phi, family, eps, options);
  const auto fine = family_energy_max(phi, family, eps / 10.0, options);
  out.coarse = coarse.value;
  out.estimate = fine.value;
  out.argmax = fine.argmax;
  out.growth = coarse.value > 0.0 ? fine.value / coarse.value : 1.0;
  out.divergence_suspected = out.growth >= options.growth_threshold;
  return out;
}

}  // namespace closedrange::dirichlet
