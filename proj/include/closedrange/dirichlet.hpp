#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "closedrange/numerics.hpp"
#include "closedrange/quadrature.hpp"
#include "closedrange/symbols.hpp"

namespace closedrange::dirichlet {

using quadrature::DiskQuadrature;
using symbols::SymbolMap;

/// Largest polynomial degree a DirichletFunction may carry.
inline constexpr int kMaxDegree = 4096;

/// Truncated power series f(z) = sum a_n z^n.
class DirichletFunction {
 public:
  DirichletFunction() : coefficients_{Complex{0.0, 0.0}} {}
  explicit DirichletFunction(std::vector<Complex> coefficients, std::string label = {});

  /// c z^n
  static DirichletFunction monomial(int n, Complex c = 1.0);
  /// Orthonormal basis e_0 = 1, e_n = z^n / sqrt(pi n).
  static DirichletFunction basis(int n);

  const std::vector<Complex>& coefficients() const { return coefficients_; }
  const std::string& label() const { return label_; }
  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }

  Complex value(Complex z) const;
  Complex derivative(Complex z) const;
  std::pair<Complex, Complex> value_and_derivative(Complex z) const;

  DirichletFunction scaled(Complex c) const;

 private:
  std::vector<Complex> coefficients_;
  std::string label_;
};

/// ||f||^2 = |a_0|^2 + pi sum n |a_n|^2.
double dirichlet_norm(const DirichletFunction& f);

/// |f(0)|^2 + integral of |f'|^2 over the quadrature region.
double dirichlet_norm_quadrature(const DirichletFunction& f, const DiskQuadrature& quad);

/// <f, g> = a_0 conj(b_0) + pi sum n a_n conj(b_n).
Complex inner_product(const DirichletFunction& f, const DirichletFunction& g);

enum class KernelKind {
  dirichlet_kernel,   // K_w(z) = 1 + (1/pi) log(1 / (1 - z conj(w)))
  normalized_bergman  // k_w(z) = (1 - |w|^2) / (1 - conj(w) z)^2
};

struct KernelSpec {
  DiskPoint anchor;
  KernelKind kind = KernelKind::dirichlet_kernel;

  Complex value(Complex z) const;
  Complex derivative(Complex z) const;
  /// Closed-form Dirichlet norm.
  double norm() const;
  /// Power series truncated where the tail drops below 1e-12 (capped at kMaxDegree).
  DirichletFunction series() const;
};

/// Number of dirichlet_kernel series terms needed for a 1e-12 tail at |w|.
int kernel_series_length(double modulus);

struct ReproduceCheck {
  double residual = 0.0;
  /// Set for |w| > 0.95, where the kernel series is long and the check is loose.
  bool truncation_warning = false;
};

/// |<f, K_w> - f(w)| using the truncated kernel series.
ReproduceCheck kernel_reproduce_check(const DirichletFunction& f, DiskPoint w);

/// Peak function ((1 + conj(zeta) z) / 2)^k evaluated in closed form.
struct PeakProbe {
  DiskPoint zeta{1.0, 0.0};
  int k = 1;

  Complex value(Complex z) const;
  Complex derivative(Complex z) const;
  double norm() const;
};

/// f_k = ((1 + conj(zeta) z) / 2)^k expanded into coefficients.
DirichletFunction peak_function(DiskPoint zeta, int k);

/// A member of a test family: a polynomial, a kernel, or a peak function,
/// times a scale factor (1 / norm when normalized).
class TestFunction {
 public:
  using Shape = std::variant<DirichletFunction, KernelSpec, PeakProbe>;

  TestFunction(DirichletFunction f) : shape_(std::move(f)) {}  // NOLINT: implicit by design of the family API
  TestFunction(KernelSpec k) : shape_(k) {}                     // NOLINT
  TestFunction(PeakProbe p) : shape_(p) {}                      // NOLINT

  Complex value(Complex z) const;
  Complex derivative(Complex z) const;
  /// Dirichlet norm including the scale.
  double norm() const;
  TestFunction normalized() const;
  std::string label() const;
  const Shape& shape() const { return shape_; }
  double scale() const { return scale_; }

 private:
  Shape shape_;
  double scale_ = 1.0;
};

struct TestFamily {
  std::vector<TestFunction> members;
  bool normalized = false;
};

struct FamilyConfig {
  int max_monomial_degree = 40;
  int random_count = 100;
  int random_degree = 8;
  std::uint64_t seed = 42;
  std::vector<int> peak_orders{1, 2, 4, 8, 16, 32};
  std::vector<double> probe_radii{0.5, 0.75, 0.9, 0.95, 0.99};
  int probe_angles = 8;

  bool operator==(const FamilyConfig&) const = default;
};

/// Polynomial with independent standard complex Gaussian coefficients
/// (real part drawn before imaginary, a_0 first). The constant term is
/// still drawn when vanish_at_origin zeroes it, so streams stay aligned.
DirichletFunction random_polynomial(std::mt19937_64& engine, int degree, bool vanish_at_origin = false,
                                    std::string label = {});

/// Monomial basis, seeded random unit-norm polynomials, normalized peak
/// functions and normalized Bergman-kernel probes. Always normalized.
TestFamily default_family(const FamilyConfig& config = {});

/// phi and phi' sampled at quadrature nodes, reusable across test functions.
struct Pullback {
  std::vector<Complex> value;
  std::vector<Complex> derivative;
  std::vector<double> weight;
  Complex value_at_origin;
  int failures = 0;  // nodes where phi could not be evaluated (dropped)
};

Pullback pullback(const SymbolMap& phi, const DiskQuadrature& quad);

/// Integral of |f'(phi)|^2 |phi'|^2 over the quadrature region.
double pullback_energy(const Pullback& nodes, const TestFunction& f);

/// ||C_phi f|| = sqrt(|f(phi(0))|^2 + integral of |(f o phi)'|^2).
double composition_norm(const SymbolMap& phi, const TestFunction& f, const DiskQuadrature& quad);
double composition_norm(const SymbolMap& phi, const TestFunction& f);

struct PeakRatioOptions {
  int radial_order = quadrature::kPeakRadialOrder;
  int angular_order = 1024;
  double truncation = quadrature::kDefaultTruncation;
  double eps = 1e-6;        // counting truncation for the w-side route
  int w_angular_order = 1024;
};

/// r_k = ||C_phi f_k||^2 / ||f_k||^2 for each k. Symbols regular on the
/// closed disk use the pulled-back quadrature; others use the w-side
/// integral of |f_k'|^2 n_phi.
std::vector<double> peak_ratio_sequence(const SymbolMap& phi, DiskPoint zeta, const std::vector<int>& ks,
                                        const PeakRatioOptions& options = {});

struct BoundednessEstimate {
  double estimate = 0.0;  // at the refined truncation eps / 10
  double coarse = 0.0;    // at eps
  double growth = 0.0;    // estimate / coarse
  bool divergence_suspected = false;
  std::string argmax;     // family member attaining the refined maximum
  double eps = 0.0;
};

struct BoundednessOptions {
  int radial_order = quadrature::kDefaultRadialOrder;
  int angular_order = quadrature::kFamilyAngularOrder;
  double growth_threshold = 2.0;
};

/// Max over the family of the integral of |f'(phi)|^2 |phi'|^2 over
/// |z| < 1 - eps, at eps and eps / 10; a lower estimate of the Carleson
/// constant of n_phi dA.
BoundednessEstimate boundedness_estimate(const SymbolMap& phi, const TestFamily& family, double eps,
                                         const BoundednessOptions& options = {});

}  // namespace closedrange::dirichlet
