#include "closedrange/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "closedrange/errors.hpp"

namespace closedrange::polynomial {

namespace {

constexpr int kMaxIterations = 80;
constexpr int kCycleBreak = 10;
constexpr double kEps = 1e-15;
// Fractional steps used to break limit cycles.
constexpr double kFractions[] = {0.0, 0.5, 0.25, 0.75, 0.13, 0.38, 0.62, 0.88, 1.0};

// One Laguerre root of a (possibly deflated) polynomial starting from x.
Complex laguerre(std::span<const Complex> a, Complex x) {
  const int m = static_cast<int>(a.size()) - 1;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    Complex b = a[m];
    double err = std::abs(b);
    Complex d{0.0, 0.0};
    Complex f{0.0, 0.0};
    const double abx = std::abs(x);
    for (int j = m - 1; j >= 0; --j) {
      f = x * f + d;
      d = x * d + b;
      b = x * b + a[j];
      err = std::abs(b) + abx * err;
    }
    err *= kEps;
    if (std::abs(b) <= err) return x;
    const Complex g = d / b;
    const Complex g2 = g * g;
    const Complex h = g2 - 2.0 * f / b;
    const Complex sq = std::sqrt(static_cast<double>(m - 1) * (static_cast<double>(m) * h - g2));
    const Complex gp = g + sq;
    const Complex gm = g - sq;
    const double abp = std::abs(gp);
    const double abm = std::abs(gm);
    const Complex denom = abp < abm ? gm : gp;
    const Complex dx = std::max(abp, abm) > 0.0 ? static_cast<double>(m) / denom
                                                 : std::polar(1.0 + abx, static_cast<double>(iter));
    const Complex x1 = x - dx;
    if (x == x1) return x;
    if (iter % kCycleBreak != 0) {
      x = x1;
    } else {
      x -= kFractions[(iter / kCycleBreak) % 9] * dx;
    }
  }
  return x;  // best effort; polishing and residual checks follow
}

}  // namespace

Complex evaluate(std::span<const Complex> coeffs, Complex z) {
  Complex acc{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::pair<Complex, Complex> evaluate_with_derivative(std::span<const Complex> coeffs, Complex z) {
  Complex p{0.0, 0.0};
  Complex dp{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  return {p, dp};
}

Coefficients multiply(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) return {};
  Coefficients out(a.size() + b.size() - 1, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<Complex> roots(std::span<const Complex> coeffs) {
  std::size_t n = coeffs.size();
  while (n > 0 && coeffs[n - 1] == Complex{0.0, 0.0}) --n;
  if (n == 0) throw ConvergenceError("zero polynomial has no isolated roots");
  const int degree = static_cast<int>(n) - 1;
  std::vector<Complex> out;
  out.reserve(degree);
  if (degree == 0) return out;

  Coefficients work(coeffs.begin(), coeffs.begin() + n);
  for (int j = degree; j >= 1; --j) {
    Complex x = laguerre(std::span<const Complex>(work.data(), j + 1), Complex{0.0, 0.0});
    if (std::abs(x.imag()) <= 2.0 * kEps * std::abs(x.real())) x = Complex{x.real(), 0.0};
    out.push_back(x);
    // Synthetic division by (z - x).
    Complex b = work[j];
    for (int i = j - 1; i >= 0; --i) {
      const Complex c = work[i];
      work[i] = b;
      b = x * b + c;
    }
    work.resize(j);
  }

  const std::span<const Complex> full(coeffs.data(), n);
  for (auto& x : out) x = laguerre(full, x);
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return out;
}

}  // namespace closedrange::polynomial
