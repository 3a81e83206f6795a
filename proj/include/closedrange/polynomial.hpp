#pragma once

#include <span>
#include <vector>

#include "closedrange/numerics.hpp"

namespace closedrange::polynomial {

/// Coefficients in increasing degree: c[0] + c[1] z + ... + c[n] z^n.
using Coefficients = std::vector<Complex>;

Complex evaluate(std::span<const Complex> coeffs, Complex z);

/// p(z) and p'(z) by Horner.
std::pair<Complex, Complex> evaluate_with_derivative(std::span<const Complex> coeffs, Complex z);

/// Product of two polynomials.
Coefficients multiply(std::span<const Complex> a, std::span<const Complex> b);

/// All complex roots, repeated by multiplicity. Laguerre's method with
/// deflation, then each root is polished against the undeflated polynomial.
/// Throws ConvergenceError if an iteration fails to settle.
std::vector<Complex> roots(std::span<const Complex> coeffs);

}  // namespace closedrange::polynomial
