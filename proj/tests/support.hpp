#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "closedrange/numerics.hpp"

namespace testing_support {

using closedrange::Complex;

/// Uniform point in the disk of radius `radius`.
inline Complex random_point(std::mt19937_64& g, double radius = 1.0) {
  const double r = radius * std::sqrt(closedrange::unit_uniform(g));
  const double t = 2.0 * closedrange::kPi * closedrange::unit_uniform(g);
  return std::polar(r, t);
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace testing_support
