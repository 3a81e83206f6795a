#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace closedrange {

using Complex = std::complex<double>;

/// A point of the closed unit disk, stored as a complex number.
using DiskPoint = Complex;

inline constexpr double kPi = std::numbers::pi;

/// Tolerances shared across modules.
struct NumericsConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  /// Interior-only operations reject points with |z| >= 1 - boundary_guard.
  double boundary_guard = 1e-12;
};

inline const NumericsConfig& default_numerics() {
  static const NumericsConfig config{};
  return config;
}

/// Neumaier-compensated summation; order of additions still matters for the
/// last bit, so callers iterate in a fixed order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Derives the seed of an independent stream from a master seed (splitmix64).
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) built from the top 53 bits, so the stream is the
/// same on every standard library.
inline double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace closedrange
