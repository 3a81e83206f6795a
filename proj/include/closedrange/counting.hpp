#pragma once

#include <optional>
#include <string>
#include <vector>

#include "closedrange/numerics.hpp"
#include "closedrange/symbols.hpp"

namespace closedrange::counting {

using symbols::SymbolMap;

struct Preimage {
  DiskPoint point;
  int multiplicity = 1;
};

/// Counting data of phi at a target w, restricted to |z| <= 1 - eps.
struct CountingSample {
  DiskPoint target;
  std::vector<Preimage> preimages;
  int n = 0;         // with multiplicity
  int distinct = 0;  // cardinality of the preimage set
  double nevanlinna = 0.0;
  std::optional<double> tau;  // undefined at w = 0
  double truncation = 0.0;    // search radius 1 - eps
  /// Bound on the Nevanlinna mass of preimages outside the search radius,
  /// when one is available.
  std::optional<double> annulus_error_bar;
};

enum class PreimageMethod {
  automatic,   // closed form or algebraic roots where the kind allows it
  subdivision  // argument-principle quadtree for every kind
};

inline constexpr double kDefaultTruncation = 1e-3;
inline constexpr double kMinTruncation = 1e-6;
inline constexpr double kMaxTruncation = 1e-1;

/// Number of solutions of phi(z) = w inside |z| < circle_radius, with
/// multiplicity, from the argument principle. The radius is nudged when a
/// preimage sits on the circle; ContourError after 8 failed nudges.
int winding_count(const SymbolMap& phi, DiskPoint w, double circle_radius);

/// Preimages of w inside |z| <= 1 - eps, sorted by (re, im).
std::vector<Preimage> preimages(const SymbolMap& phi, DiskPoint w, double eps = kDefaultTruncation,
                                PreimageMethod method = PreimageMethod::automatic);

CountingSample counting_sample(const SymbolMap& phi, DiskPoint w, double eps = kDefaultTruncation,
                               PreimageMethod method = PreimageMethod::automatic);

/// n_phi(w) with multiplicity; faster than counting_sample for kinds with a
/// closed-form count. Returns 0 for |w| >= 1.
int count_preimages(const SymbolMap& phi, DiskPoint w, double eps = kDefaultTruncation);

/// w in phi(D) up to the truncation. Crescent symbols use the exact region test.
bool in_image(const SymbolMap& phi, DiskPoint w, double eps = kDefaultTruncation);

/// Newton iteration for phi(z) = w with damping on residual increase.
/// Returns the polished point and its residual.
std::pair<Complex, double> newton_polish(const SymbolMap& phi, DiskPoint w, Complex z0);

}  // namespace closedrange::counting
