#pragma once

#include <optional>
#include <string>
#include <vector>

#include "closedrange/numerics.hpp"

namespace closedrange::symbols {

enum class SymbolKind { identity, mobius, power, blaschke, crescent, scaled, atomic_singular, chain };

const char* to_string(SymbolKind kind);
SymbolKind symbol_kind_from_string(const std::string& name);

/// Plain description of a self-map; only the fields used by `kind` matter.
struct SymbolDescriptor {
  SymbolKind kind = SymbolKind::identity;
  DiskPoint a{0.0, 0.0};               // mobius
  double phase = 0.0;                  // mobius, blaschke
  int degree = 1;                      // power
  std::vector<DiskPoint> zeros;        // blaschke
  DiskPoint tangent_point{1.0, 0.0};   // crescent
  double inner_radius = 0.25;          // crescent
  double factor = 0.5;                 // scaled
  std::vector<SymbolDescriptor> maps;  // chain, applied first to last

  static SymbolDescriptor identity();
  static SymbolDescriptor mobius(DiskPoint a, double phase = 0.0);
  static SymbolDescriptor power(int n);
  static SymbolDescriptor blaschke(std::vector<DiskPoint> zeros, double phase = 0.0);
  static SymbolDescriptor crescent(DiskPoint tangent_point = {1.0, 0.0}, double inner_radius = 0.25);
  static SymbolDescriptor scaled(double c);
  static SymbolDescriptor atomic_singular();
  static SymbolDescriptor chain(std::vector<SymbolDescriptor> maps);

  bool operator==(const SymbolDescriptor&) const = default;
};

/// Omega = D minus the closed disk internally tangent to T at tangent_point.
struct CrescentRegion {
  DiskPoint tangent_point{1.0, 0.0};
  DiskPoint inner_center{0.75, 0.0};
  double inner_radius = 0.25;

  static CrescentRegion make(DiskPoint tangent_point, double inner_radius);
  bool contains(Complex w) const;
};

struct Evaluation {
  Complex value;
  Complex derivative;
};

/// An analytic self-map of the unit disk. Immutable once built.
class SymbolMap {
 public:
  const SymbolDescriptor& descriptor() const { return descriptor_; }
  SymbolKind kind() const { return descriptor_.kind; }

  /// Value and derivative; throws DomainError for |z| >= 1 - 1e-12 and
  /// OverflowError within 1e-9 of the atomic singularity at z = 1.
  Evaluation evaluate(Complex z) const;
  Complex operator()(Complex z) const { return evaluate(z).value; }

  /// Number of preimages of a generic point, when finite.
  std::optional<int> degree() const;

  /// True when the map extends analytically across the unit circle, so
  /// tensor quadrature on the disk resolves |phi'|^2.
  bool boundary_regular() const;

  /// Boundary point where |phi'| blows up, if the map has a single one.
  std::optional<DiskPoint> boundary_singularity() const;

  /// Crescent only: the target region and the inverse Riemann map.
  const CrescentRegion* crescent_region() const;
  Complex crescent_inverse(Complex w) const;

  const std::vector<SymbolMap>& chain() const { return chain_; }

 private:
  friend SymbolMap build_symbol(const SymbolDescriptor& spec);
  friend SymbolMap crescent_map(const CrescentRegion& region);

  Evaluation evaluate_unguarded(Complex z) const;

  SymbolDescriptor descriptor_;
  std::vector<SymbolMap> chain_;
  // Crescent chain constants: strip width and the precomposed automorphism.
  CrescentRegion region_;
  double strip_width_ = 0.0;
  Complex shift_{0.0, 0.0};
};

/// Validates the descriptor and checks the self-map property.
/// Throws ValidationError naming the offending field.
SymbolMap build_symbol(const SymbolDescriptor& spec);

Evaluation eval_with_derivative(const SymbolMap& phi, Complex z);

/// Riemann map of the crescent, built as automorphism -> Cayley -> log ->
/// affine -> inverse of u -> 1/(1 - conj(zeta) u). phi(0) = -inner_radius * zeta.
SymbolMap crescent_map(const CrescentRegion& region);

inline constexpr int kSelfMapSamples = 4096;
inline constexpr double kSelfMapRadius = 1.0 - 1e-6;

/// 1 - max |phi| over the circle of radius 1 - 1e-6.
double verify_self_map(const SymbolMap& phi, int samples = kSelfMapSamples);

}  // namespace closedrange::symbols
