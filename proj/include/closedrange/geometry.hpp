#pragma once

#include "closedrange/numerics.hpp"

namespace closedrange::geometry {

/// Pseudo-hyperbolic distance |(z - w) / (1 - conj(z) w)|.
double pseudo_hyperbolic_distance(DiskPoint z, DiskPoint w);

/// Bergman distance, 1/2 log((1 + rho) / (1 - rho)).
double bergman_distance(DiskPoint z, DiskPoint w);

/// Pseudo-hyperbolic radius of the Bergman disk of radius r, i.e. tanh(r).
double eta_from_radius(double r);
double radius_from_eta(double eta);

/// Disk automorphism u -> (a - u) / (1 - conj(a) u). It is an involution.
Complex disk_automorphism(DiskPoint a, Complex u);

/// Bergman disk D(z, r) = D_eta(z) together with its Euclidean realization.
struct BergmanDisk {
  DiskPoint center;
  double bergman_radius = 0.0;
  double pseudo_radius = 0.0;
  DiskPoint euclidean_center;
  double euclidean_radius = 0.0;

  /// Euclidean membership test.
  bool contains(Complex w) const;
};

BergmanDisk bergman_disk(DiskPoint z, double r);

/// Lebesgue area of the disk.
double disk_area(const BergmanDisk& disk);

/// S(zeta, r) = {w in D : |w - zeta| < r}, zeta on the unit circle.
struct CarlesonBox {
  DiskPoint anchor;
  double radius = 0.0;

  bool contains(Complex w) const;
};

CarlesonBox carleson_box(DiskPoint zeta, double r);

inline constexpr int kDefaultBoxResolution = 2048;

/// Area of D ∩ S(zeta, r) by tensor midpoint quadrature of the indicator on
/// the bounding square, `resolution` cells per side.
double carleson_box_area(const CarlesonBox& box, int resolution = kDefaultBoxResolution);

/// Throws DomainError unless |z| < 1 - guard.
void require_interior(DiskPoint z, const char* what, double guard = default_numerics().boundary_guard);

}  // namespace closedrange::geometry
