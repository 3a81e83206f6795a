#include "closedrange/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "closedrange/errors.hpp"

namespace closedrange::geometry {

void require_interior(DiskPoint z, const char* what, double guard) {
  if (!(std::abs(z) < 1.0 - guard)) {
    throw DomainError(std::string(what) + " must lie strictly inside the unit disk");
  }
}

double pseudo_hyperbolic_distance(DiskPoint z, DiskPoint w) {
  require_interior(z, "z");
  require_interior(w, "w");
  // Fixed argument order keeps rho(z, w) == rho(w, z) bit for bit.
  if (std::pair(w.real(), w.imag()) < std::pair(z.real(), z.imag())) std::swap(z, w);
  const double rho = std::abs((z - w) / (1.0 - std::conj(z) * w));
  return std::min(rho, 1.0 - 1e-16);
}

double bergman_distance(DiskPoint z, DiskPoint w) {
  return std::atanh(pseudo_hyperbolic_distance(z, w));
}

double eta_from_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("Bergman radius must be positive and finite");
  }
  return std::tanh(r);
}

double radius_from_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw DomainError("pseudo-hyperbolic radius must lie in (0, 1)");
  }
  return std::atanh(eta);
}

Complex disk_automorphism(DiskPoint a, Complex u) {
  return (a - u) / (1.0 - std::conj(a) * u);
}

bool BergmanDisk::contains(Complex w) const {
  return std::abs(w - euclidean_center) < euclidean_radius;
}

BergmanDisk bergman_disk(DiskPoint z, double r) {
  require_interior(z, "disk center");
  const double s = eta_from_radius(r);
  const double z2 = std::norm(z);
  const double denom = 1.0 - s * s * z2;
  BergmanDisk disk;
  disk.center = z;
  disk.bergman_radius = r;
  disk.pseudo_radius = s;
  disk.euclidean_center = (1.0 - s * s) * z / denom;
  disk.euclidean_radius = (1.0 - z2) * s / denom;
  return disk;
}

double disk_area(const BergmanDisk& disk) {
  return kPi * disk.euclidean_radius * disk.euclidean_radius;
}

bool CarlesonBox::contains(Complex w) const {
  return std::abs(w - anchor) < radius && std::abs(w) < 1.0;
}

CarlesonBox carleson_box(DiskPoint zeta, double r) {
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) {
    throw DomainError("Carleson box anchor must lie on the unit circle");
  }
  if (!(r > 0.0)) {
    throw DomainError("Carleson box radius must be positive");
  }
  return CarlesonBox{zeta / std::abs(zeta), r};
}

double carleson_box_area(const CarlesonBox& box, int resolution) {
  if (resolution < 1) {
    throw DomainError("quadrature resolution must be positive");
  }
  if (box.radius >= 2.0) {
    return kPi;
  }
  const double x0 = std::max(-1.0, box.anchor.real() - box.radius);
  const double x1 = std::min(1.0, box.anchor.real() + box.radius);
  const double y0 = std::max(-1.0, box.anchor.imag() - box.radius);
  const double y1 = std::min(1.0, box.anchor.imag() + box.radius);
  const double hx = (x1 - x0) / resolution;
  const double hy = (y1 - y0) / resolution;
  const double r2 = box.radius * box.radius;
  std::int64_t inside = 0;
  for (int i = 0; i < resolution; ++i) {
    const double x = x0 + (i + 0.5) * hx;
    const double dx = x - box.anchor.real();
    for (int j = 0; j < resolution; ++j) {
      const double y = y0 + (j + 0.5) * hy;
      const double dy = y - box.anchor.imag();
      if (x * x + y * y < 1.0 && dx * dx + dy * dy < r2) {
        ++inside;
      }
    }
  }
  return static_cast<double>(inside) * hx * hy;
}

}  // namespace closedrange::geometry
