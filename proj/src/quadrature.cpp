#include "closedrange/quadrature.hpp"

#include <cmath>

#include "closedrange/errors.hpp"

namespace closedrange::quadrature {

GaussRule gauss_legendre(int order) {
  if (order < 1) throw ValidationError("order", "Gauss-Legendre order must be positive");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double derivative = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      derivative = order * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / derivative;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
    rule.nodes[i] = -z;
    rule.nodes[order - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

void append_mapped(const GaussRule& rule, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    nodes.push_back(mid + half * rule.nodes[i]);
    weights.push_back(half * rule.weights[i]);
  }
}

DiskQuadrature build_quadrature(int radial_order, int angular_order, double radial_truncation) {
  if (radial_order < 4) throw ValidationError("quadrature.radial_order", "must be >= 4");
  if (angular_order < 4) throw ValidationError("quadrature.angular_order", "must be >= 4");
  if (!(radial_truncation > 0.9 && radial_truncation < 1.0)) {
    throw ValidationError("quadrature.truncation", "must lie in (0.9, 1)");
  }
  std::vector<double> radii;
  std::vector<double> radial_weights;
  append_mapped(gauss_legendre(radial_order), 0.0, radial_truncation, radii, radial_weights);

  DiskQuadrature quad;
  quad.radial_truncation = radial_truncation;
  quad.radial_order = radial_order;
  quad.angular_order = angular_order;
  quad.nodes.reserve(static_cast<std::size_t>(radial_order) * angular_order);
  const double dtheta = 2.0 * kPi / angular_order;
  for (int j = 0; j < angular_order; ++j) {
    const Complex dir = std::polar(1.0, j * dtheta);
    for (int i = 0; i < radial_order; ++i) {
      quad.nodes.push_back({radii[i] * dir, radial_weights[i] * radii[i] * dtheta});
    }
  }
  return quad;
}

DiskQuadrature build_graded_quadrature(DiskPoint focus, double radial_truncation, int panel_order) {
  if (!(radial_truncation > 0.0 && radial_truncation < 1.0)) {
    throw ValidationError("quadrature.truncation", "must lie in (0, 1)");
  }
  const GaussRule rule = gauss_legendre(panel_order);
  const double gap = 1.0 - radial_truncation;
  const double finest = 0.25 * gap;

  // Radius: [0, 1/2] then panels halving their distance to the truncation radius.
  std::vector<double> radii;
  std::vector<double> radial_weights;
  double lo = 0.0;
  double hi = std::min(0.5, radial_truncation);
  append_mapped(rule, lo, hi, radii, radial_weights);
  double distance = radial_truncation - hi;
  while (distance > finest) {
    lo = radial_truncation - distance;
    distance *= 0.5;
    append_mapped(rule, lo, radial_truncation - distance, radii, radial_weights);
  }
  append_mapped(rule, radial_truncation - distance, radial_truncation, radii, radial_weights);

  // Angle offset from the focus: symmetric panels halving toward 0.
  std::vector<double> offsets;
  std::vector<double> angular_weights;
  std::vector<double> edges{kPi};
  double edge = kPi;
  while (edge > finest) {
    edge *= 0.5;
    edges.push_back(edge);
  }
  edges.push_back(0.0);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    append_mapped(rule, edges[i + 1], edges[i], offsets, angular_weights);
    append_mapped(rule, -edges[i], -edges[i + 1], offsets, angular_weights);
  }

  DiskQuadrature quad;
  quad.radial_truncation = radial_truncation;
  quad.radial_order = static_cast<int>(radii.size());
  quad.angular_order = static_cast<int>(offsets.size());
  const double base = std::arg(focus);
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    const Complex dir = std::polar(1.0, base + offsets[j]);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      quad.nodes.push_back({radii[i] * dir, radial_weights[i] * radii[i] * angular_weights[j]});
    }
  }
  return quad;
}

}  // namespace closedrange::quadrature
