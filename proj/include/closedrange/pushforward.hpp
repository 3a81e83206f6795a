#pragma once

#include <map>
#include <vector>

#include "closedrange/dirichlet.hpp"
#include "closedrange/numerics.hpp"
#include "closedrange/symbols.hpp"

namespace closedrange::dirichlet {

struct PushforwardOptions {
  double eps = 1e-6;         // counting truncation
  int angular_order = 256;   // rays, trapezoid rule with a half-step offset
  int panel_order = 8;       // Gauss nodes per constant-count piece
  int uniform_panels = 32;   // panels of width 1/32 before boundary grading
  int max_jumps_per_panel = 64;
};

struct WeightedNode {
  DiskPoint point;
  double weight = 0.0;
  int count = 0;
};

/// Quadrature for w-side integrals of the form integral of g(w) n_phi(w) dA(w).
/// Along each ray, n_phi is sampled at graded breakpoints and every jump is
/// located by bisection, so each constant-count piece gets its own Gauss rule.
/// Independent of the z-side pulled-back quadrature.
class PushforwardGrid {
 public:
  static PushforwardGrid build(const symbols::SymbolMap& phi, const PushforwardOptions& options = {});

  const std::vector<WeightedNode>& nodes() const { return nodes_; }

  /// Integral of |f'|^2 n_phi over {n_phi > min_count_exclusive}.
  double energy(const TestFunction& f, int min_count_exclusive = 0) const;
  /// energy(f, k) for every k in ks, with one derivative evaluation per node.
  std::vector<double> energies(const TestFunction& f, const std::vector<int>& ks) const;

  /// Area of {n_phi = c} for each observed count c.
  const std::map<int, double>& area_by_count() const { return area_by_count_; }
  int max_count() const { return max_count_; }
  int failures() const { return failures_; }
  double eps() const { return eps_; }

 private:
  std::vector<WeightedNode> nodes_;
  std::map<int, double> area_by_count_;
  int max_count_ = 0;
  int failures_ = 0;
  double eps_ = 0.0;
};

/// Relative gap between the integral of |(f o phi)'|^2 over |z| < 1 - eps
/// (pulled-back quadrature) and the w-side integral of |f'|^2 n_phi with the
/// same truncation.
struct ChangeOfVariables {
  double left = 0.0;
  double right = 0.0;
  double residual = 0.0;
};

struct ChangeOfVariablesOptions {
  double eps = 1e-6;
  int radial_order = quadrature::kDefaultRadialOrder;
  int angular_order = quadrature::kDefaultAngularOrder;
  PushforwardOptions grid{};
};

ChangeOfVariables change_of_variables(const symbols::SymbolMap& phi, const TestFunction& f,
                                      const ChangeOfVariablesOptions& options = {});
double change_of_variables_residual(const symbols::SymbolMap& phi, const TestFunction& f,
                                    const ChangeOfVariablesOptions& options = {});

/// Max over the family of the integral of |f'|^2 n_phi over {n_phi > k}.
/// A lower estimate of the supremum over the unit sphere.
double tail_functional(const PushforwardGrid& grid, int k, const TestFamily& family);
double tail_functional(const symbols::SymbolMap& phi, int k, const TestFamily& family,
                       const PushforwardOptions& options = {});
/// tail_functional for several thresholds in a single pass over the grid.
std::map<int, double> tail_functionals(const PushforwardGrid& grid, const std::vector<int>& ks,
                                       const TestFamily& family);

}  // namespace closedrange::dirichlet
