#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "closedrange/dirichlet.hpp"
#include "closedrange/geometry.hpp"
#include "closedrange/numerics.hpp"
#include "closedrange/pushforward.hpp"
#include "closedrange/symbols.hpp"

namespace closedrange::carleson {

using geometry::CarlesonBox;
using symbols::SymbolMap;

/// Sampling parameters shared by the density estimators.
struct DensityQuery {
  double bergman_radius = 1.0;  // r in D(z, r)
  double alpha = 1.0;           // exponent on n_phi in reverse-Carleson mode
  double level = 0.5;           // c in G_c = {tau > c}
  std::vector<double> rings{0.0, 0.5, 0.9, 0.99, 0.999};
  int angles_per_ring = 64;
  std::uint64_t seed = 42;
  int samples_per_disk = 1000;
  double truncation_eps = 1e-6;  // counting truncation for n_phi
  // Carleson-box grid, used by the box estimators and the accumulation check.
  std::vector<double> box_radii{0.2, 0.1, 0.05};
  int box_angles = 64;

  bool operator==(const DensityQuery&) const = default;
};

/// Throws ValidationError with a "query.<field>" path.
void validate(const DensityQuery& q);

/// Grid centers: one point for a zero ring, `angles_per_ring` otherwise.
std::vector<DiskPoint> ring_points(const DensityQuery& q, double modulus);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int samples = 0;
  int failed = 0;
};

/// A(phi(D) ∩ D(z, r)) / A(D(z, r)) by uniform sampling in the Euclidean
/// realization of D(z, r).
MonteCarloEstimate coverage_ratio(const SymbolMap& phi, DiskPoint z, double r, const DensityQuery& q);

/// (1 / A(D(z, r))) times the integral of n_phi^alpha over phi(D) ∩ D(z, r).
/// Uses the same samples as coverage_ratio, so it dominates it pointwise.
MonteCarloEstimate reverse_carleson_ratio(const SymbolMap& phi, DiskPoint z, double r, double alpha,
                                          const DensityQuery& q);

/// Box versions: averages over D ∩ S(zeta, r). No alpha means coverage mode.
MonteCarloEstimate box_ratio(const SymbolMap& phi, const CarlesonBox& box, std::optional<double> alpha,
                             const DensityQuery& q);

/// A(G_c ∩ S(zeta, r)) / A(D ∩ S(zeta, r)), G_c = {w : tau_phi(w) > c}.
/// Samples with |w| < 1e-6 are redrawn.
MonteCarloEstimate gc_density(const SymbolMap& phi, double c, DiskPoint zeta, double r, const DensityQuery& q);

struct RingMinimum {
  double modulus = 0.0;
  double min_ratio = 0.0;
  DiskPoint argmin;
  double std_error = 0.0;
};

struct DeltaEstimate {
  double delta = 0.0;
  DiskPoint argmin_z;
  std::vector<RingMinimum> per_ring;
  double standard_error = 0.0;  // at the argmin
  std::optional<double> alpha;  // empty in coverage mode
};

/// Minimum of the disk ratio over the ring grid. No alpha means coverage mode.
DeltaEstimate delta_infimum(const SymbolMap& phi, double r, std::optional<double> alpha, const DensityQuery& q);

/// Coverage and every requested alpha from a single pass over the grid.
struct DensitySweep {
  DeltaEstimate coverage;
  std::vector<DeltaEstimate> reverse;  // one per alpha, in request order
  int max_count = 0;
  std::map<int, long> histogram;  // n_phi over all samples
  long samples = 0;
  long failed = 0;
};

DensitySweep density_sweep(const SymbolMap& phi, double r, const std::vector<double>& alphas,
                           const DensityQuery& q);

/// Boxes at `angles` equally spaced anchors for each radius.
std::vector<CarlesonBox> box_grid(const std::vector<double>& radii, int angles);
std::vector<CarlesonBox> box_grid(const DensityQuery& q);

struct AccumulationResult {
  bool pass = false;
  bool inconclusive = false;  // a box ran out of draws or samples failed
  std::optional<CarlesonBox> witness;
  int boxes = 0;
  int boxes_hit = 0;
};

/// Every box must contain a sampled image point.
AccumulationResult boundary_accumulation_check(const SymbolMap& phi, const std::vector<CarlesonBox>& boxes,
                                               const DensityQuery& q);

struct BoxMinimum {
  double delta = 0.0;
  CarlesonBox argmin;
  std::vector<std::pair<double, double>> per_radius;  // (box radius, min ratio)
  double standard_error = 0.0;
};

/// Box statistics from a single pass: accumulation, box-mode deltas and G_c density.
struct BoxSweep {
  AccumulationResult accumulation;
  BoxMinimum coverage;
  std::vector<BoxMinimum> reverse;  // one per alpha
  BoxMinimum gc;                    // at q.level
  int max_count = 0;
  long samples = 0;
  long failed = 0;
};

BoxSweep box_sweep(const SymbolMap& phi, const std::vector<double>& alphas, const DensityQuery& q);

// ---------------------------------------------------------------------------
// Classification.

enum class VerdictLabel { closed_range_evidence, not_closed_evidence, unbounded_operator_evidence, inconclusive };

const char* to_string(VerdictLabel label);

struct Criterion {
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool evaluated = false;  // false when the estimator failed
};

struct Verdict {
  VerdictLabel label = VerdictLabel::inconclusive;
  std::string rule;  // decision step that fired
  std::map<std::string, Criterion> criteria;
  std::string notes;
};

struct ClassifyOptions {
  double delta_floor = 0.05;     // bounded away from zero
  double delta_decay = 1e-3;     // decayed, on both outermost rings
  int tail_order = 8;            // k0
  std::vector<int> tail_orders{1, 2, 4, 8};  // reported alongside k0
  double tail_threshold = 1e-6;
  int count_bound = 8;           // bounded n_phi
  double boundedness_eps = 1e-2;
  std::vector<double> alphas{0.25, 0.5, 0.75, 1.0};
  dirichlet::FamilyConfig family{};
  dirichlet::PushforwardOptions grid{};
  dirichlet::BoundednessOptions boundedness{};
};

/// Every estimator behind a verdict. Missing optionals failed; see errors.
struct Analysis {
  std::optional<DensitySweep> disks;
  std::optional<BoxSweep> boxes;
  std::optional<dirichlet::BoundednessEstimate> boundedness;
  std::optional<double> tail;     // at tail_order
  std::map<int, double> tails;    // every reported order
  int grid_max_count = 0;
  Verdict verdict;
  std::vector<std::string> errors;
};

/// Runs all estimators and applies the decision procedure:
/// (i) boundedness divergence -> unbounded, and no boundedness estimate at
/// all -> inconclusive; (ii) an empty boundary box ->
/// not closed; (iii) small tail and coverage delta >= floor -> closed;
/// (iv) bounded n and coverage decayed on the two outermost rings -> not
/// closed; otherwise inconclusive. Never throws on estimator failure.
Analysis analyze(const SymbolMap& phi, const DensityQuery& q, const ClassifyOptions& options = {});

Verdict classify(const SymbolMap& phi, const DensityQuery& q, const ClassifyOptions& options = {});

}  // namespace closedrange::carleson
