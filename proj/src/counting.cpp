#include "closedrange/counting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "closedrange/errors.hpp"
#include "closedrange/geometry.hpp"
#include "closedrange/polynomial.hpp"

namespace closedrange::counting {

using symbols::SymbolKind;

namespace {

constexpr int kMaxNudges = 8;
constexpr int kMaxDepth = 40;
constexpr int kNewtonIterations = 50;
constexpr double kNewtonResidual = 1e-12;
constexpr double kClusterRadius = 1e-7;
constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Argument principle along piecewise contours.

struct ContourPiece {
  bool arc = false;
  Complex from;      // segment start
  Complex to;        // segment end
  double radius = 0.0;
  double angle_from = 0.0;
  double angle_to = 0.0;

  Complex at(double t) const {
    if (!arc) return from + t * (to - from);
    return std::polar(radius, angle_from + t * (angle_to - angle_from));
  }
  double length() const { return arc ? radius * std::abs(angle_to - angle_from) : std::abs(to - from); }
};

ContourPiece segment(Complex a, Complex b) { return ContourPiece{false, a, b, 0.0, 0.0, 0.0}; }
ContourPiece arc(double radius, double a0, double a1) { return ContourPiece{true, {}, {}, radius, a0, a1}; }

struct Probe {
  Complex g;
  double slope;
};

// Total change of arg(phi - w) along the pieces divided by 2 pi; nullopt if
// the contour passes (numerically) through a zero.
std::optional<int> contour_winding(const SymbolMap& phi, Complex w, const std::vector<ContourPiece>& pieces) {
  constexpr int kInitialSplits = 8;
  constexpr double kMinStep = 1e-14;
  constexpr double kZeroGuard = 1e-13;
  constexpr double kSafety = 0.3;

  double total = 0.0;
  for (const auto& piece : pieces) {
    const double length = piece.length();
    if (length == 0.0) continue;
    auto probe = [&](double t) {
      const auto e = phi.evaluate(piece.at(t));
      return Probe{e.value - w, std::abs(e.derivative)};
    };
    struct Interval {
      double t0, t1;
      Probe p0, p1;
    };
    std::vector<Interval> stack;
    std::vector<Probe> nodes;
    nodes.reserve(kInitialSplits + 1);
    for (int i = 0; i <= kInitialSplits; ++i) nodes.push_back(probe(static_cast<double>(i) / kInitialSplits));
    for (int i = kInitialSplits - 1; i >= 0; --i) {
      stack.push_back({static_cast<double>(i) / kInitialSplits, static_cast<double>(i + 1) / kInitialSplits,
                       nodes[i], nodes[i + 1]});
    }
    while (!stack.empty()) {
      const Interval iv = stack.back();
      stack.pop_back();
      const double m0 = std::abs(iv.p0.g);
      const double m1 = std::abs(iv.p1.g);
      if (m0 < kZeroGuard || m1 < kZeroGuard) return std::nullopt;
      const double step = (iv.t1 - iv.t0) * length;
      // |phi - w| cannot reach zero along a sub-arc whose length times the
      // derivative bound stays well below the endpoint moduli.
      const bool safe = step * std::max(iv.p0.slope, iv.p1.slope) < kSafety * std::min(m0, m1);
      if (safe) {
        total += std::arg(iv.p1.g / iv.p0.g);
        continue;
      }
      if (step < kMinStep) return std::nullopt;
      const double tm = 0.5 * (iv.t0 + iv.t1);
      const Probe pm = probe(tm);
      stack.push_back({tm, iv.t1, pm, iv.p1});
      stack.push_back({iv.t0, tm, iv.p0, pm});
    }
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.05) return std::nullopt;
  return static_cast<int>(rounded);
}

std::vector<ContourPiece> circle_contour(double radius) { return {arc(radius, 0.0, kTwoPi)}; }

// ---------------------------------------------------------------------------
// Polar quadtree cells. r0 == 0 denotes a full central disk.

struct Cell {
  double r0, r1, t0, t1;
  int count;
  int depth;

  bool central() const { return r0 == 0.0; }
  double diameter() const { return central() ? 2.0 * r1 : std::max(r1 - r0, r1 * (t1 - t0)); }
  Complex centroid() const {
    return central() ? Complex{0.0, 0.0} : std::polar(0.5 * (r0 + r1), 0.5 * (t0 + t1));
  }
  bool contains(Complex z, double slack) const {
    const double r = std::abs(z);
    if (central()) return r <= r1 + slack;
    if (r < r0 - slack || r > r1 + slack) return false;
    double t = std::arg(z);
    while (t < t0 - kPi) t += kTwoPi;
    while (t > t0 + kPi) t -= kTwoPi;
    const double angular_slack = slack / std::max(r, 1e-300);
    return t >= t0 - angular_slack && t <= t1 + angular_slack;
  }
  std::vector<ContourPiece> contour() const {
    if (central()) return circle_contour(r1);
    const Complex a = std::polar(r0, t0);
    const Complex b = std::polar(r1, t0);
    const Complex c = std::polar(r1, t1);
    const Complex d = std::polar(r0, t1);
    return {segment(a, b), arc(r1, t0, t1), segment(c, d), arc(r0, t1, t0)};
  }
  std::string describe() const {
    std::ostringstream os;
    os << "cell r=[" << r0 << ", " << r1 << "] theta=[" << t0 << ", " << t1 << "] count=" << count;
    return os.str();
  }
};

double split_fraction(int attempt) {
  static constexpr double kFractions[] = {0.5, 0.4871, 0.5237, 0.4519, 0.5613, 0.4127, 0.5931, 0.3817};
  return kFractions[attempt % 8];
}

std::optional<std::vector<Cell>> split_cell(const SymbolMap& phi, Complex w, const Cell& cell, double f) {
  std::vector<Cell> children;
  const int depth = cell.depth + 1;
  if (cell.central()) {
    const double rm = f * cell.r1;
    children.push_back({0.0, rm, 0.0, kTwoPi, 0, depth});
    const double phase = (f - 0.5) * 0.7;  // rotate quadrant cuts with the attempt
    for (int q = 0; q < 4; ++q) {
      const double a0 = phase + q * 0.5 * kPi;
      children.push_back({rm, cell.r1, a0, a0 + 0.5 * kPi, 0, depth});
    }
  } else {
    const double rm = cell.r0 + f * (cell.r1 - cell.r0);
    const double tm = cell.t0 + f * (cell.t1 - cell.t0);
    children.push_back({cell.r0, rm, cell.t0, tm, 0, depth});
    children.push_back({cell.r0, rm, tm, cell.t1, 0, depth});
    children.push_back({rm, cell.r1, cell.t0, tm, 0, depth});
    children.push_back({rm, cell.r1, tm, cell.t1, 0, depth});
  }
  int total = 0;
  for (auto& child : children) {
    const auto count = contour_winding(phi, w, child.contour());
    if (!count || *count < 0) return std::nullopt;
    child.count = *count;
    total += *count;
  }
  if (total != cell.count) return std::nullopt;
  return children;
}

std::vector<Preimage> merge_clusters(std::vector<Preimage> found) {
  std::sort(found.begin(), found.end(), [](const Preimage& a, const Preimage& b) {
    return a.point.real() < b.point.real() || (a.point.real() == b.point.real() && a.point.imag() < b.point.imag());
  });
  std::vector<Preimage> merged;
  for (const auto& p : found) {
    auto hit = std::find_if(merged.begin(), merged.end(),
                            [&](const Preimage& q) { return std::abs(q.point - p.point) < kClusterRadius; });
    if (hit == merged.end()) {
      merged.push_back(p);
    } else {
      const double total = hit->multiplicity + p.multiplicity;
      hit->point = (hit->point * static_cast<double>(hit->multiplicity) + p.point * static_cast<double>(p.multiplicity)) /
                   total;
      hit->multiplicity += p.multiplicity;
    }
  }
  return merged;
}

std::vector<Preimage> subdivision_preimages(const SymbolMap& phi, Complex w, double radius) {
  constexpr double kClusterCell = 1e-7;

  std::optional<int> total;
  for (int attempt = 0; attempt < kMaxNudges && !total; ++attempt) {
    if (attempt > 0) radius *= 1.0 - 1e-9 * attempt;
    total = contour_winding(phi, w, circle_contour(radius));
  }
  if (!total) throw ContourError("preimage search: outer contour passes through a preimage");
  if (*total == 0) return {};

  std::vector<Preimage> found;
  std::vector<Cell> work{{0.0, radius, 0.0, kTwoPi, *total, 0}};
  while (!work.empty()) {
    const Cell cell = work.back();
    work.pop_back();
    if (cell.count == 0) continue;
    if (cell.depth > kMaxDepth) {
      throw ConvergenceError("preimage subdivision exceeded depth 40 at " + cell.describe());
    }
    if (cell.count == 1 || cell.diameter() < kClusterCell) {
      const auto [z, residual] = newton_polish(phi, w, cell.centroid());
      const double slack = std::max(1e-9, cell.diameter() * 1e-6);
      if (residual <= std::max(kNewtonResidual, cell.count > 1 ? 1e-9 : 0.0) && cell.contains(z, slack)) {
        found.push_back({z, cell.count});
        continue;
      }
      if (cell.diameter() < 1e-13) {
        throw ConvergenceError("Newton polishing failed to converge in " + cell.describe());
      }
    }
    std::optional<std::vector<Cell>> children;
    for (int attempt = 0; attempt < kMaxNudges && !children; ++attempt) {
      children = split_cell(phi, w, cell, split_fraction(attempt));
    }
    if (!children) throw ContourError("preimage subdivision: contour kept hitting a preimage in " + cell.describe());
    for (auto& child : *children) {
      if (child.count > 0) work.push_back(child);
    }
  }
  return merge_clusters(std::move(found));
}

// ---------------------------------------------------------------------------
// Closed-form and algebraic preimages.

void keep_inside(std::vector<Preimage>& out, Complex z, int multiplicity, double radius) {
  if (std::abs(z) <= radius) out.push_back({z, multiplicity});
}

// Range of integers k with |arg(w) + 2 pi k| <= bound.
std::pair<long long, long long> atomic_branch_range(Complex w, double eps) {
  const double radius = 1.0 - eps;
  const double x = std::log(std::abs(w));
  const double q = radius * radius * (x - 1.0) * (x - 1.0) - (x + 1.0) * (x + 1.0);
  if (q < 0.0) return {1, 0};
  const double y = std::sqrt(q / (1.0 - radius * radius));
  const double a = std::arg(w);
  const auto lo = static_cast<long long>(std::ceil((-y - a) / kTwoPi));
  const auto hi = static_cast<long long>(std::floor((y - a) / kTwoPi));
  return {lo, hi};
}

std::vector<Preimage> exact_preimages(const SymbolMap& phi, Complex w, double eps) {
  const double radius = 1.0 - eps;
  const auto& d = phi.descriptor();
  std::vector<Preimage> out;
  switch (phi.kind()) {
    case SymbolKind::identity:
      keep_inside(out, w, 1, radius);
      break;
    case SymbolKind::scaled:
      keep_inside(out, w / d.factor, 1, radius);
      break;
    case SymbolKind::mobius:
      keep_inside(out, geometry::disk_automorphism(d.a, w * std::polar(1.0, -d.phase)), 1, radius);
      break;
    case SymbolKind::power: {
      if (w == Complex{0.0, 0.0}) {
        out.push_back({Complex{0.0, 0.0}, d.degree});
        break;
      }
      const double modulus = std::pow(std::abs(w), 1.0 / d.degree);
      const double base = std::arg(w) / d.degree;
      for (int k = 0; k < d.degree; ++k) keep_inside(out, std::polar(modulus, base + kTwoPi * k / d.degree), 1, radius);
      break;
    }
    case SymbolKind::blaschke: {
      // e^{i theta} prod (z - a_j) - w prod (1 - conj(a_j) z) = 0
      polynomial::Coefficients num{std::polar(1.0, d.phase)};
      polynomial::Coefficients den{Complex{1.0, 0.0}};
      for (const auto& a : d.zeros) {
        const Complex lin_num[] = {-a, 1.0};
        const Complex lin_den[] = {1.0, -std::conj(a)};
        num = polynomial::multiply(num, lin_num);
        den = polynomial::multiply(den, lin_den);
      }
      for (std::size_t i = 0; i < num.size(); ++i) num[i] -= w * den[i];
      std::vector<Preimage> roots;
      for (const auto& z : polynomial::roots(num)) roots.push_back({z, 1});
      for (const auto& p : merge_clusters(std::move(roots))) keep_inside(out, p.point, p.multiplicity, radius);
      break;
    }
    case SymbolKind::crescent:
      // The inverse Riemann map is exact, so no search truncation applies:
      // preimages of the cusp region sit within 1e-9 of T.
      if (phi.crescent_region()->contains(w)) out.push_back({phi.crescent_inverse(w), 1});
      break;
    case SymbolKind::atomic_singular: {
      if (w == Complex{0.0, 0.0}) break;
      const auto [lo, hi] = atomic_branch_range(w, eps);
      const double x = std::log(std::abs(w));
      for (long long k = lo; k <= hi; ++k) {
        const Complex branch{x, std::arg(w) + kTwoPi * static_cast<double>(k)};
        keep_inside(out, (branch + 1.0) / (branch - 1.0), 1, radius);
      }
      break;
    }
    case SymbolKind::chain:
      return subdivision_preimages(phi, w, radius);
  }
  std::sort(out.begin(), out.end(), [](const Preimage& a, const Preimage& b) {
    return a.point.real() < b.point.real() || (a.point.real() == b.point.real() && a.point.imag() < b.point.imag());
  });
  return out;
}

void check_truncation(double eps) {
  // Exact endpoints are allowed; a relative slack absorbs decimal round-off.
  if (!(eps >= kMinTruncation * (1.0 - 1e-9) && eps <= kMaxTruncation * (1.0 + 1e-9))) {
    throw ValidationError("eps", "truncation must lie in [1e-6, 1e-1]");
  }
}

std::optional<double> annulus_bound(const SymbolMap& phi, Complex w, int n, double eps) {
  const double log_radius = -std::log1p(-eps);
  if (const auto degree = phi.degree()) {
    return std::max(0, *degree - n) * log_radius;
  }
  if (phi.kind() == SymbolKind::atomic_singular) {
    if (w == Complex{0.0, 0.0}) return 0.0;
    // Excluded branches have |y| > Y and contribute at most 2|x| / y^2 each.
    const double radius = 1.0 - eps;
    const double x = std::log(std::abs(w));
    const double q = radius * radius * (x - 1.0) * (x - 1.0) - (x + 1.0) * (x + 1.0);
    const double y = q > 0.0 ? std::sqrt(q / (1.0 - radius * radius)) : 0.0;
    if (y <= 0.0) return std::nullopt;
    return 2.0 * 2.0 * std::abs(x) * (1.0 / (y * y) + 1.0 / (kTwoPi * y));
  }
  return std::nullopt;
}

}  // namespace

std::pair<Complex, double> newton_polish(const SymbolMap& phi, DiskPoint w, Complex z0) {
  constexpr double kStepFloor = 1e-16;
  Complex z = z0;
  auto eval = [&](Complex p) { return phi.evaluate(p); };
  auto e = eval(z);
  double residual = std::abs(e.value - w);
  for (int iter = 0; iter < kNewtonIterations && residual > kNewtonResidual * 1e-3; ++iter) {
    if (e.derivative == Complex{0.0, 0.0}) break;
    Complex step = (e.value - w) / e.derivative;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      Complex trial = z - step;
      if (std::abs(trial) >= 1.0 - 1e-12) trial = z - step * (0.5 * (1.0 - std::abs(z)) / std::abs(step));
      try {
        const auto et = eval(trial);
        const double rt = std::abs(et.value - w);
        if (rt < residual || halving == 29) {
          improved = rt < residual;
          z = trial;
          e = et;
          residual = rt;
          break;
        }
      } catch (const std::exception&) {
      }
      step *= 0.5;
    }
    if (!improved || std::abs(step) < kStepFloor * std::max(1.0, std::abs(z))) break;
  }
  return {z, residual};
}

int winding_count(const SymbolMap& phi, DiskPoint w, double circle_radius) {
  if (!(circle_radius > 0.0 && circle_radius < 1.0)) {
    throw DomainError("winding circle radius must lie in (0, 1)");
  }
  double radius = circle_radius;
  for (int attempt = 0; attempt < kMaxNudges; ++attempt) {
    const auto count = contour_winding(phi, w, circle_contour(radius));
    if (count) return *count;
    // Alternate outward and inward nudges of growing size.
    const double nudge = 1e-7 * ((attempt / 2) + 1) * (attempt % 2 == 0 ? 1.0 : -1.0);
    radius = std::clamp(circle_radius + nudge, 1e-12, 1.0 - 1e-12);
  }
  throw ContourError("winding contour passes through a preimage after 8 nudges");
}

std::vector<Preimage> preimages(const SymbolMap& phi, DiskPoint w, double eps, PreimageMethod method) {
  check_truncation(eps);
  geometry::require_interior(w, "target");
  if (method == PreimageMethod::subdivision) return subdivision_preimages(phi, w, 1.0 - eps);
  return exact_preimages(phi, w, eps);
}

CountingSample counting_sample(const SymbolMap& phi, DiskPoint w, double eps, PreimageMethod method) {
  CountingSample sample;
  sample.target = w;
  sample.truncation = 1.0 - eps;
  sample.preimages = preimages(phi, w, eps, method);
  CompensatedSum nevanlinna;
  for (const auto& p : sample.preimages) {
    sample.n += p.multiplicity;
    ++sample.distinct;
    const double modulus = std::abs(p.point);
    nevanlinna.add(modulus == 0.0 ? std::numeric_limits<double>::infinity()
                                  : -p.multiplicity * std::log(modulus));
  }
  sample.nevanlinna = nevanlinna.value();
  if (std::isnan(sample.nevanlinna)) sample.nevanlinna = std::numeric_limits<double>::infinity();
  if (w != Complex{0.0, 0.0}) sample.tau = sample.nevanlinna / -std::log(std::abs(w));
  sample.annulus_error_bar = annulus_bound(phi, w, sample.n, eps);
  return sample;
}

int count_preimages(const SymbolMap& phi, DiskPoint w, double eps) {
  check_truncation(eps);
  if (!(std::abs(w) < 1.0)) return 0;
  const double radius = 1.0 - eps;
  switch (phi.kind()) {
    case SymbolKind::identity:
      return std::abs(w) <= radius ? 1 : 0;
    case SymbolKind::scaled:
      return std::abs(w / phi.descriptor().factor) <= radius ? 1 : 0;
    case SymbolKind::power: {
      const int n = phi.descriptor().degree;
      return std::pow(std::abs(w), 1.0 / n) <= radius ? n : 0;
    }
    case SymbolKind::crescent:
      return phi.crescent_region()->contains(w) ? 1 : 0;
    case SymbolKind::atomic_singular: {
      if (w == Complex{0.0, 0.0}) return 0;
      const auto [lo, hi] = atomic_branch_range(w, eps);
      return hi >= lo ? static_cast<int>(hi - lo + 1) : 0;
    }
    default: {
      if (std::abs(w) >= 1.0 - default_numerics().boundary_guard) return 0;
      int n = 0;
      for (const auto& p : exact_preimages(phi, w, eps)) n += p.multiplicity;
      return n;
    }
  }
}

bool in_image(const SymbolMap& phi, DiskPoint w, double eps) {
  if (const auto* region = phi.crescent_region()) return region->contains(w);
  return count_preimages(phi, w, eps) >= 1;
}

}  // namespace closedrange::counting
