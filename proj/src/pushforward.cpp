#include "closedrange/pushforward.hpp"

#include <cmath>

#include "closedrange/counting.hpp"
#include "closedrange/errors.hpp"

namespace closedrange::dirichlet {

namespace {

constexpr double kRayEnd = 1.0 - 1e-12;
constexpr int kBisections = 60;
constexpr double kJumpWidth = 1e-14;

struct Piece {
  double from;
  double to;
  int count;
};

}  // namespace

PushforwardGrid PushforwardGrid::build(const symbols::SymbolMap& phi, const PushforwardOptions& options) {
  if (options.angular_order < 4 || options.panel_order < 1 || options.uniform_panels < 1) {
    throw ValidationError("pushforward", "grid orders must be positive");
  }
  PushforwardGrid grid;
  grid.eps_ = options.eps;

  // Breakpoints: uniform panels, then halving gaps toward the circle.
  std::vector<double> breaks;
  for (int j = 0; j < options.uniform_panels; ++j) breaks.push_back(static_cast<double>(j) / options.uniform_panels);
  for (double gap = 1.0 / options.uniform_panels; 1.0 - gap < kRayEnd; gap *= 0.5) breaks.push_back(1.0 - gap);
  breaks.push_back(kRayEnd);

  const auto rule = quadrature::gauss_legendre(options.panel_order);
  const double dtheta = 2.0 * kPi / options.angular_order;

  for (int j = 0; j < options.angular_order; ++j) {
    const Complex dir = std::polar(1.0, (j + 0.5) * dtheta);
    auto count_at = [&](double t) {
      try {
        return counting::count_preimages(phi, t * dir, options.eps);
      } catch (const std::exception&) {
        ++grid.failures_;
        return 0;
      }
    };

    std::vector<int> counts;
    counts.reserve(breaks.size());
    for (double t : breaks) counts.push_back(count_at(t));

    std::vector<Piece> pieces;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      double start = breaks[p];
      int left = counts[p];
      const double end = breaks[p + 1];
      const int right = counts[p + 1];
      int jumps = 0;
      while (left != right && jumps < options.max_jumps_per_panel) {
        double a = start;
        double b = end;
        int b_count = right;
        for (int it = 0; it < kBisections && b - a > kJumpWidth; ++it) {
          const double m = 0.5 * (a + b);
          const int c = count_at(m);
          if (c == left) {
            a = m;
          } else {
            b = m;
            b_count = c;
          }
        }
        const double jump = 0.5 * (a + b);
        pieces.push_back({start, jump, left});
        start = jump;
        left = b_count;
        ++jumps;
      }
      pieces.push_back({start, end, left});
    }

    for (const auto& piece : pieces) {
      if (piece.to <= piece.from) continue;
      grid.max_count_ = std::max(grid.max_count_, piece.count);
      const double half = 0.5 * (piece.to - piece.from);
      const double mid = 0.5 * (piece.to + piece.from);
      double area = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = mid + half * rule.nodes[i];
        const double weight = half * rule.weights[i] * t * dtheta;
        area += weight;
        if (piece.count > 0) grid.nodes_.push_back({t * dir, weight, piece.count});
      }
      grid.area_by_count_[piece.count] += area;
    }
  }
  return grid;
}

double PushforwardGrid::energy(const TestFunction& f, int min_count_exclusive) const {
  CompensatedSum sum;
  for (const auto& node : nodes_) {
    if (node.count > min_count_exclusive) sum.add(node.weight * node.count * std::norm(f.derivative(node.point)));
  }
  return sum.value();
}

std::vector<double> PushforwardGrid::energies(const TestFunction& f, const std::vector<int>& ks) const {
  std::vector<CompensatedSum> sums(ks.size());
  for (const auto& node : nodes_) {
    bool needed = false;
    for (int k : ks) needed = needed || node.count > k;
    if (!needed) continue;
    const double term = node.weight * node.count * std::norm(f.derivative(node.point));
    for (std::size_t j = 0; j < ks.size(); ++j)
      if (node.count > ks[j]) sums[j].add(term);
  }
  std::vector<double> out;
  out.reserve(ks.size());
  for (const auto& s : sums) out.push_back(s.value());
  return out;
}

ChangeOfVariables change_of_variables(const symbols::SymbolMap& phi, const TestFunction& f,
                                      const ChangeOfVariablesOptions& options) {
  ChangeOfVariables out;
  const auto quad = quadrature::build_quadrature(options.radial_order, options.angular_order, 1.0 - options.eps);
  out.left = pullback_energy(pullback(phi, quad), f);
  auto grid_options = options.grid;
  grid_options.eps = options.eps;
  out.right = PushforwardGrid::build(phi, grid_options).energy(f);
  const double scale = std::max(std::abs(out.left), std::abs(out.right));
  out.residual = scale > 0.0 ? std::abs(out.left - out.right) / scale : 0.0;
  return out;
}

double change_of_variables_residual(const symbols::SymbolMap& phi, const TestFunction& f,
                                    const ChangeOfVariablesOptions& options) {
  return change_of_variables(phi, f, options).residual;
}

double tail_functional(const PushforwardGrid& grid, int k, const TestFamily& family) {
  if (k < 1) throw ValidationError("k", "tail threshold must be >= 1");
  if (grid.max_count() <= k) return 0.0;
  double best = 0.0;
  for (const auto& f : family.members) best = std::max(best, grid.energy(f, k));
  return best;
}

double tail_functional(const symbols::SymbolMap& phi, int k, const TestFamily& family,
                       const PushforwardOptions& options) {
  return tail_functional(PushforwardGrid::build(phi, options), k, family);
}

std::map<int, double> tail_functionals(const PushforwardGrid& grid, const std::vector<int>& ks,
                                       const TestFamily& family) {
  std::vector<int> active;
  std::map<int, double> out;
  for (int k : ks) {
    if (k < 1) throw ValidationError("k", "tail threshold must be >= 1");
    out[k] = 0.0;
    if (grid.max_count() > k) active.push_back(k);
  }
  if (active.empty()) return out;
  for (const auto& f : family.members) {
    const auto e = grid.energies(f, active);
    for (std::size_t j = 0; j < active.size(); ++j) out[active[j]] = std::max(out[active[j]], e[j]);
  }
  return out;
}

}  // namespace closedrange::dirichlet
