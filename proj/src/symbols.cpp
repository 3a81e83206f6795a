#include "closedrange/symbols.hpp"

#include <algorithm>
#include <cmath>

#include "closedrange/errors.hpp"
#include "closedrange/geometry.hpp"

namespace closedrange::symbols {

namespace {

constexpr double kInteriorGuard = 1e-12;
constexpr double kAtomicCutoff = 1e-9;
constexpr double kSelfMapSlack = 1e-9;

const Complex kI{0.0, 1.0};

}  // namespace

const char* to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::identity: return "identity";
    case SymbolKind::mobius: return "mobius";
    case SymbolKind::power: return "power";
    case SymbolKind::blaschke: return "blaschke";
    case SymbolKind::crescent: return "crescent";
    case SymbolKind::scaled: return "scaled";
    case SymbolKind::atomic_singular: return "atomic_singular";
    case SymbolKind::chain: return "chain";
  }
  return "unknown";
}

SymbolKind symbol_kind_from_string(const std::string& name) {
  for (auto kind : {SymbolKind::identity, SymbolKind::mobius, SymbolKind::power, SymbolKind::blaschke,
                    SymbolKind::crescent, SymbolKind::scaled, SymbolKind::atomic_singular, SymbolKind::chain}) {
    if (name == to_string(kind)) return kind;
  }
  throw ValidationError("symbol.kind", "unknown symbol kind '" + name + "'");
}

SymbolDescriptor SymbolDescriptor::identity() { return {}; }

SymbolDescriptor SymbolDescriptor::mobius(DiskPoint a, double phase) {
  SymbolDescriptor d;
  d.kind = SymbolKind::mobius;
  d.a = a;
  d.phase = phase;
  return d;
}

SymbolDescriptor SymbolDescriptor::power(int n) {
  SymbolDescriptor d;
  d.kind = SymbolKind::power;
  d.degree = n;
  return d;
}

SymbolDescriptor SymbolDescriptor::blaschke(std::vector<DiskPoint> zeros, double phase) {
  SymbolDescriptor d;
  d.kind = SymbolKind::blaschke;
  d.zeros = std::move(zeros);
  d.phase = phase;
  return d;
}

SymbolDescriptor SymbolDescriptor::crescent(DiskPoint tangent_point, double inner_radius) {
  SymbolDescriptor d;
  d.kind = SymbolKind::crescent;
  d.tangent_point = tangent_point;
  d.inner_radius = inner_radius;
  return d;
}

SymbolDescriptor SymbolDescriptor::scaled(double c) {
  SymbolDescriptor d;
  d.kind = SymbolKind::scaled;
  d.factor = c;
  return d;
}

SymbolDescriptor SymbolDescriptor::atomic_singular() {
  SymbolDescriptor d;
  d.kind = SymbolKind::atomic_singular;
  return d;
}

SymbolDescriptor SymbolDescriptor::chain(std::vector<SymbolDescriptor> maps) {
  SymbolDescriptor d;
  d.kind = SymbolKind::chain;
  d.maps = std::move(maps);
  return d;
}

CrescentRegion CrescentRegion::make(DiskPoint tangent_point, double inner_radius) {
  if (std::abs(std::abs(tangent_point) - 1.0) > 1e-12) {
    throw ValidationError("symbol.tangent_point", "tangent point must lie on the unit circle");
  }
  if (!(inner_radius > 0.0 && inner_radius <= 0.5)) {
    throw ValidationError("symbol.inner_radius", "inner radius must lie in (0, 1/2]");
  }
  CrescentRegion region;
  region.tangent_point = tangent_point / std::abs(tangent_point);
  region.inner_radius = inner_radius;
  region.inner_center = (1.0 - inner_radius) * region.tangent_point;
  return region;
}

bool CrescentRegion::contains(Complex w) const {
  return std::abs(w) < 1.0 && std::abs(w - inner_center) > inner_radius;
}

Evaluation SymbolMap::evaluate(Complex z) const {
  if (!(std::abs(z) < 1.0 - kInteriorGuard)) {
    throw DomainError("symbol evaluated outside the open unit disk");
  }
  return evaluate_unguarded(z);
}

Evaluation SymbolMap::evaluate_unguarded(Complex z) const {
  const auto& d = descriptor_;
  switch (d.kind) {
    case SymbolKind::identity:
      return {z, 1.0};
    case SymbolKind::scaled:
      return {d.factor * z, d.factor};
    case SymbolKind::power: {
      const Complex zn1 = d.degree == 1 ? Complex{1.0, 0.0} : std::pow(z, d.degree - 1);
      return {zn1 * z, static_cast<double>(d.degree) * zn1};
    }
    case SymbolKind::mobius: {
      const Complex rot = std::polar(1.0, d.phase);
      const Complex den = 1.0 - std::conj(d.a) * z;
      return {rot * (d.a - z) / den, rot * (std::norm(d.a) - 1.0) / (den * den)};
    }
    case SymbolKind::blaschke: {
      Complex p = std::polar(1.0, d.phase);
      Complex dp{0.0, 0.0};
      for (const auto& a : d.zeros) {
        const Complex den = 1.0 - std::conj(a) * z;
        const Complex b = (z - a) / den;
        const Complex db = (1.0 - std::norm(a)) / (den * den);
        dp = dp * b + p * db;
        p *= b;
      }
      return {p, dp};
    }
    case SymbolKind::atomic_singular: {
      const Complex zm1 = z - 1.0;
      if (std::abs(zm1) < kAtomicCutoff) {
        throw OverflowError("atomic singular function evaluated too close to z = 1");
      }
      const Complex value = std::exp((z + 1.0) / zm1);
      return {value, value * (-2.0) / (zm1 * zm1)};
    }
    case SymbolKind::crescent: {
      const Complex zeta = region_.tangent_point;
      const Complex den = 1.0 + std::conj(shift_) * z;
      const Complex m = (z + shift_) / den;
      const Complex dm = (1.0 - std::norm(shift_)) / (den * den);
      const Complex h = kI * (1.0 + m) / (1.0 - m);
      const Complex dh = 2.0 * kI / ((1.0 - m) * (1.0 - m));
      const Complex t = std::log(h);
      const Complex ds = -kI * strip_width_ / kPi;
      const Complex s = 0.5 + ds * t;
      const Complex u = zeta * (1.0 - 1.0 / s);
      const Complex du = zeta / (s * s);
      return {u, du * ds * (dh / h) * dm};
    }
    case SymbolKind::chain: {
      Evaluation acc{z, 1.0};
      for (const auto& map : chain_) {
        const Evaluation step = map.evaluate_unguarded(acc.value);
        acc = {step.value, step.derivative * acc.derivative};
      }
      return acc;
    }
  }
  throw DomainError("unhandled symbol kind");
}

std::optional<int> SymbolMap::degree() const {
  switch (kind()) {
    case SymbolKind::identity:
    case SymbolKind::mobius:
    case SymbolKind::scaled:
    case SymbolKind::crescent:
      return 1;
    case SymbolKind::power:
      return descriptor_.degree;
    case SymbolKind::blaschke:
      return static_cast<int>(descriptor_.zeros.size());
    case SymbolKind::atomic_singular:
      return std::nullopt;
    case SymbolKind::chain: {
      int total = 1;
      for (const auto& map : chain_) {
        const auto d = map.degree();
        if (!d) return std::nullopt;
        total *= *d;
      }
      return total;
    }
  }
  return std::nullopt;
}

bool SymbolMap::boundary_regular() const {
  switch (kind()) {
    case SymbolKind::crescent:
    case SymbolKind::atomic_singular:
      return false;
    case SymbolKind::chain:
      return std::all_of(chain_.begin(), chain_.end(), [](const SymbolMap& m) { return m.boundary_regular(); });
    default:
      return true;
  }
}

std::optional<DiskPoint> SymbolMap::boundary_singularity() const {
  if (kind() == SymbolKind::atomic_singular) return DiskPoint{1.0, 0.0};
  if (kind() == SymbolKind::chain && !chain_.empty() && chain_.front().kind() == SymbolKind::atomic_singular) {
    return DiskPoint{1.0, 0.0};
  }
  return std::nullopt;
}

const CrescentRegion* SymbolMap::crescent_region() const {
  return kind() == SymbolKind::crescent ? &region_ : nullptr;
}

Complex SymbolMap::crescent_inverse(Complex w) const {
  if (kind() != SymbolKind::crescent) {
    throw DomainError("crescent_inverse called on a non-crescent symbol");
  }
  if (!region_.contains(w)) {
    throw DomainError("point lies outside the crescent region");
  }
  const Complex s = 1.0 / (1.0 - std::conj(region_.tangent_point) * w);
  const Complex t = kI * (s - 0.5) * kPi / strip_width_;
  const Complex h = std::exp(t);
  const Complex m = (h - kI) / (h + kI);
  return (m - shift_) / (1.0 - std::conj(shift_) * m);
}

SymbolMap crescent_map(const CrescentRegion& region) {
  SymbolMap phi;
  phi.descriptor_ = SymbolDescriptor::crescent(region.tangent_point, region.inner_radius);
  phi.region_ = region;
  // u -> 1/(1 - conj(zeta) u) sends T to Re = 1/2 and the inner circle to
  // Re = 1/(2 rho0), so Omega becomes a vertical strip.
  phi.strip_width_ = 0.5 / region.inner_radius - 0.5;
  // Normalize phi(0) = -rho0 * zeta: the strip point over it is real.
  const double s0 = 1.0 / (1.0 + region.inner_radius);
  const Complex h0 = std::exp(kI * (s0 - 0.5) * kPi / phi.strip_width_);
  phi.shift_ = (h0 - kI) / (h0 + kI);
  return phi;
}

Evaluation eval_with_derivative(const SymbolMap& phi, Complex z) { return phi.evaluate(z); }

double verify_self_map(const SymbolMap& phi, int samples) {
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Complex z = std::polar(kSelfMapRadius, 2.0 * kPi * i / samples);
    double modulus = 0.0;
    try {
      modulus = std::abs(phi(z));
    } catch (const OverflowError&) {
      continue;  // essential singularity: |phi| stays below 1 on the open disk
    }
    if (!std::isfinite(modulus)) return -1.0;
    sup = std::max(sup, modulus);
  }
  return 1.0 - sup;
}

SymbolMap build_symbol(const SymbolDescriptor& spec) {
  SymbolMap phi;
  switch (spec.kind) {
    case SymbolKind::identity:
    case SymbolKind::atomic_singular:
      break;
    case SymbolKind::mobius:
      if (!(std::abs(spec.a) < 1.0 - kInteriorGuard)) {
        throw ValidationError("symbol.a", "Mobius parameter must lie inside the unit disk");
      }
      if (!std::isfinite(spec.phase)) throw ValidationError("symbol.phase", "phase must be finite");
      break;
    case SymbolKind::power:
      if (spec.degree < 1) throw ValidationError("symbol.degree", "power degree must be >= 1");
      break;
    case SymbolKind::blaschke:
      if (spec.zeros.empty()) throw ValidationError("symbol.zeros", "Blaschke product needs at least one zero");
      for (std::size_t i = 0; i < spec.zeros.size(); ++i) {
        if (!(std::abs(spec.zeros[i]) < 1.0 - kInteriorGuard)) {
          throw ValidationError("symbol.zeros[" + std::to_string(i) + "]", "zero must lie strictly inside the disk");
        }
      }
      if (!std::isfinite(spec.phase)) throw ValidationError("symbol.phase", "phase must be finite");
      break;
    case SymbolKind::crescent:
      return crescent_map(CrescentRegion::make(spec.tangent_point, spec.inner_radius));
    case SymbolKind::scaled:
      if (!(spec.factor > 0.0 && spec.factor < 1.0)) {
        throw ValidationError("symbol.factor", "scale factor must lie in (0, 1)");
      }
      break;
    case SymbolKind::chain:
      if (spec.maps.empty()) throw ValidationError("symbol.maps", "chain needs at least one map");
      for (std::size_t i = 0; i < spec.maps.size(); ++i) {
        try {
          phi.chain_.push_back(build_symbol(spec.maps[i]));
        } catch (const ValidationError& e) {
          throw ValidationError("symbol.maps[" + std::to_string(i) + "]." + e.field().substr(e.field().find('.') + 1),
                                e.what());
        }
      }
      break;
  }
  phi.descriptor_ = spec;
  if (verify_self_map(phi) < -kSelfMapSlack) {
    throw ValidationError("symbol", "map escapes the unit disk on the self-map check");
  }
  return phi;
}

}  // namespace closedrange::symbols
