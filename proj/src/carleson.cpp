#include "closedrange/carleson.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "closedrange/counting.hpp"
#include "closedrange/errors.hpp"

namespace closedrange::carleson {

namespace {

constexpr double kMaxFailureFraction = 0.01;
constexpr double kOriginExclusion = 1e-6;
constexpr int kDrawsPerSample = 200;  // rejection budget for box sampling
constexpr std::uint64_t kDiskSalt = 0x6469736bULL;
constexpr std::uint64_t kBoxSalt = 0x626f78ULL;

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

// Streams are keyed by the geometry, not the loop index, so a single-disk
// call reproduces the matching grid cell bit for bit.
std::uint64_t disk_stream(std::uint64_t seed, DiskPoint z, double r) {
  return split_seed(split_seed(split_seed(split_seed(seed, kDiskSalt), bits(z.real())), bits(z.imag())), bits(r));
}

std::uint64_t box_stream(std::uint64_t seed, const CarlesonBox& box) {
  return split_seed(split_seed(split_seed(split_seed(seed, kBoxSalt), bits(box.anchor.real())),
                               bits(box.anchor.imag())),
                    bits(box.radius));
}

struct Tally {
  explicit Tally(std::size_t alphas) : sum(alphas), sum_sq(alphas) {}

  int drawn = 0;
  int failed = 0;
  int hits = 0;
  int gc_hits = 0;
  int max_count = 0;
  std::vector<CompensatedSum> sum;
  std::vector<CompensatedSum> sum_sq;
  bool exhausted = false;

  int valid() const { return drawn - failed; }
};

struct SampleOutcome {
  int n = 0;
  bool image = false;
  std::optional<double> tau;
};

void record(Tally& t, const SampleOutcome& s, const std::vector<double>& alphas, double level,
            std::map<int, long>* histogram) {
  t.max_count = std::max(t.max_count, s.n);
  if (histogram) ++(*histogram)[s.n];
  if (s.image) ++t.hits;
  if (s.tau && *s.tau > level) ++t.gc_hits;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    // n^alpha on the image; points outside contribute nothing.
    const double v = s.image ? std::pow(static_cast<double>(std::max(s.n, 1)), alphas[i]) : 0.0;
    t.sum[i].add(v);
    t.sum_sq[i].add(v * v);
  }
}

void check_failures(const Tally& t, const char* what) {
  if (t.drawn > 0 && t.failed > kMaxFailureFraction * t.drawn) {
    std::ostringstream os;
    os << what << ": " << t.failed << " of " << t.drawn << " samples failed (limit 1%)";
    throw ConvergenceError(os.str());
  }
}

bool is_region(const SymbolMap& phi, DiskPoint w) {
  if (const auto* region = phi.crescent_region()) return region->contains(w);
  return false;
}

// n only; the disk estimators never need tau.
std::optional<SampleOutcome> count_sample(const SymbolMap& phi, DiskPoint w, double eps) {
  try {
    SampleOutcome s;
    s.n = counting::count_preimages(phi, w, eps);
    s.image = phi.crescent_region() ? is_region(phi, w) : s.n > 0;
    return s;
  } catch (const ConvergenceError&) {
  } catch (const ContourError&) {
  } catch (const OverflowError&) {
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

std::optional<SampleOutcome> full_sample(const SymbolMap& phi, DiskPoint w, double eps) {
  try {
    const auto c = counting::counting_sample(phi, w, eps);
    SampleOutcome s;
    s.n = c.n;
    s.image = phi.crescent_region() ? is_region(phi, w) : c.n > 0;
    s.tau = c.tau;
    return s;
  } catch (const ConvergenceError&) {
  } catch (const ContourError&) {
  } catch (const OverflowError&) {
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

Tally tally_disk(const SymbolMap& phi, DiskPoint z, double r, const std::vector<double>& alphas, const DensityQuery& q,
                 std::map<int, long>* histogram) {
  const auto disk = geometry::bergman_disk(z, r);
  std::mt19937_64 rng(disk_stream(q.seed, z, r));
  Tally t(alphas.size());
  for (int i = 0; i < q.samples_per_disk; ++i) {
    const double u = unit_uniform(rng);
    const double v = unit_uniform(rng);
    const DiskPoint w = disk.euclidean_center + std::polar(disk.euclidean_radius * std::sqrt(u), 2.0 * kPi * v);
    ++t.drawn;
    const auto s = count_sample(phi, w, q.truncation_eps);
    if (!s) {
      ++t.failed;
      continue;
    }
    record(t, *s, alphas, std::numeric_limits<double>::infinity(), histogram);
  }
  check_failures(t, "disk sampling");
  return t;
}

Tally tally_box(const SymbolMap& phi, const CarlesonBox& box, const std::vector<double>& alphas, double level,
                const DensityQuery& q, bool with_tau) {
  std::mt19937_64 rng(box_stream(q.seed, box));
  const double x0 = std::max(-1.0, box.anchor.real() - box.radius);
  const double x1 = std::min(1.0, box.anchor.real() + box.radius);
  const double y0 = std::max(-1.0, box.anchor.imag() - box.radius);
  const double y1 = std::min(1.0, box.anchor.imag() + box.radius);
  Tally t(alphas.size());
  const long budget = static_cast<long>(kDrawsPerSample) * q.samples_per_disk;
  long draws = 0;
  while (t.drawn < q.samples_per_disk) {
    if (++draws > budget) {
      t.exhausted = true;
      break;
    }
    const DiskPoint w{x0 + (x1 - x0) * unit_uniform(rng), y0 + (y1 - y0) * unit_uniform(rng)};
    if (!(std::abs(w) < 1.0) || !box.contains(w) || std::abs(w) < kOriginExclusion) continue;
    ++t.drawn;
    const auto s = with_tau ? full_sample(phi, w, q.truncation_eps) : count_sample(phi, w, q.truncation_eps);
    if (!s) {
      ++t.failed;
      continue;
    }
    record(t, *s, alphas, level, nullptr);
  }
  check_failures(t, "box sampling");
  return t;
}

// Agresti-Coull adjusted binomial error, nonzero even at p in {0, 1}.
double binomial_error(int hits, int n) {
  if (n <= 0) return 0.0;
  const double p = (hits + 2.0) / (n + 4.0);
  return std::sqrt(p * (1.0 - p) / n);
}

MonteCarloEstimate coverage_estimate(const Tally& t) {
  MonteCarloEstimate e;
  e.samples = t.valid();
  e.failed = t.failed;
  e.value = e.samples > 0 ? static_cast<double>(t.hits) / e.samples : 0.0;
  e.std_error = binomial_error(t.hits, e.samples);
  return e;
}

MonteCarloEstimate alpha_estimate(const Tally& t, std::size_t i, double alpha) {
  MonteCarloEstimate e;
  e.samples = t.valid();
  e.failed = t.failed;
  if (e.samples == 0) return e;
  const double n = e.samples;
  e.value = t.sum[i].value() / n;
  const double var = std::max(0.0, t.sum_sq[i].value() / n - e.value * e.value);
  // A constant integrand has zero sample variance; fall back on the
  // binomial error of the image indicator scaled by the largest weight.
  const double weight = std::pow(static_cast<double>(std::max(t.max_count, 1)), alpha);
  e.std_error = std::max(std::sqrt(var / n), binomial_error(t.hits, e.samples) * weight);
  return e;
}

MonteCarloEstimate gc_estimate(const Tally& t) {
  MonteCarloEstimate e;
  e.samples = t.valid();
  e.failed = t.failed;
  e.value = e.samples > 0 ? static_cast<double>(t.gc_hits) / e.samples : 0.0;
  e.std_error = binomial_error(t.gc_hits, e.samples);
  return e;
}

void require_alpha(double alpha, const char* field) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError(field, "alpha must lie in (0, 1]");
}

struct MinTracker {
  double value = std::numeric_limits<double>::infinity();
  double error = 0.0;
  bool seen = false;

  bool offer(const MonteCarloEstimate& e) {
    if (seen && !(e.value < value)) return false;
    value = e.value;
    error = e.std_error;
    seen = true;
    return true;
  }
};

void update_box_min(BoxMinimum& m, MinTracker& overall, MinTracker& ring, const CarlesonBox& box,
                    const MonteCarloEstimate& e) {
  ring.offer(e);
  if (overall.offer(e)) {
    m.delta = e.value;
    m.argmin = box;
    m.standard_error = e.std_error;
  }
}

}  // namespace

void validate(const DensityQuery& q) {
  if (!(q.bergman_radius > 0.0) || !std::isfinite(q.bergman_radius))
    throw ValidationError("query.bergman_radius", "must be a positive finite number");
  require_alpha(q.alpha, "query.alpha");
  if (!(q.level > 0.0) || !std::isfinite(q.level)) throw ValidationError("query.level", "must be positive");
  if (q.rings.empty()) throw ValidationError("query.rings", "grid must not be empty");
  for (std::size_t i = 0; i < q.rings.size(); ++i) {
    if (!(q.rings[i] >= 0.0 && q.rings[i] < 1.0)) throw ValidationError("query.rings", "moduli must lie in [0, 1)");
    if (i > 0 && !(q.rings[i] > q.rings[i - 1]))
      throw ValidationError("query.rings", "moduli must be strictly increasing");
  }
  if (q.angles_per_ring < 64 || q.angles_per_ring > 512)
    throw ValidationError("query.angles_per_ring", "must lie in [64, 512]");
  if (q.samples_per_disk < 1000) throw ValidationError("query.samples_per_disk", "must be at least 1000");
  if (!(q.truncation_eps >= counting::kMinTruncation && q.truncation_eps <= counting::kMaxTruncation))
    throw ValidationError("query.truncation_eps", "must lie in [1e-6, 1e-1]");
  if (q.box_radii.empty()) throw ValidationError("query.box_radii", "must not be empty");
  for (double r : q.box_radii)
    if (!(r > 0.0 && r <= 2.0)) throw ValidationError("query.box_radii", "radii must lie in (0, 2]");
  if (q.box_angles < 1) throw ValidationError("query.box_angles", "must be positive");
}

std::vector<DiskPoint> ring_points(const DensityQuery& q, double modulus) {
  if (modulus == 0.0) return {DiskPoint{0.0, 0.0}};
  std::vector<DiskPoint> out;
  out.reserve(q.angles_per_ring);
  for (int j = 0; j < q.angles_per_ring; ++j) out.push_back(std::polar(modulus, 2.0 * kPi * j / q.angles_per_ring));
  return out;
}

MonteCarloEstimate coverage_ratio(const SymbolMap& phi, DiskPoint z, double r, const DensityQuery& q) {
  validate(q);
  return coverage_estimate(tally_disk(phi, z, r, {}, q, nullptr));
}

MonteCarloEstimate reverse_carleson_ratio(const SymbolMap& phi, DiskPoint z, double r, double alpha,
                                          const DensityQuery& q) {
  validate(q);
  require_alpha(alpha, "alpha");
  return alpha_estimate(tally_disk(phi, z, r, {alpha}, q, nullptr), 0, alpha);
}

MonteCarloEstimate box_ratio(const SymbolMap& phi, const CarlesonBox& box, std::optional<double> alpha,
                             const DensityQuery& q) {
  validate(q);
  if (!alpha) return coverage_estimate(tally_box(phi, box, {}, q.level, q, false));
  require_alpha(*alpha, "alpha");
  return alpha_estimate(tally_box(phi, box, {*alpha}, q.level, q, false), 0, *alpha);
}

MonteCarloEstimate gc_density(const SymbolMap& phi, double c, DiskPoint zeta, double r, const DensityQuery& q) {
  validate(q);
  if (!(c > 0.0)) throw ValidationError("level", "must be positive");
  return gc_estimate(tally_box(phi, geometry::carleson_box(zeta, r), {}, c, q, true));
}

DensitySweep density_sweep(const SymbolMap& phi, double r, const std::vector<double>& alphas,
                           const DensityQuery& q) {
  validate(q);
  for (double a : alphas) require_alpha(a, "alphas");
  DensitySweep out;
  out.reverse.resize(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) out.reverse[i].alpha = alphas[i];

  MinTracker cov_all;
  std::vector<MinTracker> rev_all(alphas.size());
  for (double modulus : q.rings) {
    MinTracker cov_ring;
    std::vector<MinTracker> rev_ring(alphas.size());
    RingMinimum cov_min{modulus, 0.0, {}, 0.0};
    std::vector<RingMinimum> rev_min(alphas.size(), cov_min);
    for (const DiskPoint z : ring_points(q, modulus)) {
      const Tally t = tally_disk(phi, z, r, alphas, q, &out.histogram);
      out.samples += t.drawn;
      out.failed += t.failed;
      out.max_count = std::max(out.max_count, t.max_count);
      const auto cov = coverage_estimate(t);
      if (cov_ring.offer(cov)) cov_min = {modulus, cov.value, z, cov.std_error};
      if (cov_all.offer(cov)) {
        out.coverage.delta = cov.value;
        out.coverage.argmin_z = z;
        out.coverage.standard_error = cov.std_error;
      }
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto e = alpha_estimate(t, i, alphas[i]);
        if (rev_ring[i].offer(e)) rev_min[i] = {modulus, e.value, z, e.std_error};
        if (rev_all[i].offer(e)) {
          out.reverse[i].delta = e.value;
          out.reverse[i].argmin_z = z;
          out.reverse[i].standard_error = e.std_error;
        }
      }
    }
    out.coverage.per_ring.push_back(cov_min);
    for (std::size_t i = 0; i < alphas.size(); ++i) out.reverse[i].per_ring.push_back(rev_min[i]);
  }
  return out;
}

DeltaEstimate delta_infimum(const SymbolMap& phi, double r, std::optional<double> alpha, const DensityQuery& q) {
  if (!alpha) return density_sweep(phi, r, {}, q).coverage;
  return density_sweep(phi, r, {*alpha}, q).reverse.front();
}

std::vector<CarlesonBox> box_grid(const std::vector<double>& radii, int angles) {
  std::vector<CarlesonBox> out;
  out.reserve(radii.size() * static_cast<std::size_t>(std::max(angles, 0)));
  for (double r : radii)
    for (int j = 0; j < angles; ++j) out.push_back(geometry::carleson_box(std::polar(1.0, 2.0 * kPi * j / angles), r));
  return out;
}

std::vector<CarlesonBox> box_grid(const DensityQuery& q) { return box_grid(q.box_radii, q.box_angles); }

AccumulationResult boundary_accumulation_check(const SymbolMap& phi, const std::vector<CarlesonBox>& boxes,
                                               const DensityQuery& q) {
  validate(q);
  AccumulationResult out;
  out.boxes = static_cast<int>(boxes.size());
  for (const auto& box : boxes) {
    Tally t(0);
    try {
      t = tally_box(phi, box, {}, q.level, q, false);
    } catch (const ConvergenceError&) {
      out.inconclusive = true;
      continue;
    }
    if (t.hits > 0) {
      ++out.boxes_hit;
    } else if (t.exhausted || t.failed > 0) {
      out.inconclusive = true;
    } else if (!out.witness) {
      out.witness = box;
    }
  }
  out.pass = out.boxes_hit == out.boxes;
  if (out.witness) out.inconclusive = false;
  return out;
}

BoxSweep box_sweep(const SymbolMap& phi, const std::vector<double>& alphas, const DensityQuery& q) {
  validate(q);
  for (double a : alphas) require_alpha(a, "alphas");
  BoxSweep out;
  out.reverse.resize(alphas.size());
  const auto boxes = box_grid(q);
  out.accumulation.boxes = static_cast<int>(boxes.size());

  MinTracker cov_all, gc_all;
  std::vector<MinTracker> rev_all(alphas.size());
  std::size_t index = 0;
  for (double radius : q.box_radii) {
    MinTracker cov_ring, gc_ring;
    std::vector<MinTracker> rev_ring(alphas.size());
    for (int j = 0; j < q.box_angles; ++j, ++index) {
      const auto& box = boxes[index];
      const Tally t = tally_box(phi, box, alphas, q.level, q, true);
      out.samples += t.drawn;
      out.failed += t.failed;
      out.max_count = std::max(out.max_count, t.max_count);
      if (t.hits > 0) {
        ++out.accumulation.boxes_hit;
      } else if (t.exhausted || t.failed > 0) {
        out.accumulation.inconclusive = true;
      } else if (!out.accumulation.witness) {
        out.accumulation.witness = box;
      }
      update_box_min(out.coverage, cov_all, cov_ring, box, coverage_estimate(t));
      update_box_min(out.gc, gc_all, gc_ring, box, gc_estimate(t));
      for (std::size_t i = 0; i < alphas.size(); ++i)
        update_box_min(out.reverse[i], rev_all[i], rev_ring[i], box, alpha_estimate(t, i, alphas[i]));
    }
    out.coverage.per_radius.emplace_back(radius, cov_ring.value);
    out.gc.per_radius.emplace_back(radius, gc_ring.value);
    for (std::size_t i = 0; i < alphas.size(); ++i) out.reverse[i].per_radius.emplace_back(radius, rev_ring[i].value);
  }
  out.accumulation.pass = out.accumulation.boxes_hit == out.accumulation.boxes;
  if (out.accumulation.witness) out.accumulation.inconclusive = false;
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::closed_range_evidence: return "closed_range_evidence";
    case VerdictLabel::not_closed_evidence: return "not_closed_evidence";
    case VerdictLabel::unbounded_operator_evidence: return "unbounded_operator_evidence";
    case VerdictLabel::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Analysis analyze(const SymbolMap& phi, const DensityQuery& q, const ClassifyOptions& options) {
  validate(q);
  Analysis a;
  auto note_error = [&](const std::string& stage, const std::exception& e) {
    a.errors.push_back(stage + ": " + e.what());
  };

  std::vector<double> alphas = options.alphas;
  if (std::find(alphas.begin(), alphas.end(), q.alpha) == alphas.end()) alphas.push_back(q.alpha);
  const std::size_t main_alpha =
      static_cast<std::size_t>(std::find(alphas.begin(), alphas.end(), q.alpha) - alphas.begin());

  const auto family = dirichlet::default_family(options.family);
  try {
    a.boundedness = dirichlet::boundedness_estimate(phi, family, options.boundedness_eps, options.boundedness);
  } catch (const std::exception& e) {
    note_error("boundedness", e);
  }
  try {
    auto grid_options = options.grid;
    grid_options.eps = q.truncation_eps;
    const auto grid = dirichlet::PushforwardGrid::build(phi, grid_options);
    a.grid_max_count = grid.max_count();
    std::vector<int> orders = options.tail_orders;
    orders.push_back(options.tail_order);
    a.tails = dirichlet::tail_functionals(grid, orders, family);
    a.tail = a.tails.at(options.tail_order);
  } catch (const std::exception& e) {
    note_error("tail", e);
  }
  try {
    a.disks = density_sweep(phi, q.bergman_radius, alphas, q);
  } catch (const std::exception& e) {
    note_error("disk sweep", e);
  }
  try {
    a.boxes = box_sweep(phi, alphas, q);
  } catch (const std::exception& e) {
    note_error("box sweep", e);
  }

  Verdict& v = a.verdict;
  auto put = [&](const std::string& key, double value, double threshold, bool pass) {
    v.criteria[key] = Criterion{value, threshold, pass, true};
  };
  auto missing = [&](const std::string& key, double threshold) {
    v.criteria[key] = Criterion{0.0, threshold, false, false};
  };

  if (a.disks) {
    put("main_thm_b", a.disks->coverage.delta, options.delta_floor, a.disks->coverage.delta >= options.delta_floor);
    const double d = a.disks->reverse[main_alpha].delta;
    put("main_thm_c", d, options.delta_floor, d >= options.delta_floor);
  } else {
    missing("main_thm_b", options.delta_floor);
    missing("main_thm_c", options.delta_floor);
  }
  if (a.boxes && !a.boxes->accumulation.inconclusive) {
    const auto& acc = a.boxes->accumulation;
    put("prop21_boxes", acc.boxes > 0 ? static_cast<double>(acc.boxes_hit) / acc.boxes : 0.0, 1.0, acc.pass);
  } else {
    missing("prop21_boxes", 1.0);
  }
  int max_count = 0;
  if (a.disks) max_count = std::max(max_count, a.disks->max_count);
  if (a.boxes) max_count = std::max(max_count, a.boxes->max_count);
  if (a.disks || a.boxes) {
    put("cor26_bounded_n", max_count, options.count_bound, max_count <= options.count_bound);
  } else {
    missing("cor26_bounded_n", options.count_bound);
  }
  if (a.tail) {
    put("tail_hypothesis", *a.tail, options.tail_threshold, *a.tail <= options.tail_threshold);
  } else {
    missing("tail_hypothesis", options.tail_threshold);
  }
  if (a.boxes) {
    put("thmZ_gc", a.boxes->gc.delta, options.delta_floor, a.boxes->gc.delta >= options.delta_floor);
  } else {
    missing("thmZ_gc", options.delta_floor);
  }

  auto decayed = [&]() {
    if (!a.disks) return false;
    const auto& rings = a.disks->coverage.per_ring;
    if (rings.size() < 2) return false;
    const auto& last = rings[rings.size() - 1];
    const auto& prev = rings[rings.size() - 2];
    return prev.modulus > 0.0 && last.min_ratio < options.delta_decay && prev.min_ratio < options.delta_decay;
  };

  std::ostringstream notes;
  if (a.boundedness) {
    notes << "boundedness growth " << a.boundedness->growth << " from eps " << a.boundedness->eps << " to "
          << a.boundedness->eps / 10.0 << ". ";
  }
  const auto& c = v.criteria;
  if (a.boundedness && a.boundedness->divergence_suspected) {
    v.label = VerdictLabel::unbounded_operator_evidence;
    v.rule = "boundedness_divergence";
  } else if (!a.boundedness) {
    // Without step (i) an unbounded operator cannot be ruled out.
    v.label = VerdictLabel::inconclusive;
    v.rule = "none";
  } else if (c.at("prop21_boxes").evaluated && !c.at("prop21_boxes").pass) {
    v.label = VerdictLabel::not_closed_evidence;
    v.rule = "prop21_boxes";
  } else if (c.at("tail_hypothesis").evaluated && c.at("tail_hypothesis").pass && c.at("main_thm_b").evaluated &&
             c.at("main_thm_b").pass) {
    v.label = VerdictLabel::closed_range_evidence;
    v.rule = "main_thm_b";
  } else if (c.at("cor26_bounded_n").evaluated && c.at("cor26_bounded_n").pass && decayed()) {
    v.label = VerdictLabel::not_closed_evidence;
    v.rule = "cor26_bounded_n";
  } else {
    v.label = VerdictLabel::inconclusive;
    v.rule = "none";
    if (!a.disks || c.at("main_thm_b").pass != c.at("main_thm_c").pass)
      notes << "coverage and reverse-Carleson modes disagree or are missing. ";
  }
  for (const auto& e : a.errors) notes << e << ". ";
  v.notes = notes.str();
  if (!v.notes.empty() && v.notes.back() == ' ') v.notes.pop_back();
  return a;
}

Verdict classify(const SymbolMap& phi, const DensityQuery& q, const ClassifyOptions& options) {
  return analyze(phi, q, options).verdict;
}

}  // namespace closedrange::carleson
