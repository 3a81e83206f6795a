#include "closedrange/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "closedrange/counting.hpp"
#include "closedrange/errors.hpp"

namespace closedrange::heatmap {

namespace {

constexpr int kSentinelGray = 0;
constexpr int kBackgroundGray = 8;
constexpr int kLowGray = 16;
constexpr int kHighGray = 255;

std::optional<double> evaluate(const symbols::SymbolMap& phi, const carleson::DensityQuery& q, Field field,
                               DiskPoint w) {
  try {
    switch (field) {
      case Field::n_phi:
        return counting::count_preimages(phi, w, q.truncation_eps);
      case Field::tau: {
        const auto s = counting::counting_sample(phi, w, q.truncation_eps);
        if (!s.tau) return std::nullopt;
        return *s.tau;
      }
      case Field::gc_indicator: {
        const auto s = counting::counting_sample(phi, w, q.truncation_eps);
        if (!s.tau) return std::nullopt;
        return *s.tau > q.level ? 1.0 : 0.0;
      }
      case Field::coverage:
        return carleson::coverage_ratio(phi, w, q.bergman_radius, q).value;
    }
  } catch (const ConvergenceError&) {
  } catch (const ContourError&) {
  } catch (const OverflowError&) {
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  ensure_parent(path);
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

const char* to_string(Field field) {
  switch (field) {
    case Field::n_phi: return "n_phi";
    case Field::tau: return "tau";
    case Field::coverage: return "coverage";
    case Field::gc_indicator: return "gc_indicator";
  }
  return "n_phi";
}

Field field_from_string(const std::string& name) {
  for (Field f : {Field::n_phi, Field::tau, Field::coverage, Field::gc_indicator})
    if (name == to_string(f)) return f;
  throw ValidationError("field", "unknown heatmap field '" + name + "'");
}

const char* to_string(Layout layout) { return layout == Layout::polar ? "polar" : "cartesian"; }

Layout layout_from_string(const std::string& name) {
  if (name == "polar") return Layout::polar;
  if (name == "cartesian") return Layout::cartesian;
  throw ValidationError("layout", "must be 'polar' or 'cartesian'");
}

DiskPoint Heatmap::pixel_point(int row, int col) const {
  const double n = resolution;
  if (layout == Layout::polar) return std::polar((row + 0.5) / n, 2.0 * kPi * (col + 0.5) / n);
  // Row 0 is the top edge (imaginary part near +1).
  return {-1.0 + 2.0 * (col + 0.5) / n, 1.0 - 2.0 * (row + 0.5) / n};
}

Heatmap sample(const symbols::SymbolMap& phi, const carleson::DensityQuery& q, Field field, int resolution,
               Layout layout) {
  if (resolution < 1 || resolution > kMaxResolution) throw ValidationError("resolution", "must lie in [1, 2048]");
  carleson::validate(q);
  Heatmap map;
  map.field = field;
  map.layout = layout;
  map.resolution = resolution;
  const std::size_t total = static_cast<std::size_t>(resolution) * resolution;
  map.values.assign(total, 0.0);
  map.states.assign(total, PixelState::value);
  bool any = false;
  for (int row = 0; row < resolution; ++row) {
    for (int col = 0; col < resolution; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * resolution + col;
      const DiskPoint w = map.pixel_point(row, col);
      if (!(std::abs(w) < 1.0)) {
        map.states[i] = PixelState::background;
        continue;
      }
      const auto v = evaluate(phi, q, field, w);
      if (!v || !std::isfinite(*v)) {
        map.states[i] = PixelState::sentinel;
        ++map.sentinel_count;
        continue;
      }
      map.values[i] = *v;
      map.min = any ? std::min(map.min, *v) : *v;
      map.max = any ? std::max(map.max, *v) : *v;
      any = true;
    }
  }
  return map;
}

std::vector<unsigned char> gray_levels(const Heatmap& map) {
  std::vector<unsigned char> out(map.values.size());
  const double span = map.max - map.min;
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (map.states[i]) {
      case PixelState::sentinel: out[i] = kSentinelGray; break;
      case PixelState::background: out[i] = kBackgroundGray; break;
      case PixelState::value: {
        if (!(span > 0.0)) {
          out[i] = kHighGray;
        } else {
          const double t = (map.values[i] - map.min) / span;
          out[i] = static_cast<unsigned char>(kLowGray + std::lround(t * (kHighGray - kLowGray)));
        }
        break;
      }
    }
  }
  return out;
}

std::vector<std::pair<double, int>> breakpoints(const Heatmap& map) {
  std::vector<std::pair<double, int>> out;
  if (!(map.max > map.min)) {
    out.emplace_back(map.min, kHighGray);
    return out;
  }
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    out.emplace_back(map.min + t * (map.max - map.min), kLowGray + static_cast<int>(std::lround(t * (kHighGray - kLowGray))));
  }
  return out;
}

void write_pgm(const Heatmap& map, const std::filesystem::path& path) {
  auto out = open_out(path, true);
  out << "P5\n" << map.resolution << " " << map.resolution << "\n255\n";
  const auto gray = gray_levels(map);
  out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_svg(const Heatmap& map, const std::filesystem::path& path) {
  auto out = open_out(path, false);
  const auto gray = gray_levels(map);
  const int n = map.resolution;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << n << "\" height=\"" << n << "\" viewBox=\"0 0 " << n
      << " " << n << "\" shape-rendering=\"crispEdges\">\n";
  // One rect per horizontal run of equal gray.
  for (int row = 0; row < n; ++row) {
    int col = 0;
    while (col < n) {
      const unsigned char g = gray[static_cast<std::size_t>(row) * n + col];
      int end = col + 1;
      while (end < n && gray[static_cast<std::size_t>(row) * n + end] == g) ++end;
      out << "<rect x=\"" << col << "\" y=\"" << row << "\" width=\"" << end - col << "\" height=\"1\" fill=\"rgb("
          << int(g) << "," << int(g) << "," << int(g) << ")\"/>\n";
      col = end;
    }
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_sidecar(const Heatmap& map, const std::filesystem::path& path) {
  auto out = open_out(path, false);
  char buf[128];
  out << "field " << to_string(map.field) << "\n";
  out << "layout " << to_string(map.layout) << "\n";
  out << "resolution " << map.resolution << "\n";
  std::snprintf(buf, sizeof buf, "min %.17g\nmax %.17g\n", map.min, map.max);
  out << buf;
  out << "sentinel_pixels " << map.sentinel_count << "\n";
  out << "sentinel_gray " << kSentinelGray << "\nbackground_gray " << kBackgroundGray << "\n";
  out << "breakpoints (value gray)\n";
  for (const auto& [v, g] : breakpoints(map)) {
    std::snprintf(buf, sizeof buf, "%.17g %d\n", v, g);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

EmittedFiles emit(const Heatmap& map, const std::filesystem::path& out_dir, const std::string& stem, bool svg) {
  EmittedFiles files;
  files.pgm = out_dir / (stem + ".pgm");
  files.sidecar = out_dir / (stem + ".txt");
  write_pgm(map, files.pgm);
  write_sidecar(map, files.sidecar);
  if (svg) {
    files.svg = out_dir / (stem + ".svg");
    write_svg(map, files.svg);
  }
  files.sentinel_count = map.sentinel_count;
  return files;
}

}  // namespace closedrange::heatmap
