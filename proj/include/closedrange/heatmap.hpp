#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "closedrange/carleson.hpp"
#include "closedrange/symbols.hpp"

namespace closedrange::heatmap {

inline constexpr int kMaxResolution = 2048;

enum class Field { n_phi, tau, coverage, gc_indicator };
enum class Layout {
  polar,     // row i <-> radius (i + 1/2) / res, column j <-> angle 2 pi (j + 1/2) / res
  cartesian  // square [-1, 1]^2, pixels outside the disk are background
};

const char* to_string(Field field);
Field field_from_string(const std::string& name);
const char* to_string(Layout layout);
Layout layout_from_string(const std::string& name);

enum class PixelState : unsigned char { value, sentinel, background };

struct Heatmap {
  Field field = Field::n_phi;
  Layout layout = Layout::polar;
  int resolution = 0;
  std::vector<double> values;  // row-major, resolution x resolution
  std::vector<PixelState> states;
  double min = 0.0;  // over value pixels
  double max = 0.0;
  int sentinel_count = 0;

  /// Disk point at the pixel center.
  DiskPoint pixel_point(int row, int col) const;
};

/// Samples the field at every pixel center. n_phi and tau use the query's
/// counting truncation; coverage uses D(z, q.bergman_radius); the G_c
/// indicator uses q.level. Evaluation failures become sentinel pixels.
Heatmap sample(const symbols::SymbolMap& phi, const carleson::DensityQuery& q, Field field, int resolution,
               Layout layout = Layout::polar);

/// Gray levels: value pixels map linearly onto [16, 255], sentinel pixels
/// are 0 and background pixels 8. A constant field renders as 255.
std::vector<unsigned char> gray_levels(const Heatmap& map);

/// (value, gray) pairs at five evenly spaced breakpoints.
std::vector<std::pair<double, int>> breakpoints(const Heatmap& map);

void write_pgm(const Heatmap& map, const std::filesystem::path& path);
void write_svg(const Heatmap& map, const std::filesystem::path& path);
void write_sidecar(const Heatmap& map, const std::filesystem::path& path);

struct EmittedFiles {
  std::filesystem::path pgm;
  std::filesystem::path sidecar;
  std::filesystem::path svg;  // empty unless requested
  int sentinel_count = 0;
};

/// Writes <stem>.pgm and <stem>.txt (and <stem>.svg when asked) into out_dir.
EmittedFiles emit(const Heatmap& map, const std::filesystem::path& out_dir, const std::string& stem, bool svg);

}  // namespace closedrange::heatmap
