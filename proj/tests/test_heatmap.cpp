#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "closedrange/errors.hpp"
#include "closedrange/heatmap.hpp"
#include "closedrange/symbols.hpp"
#include "doctest.h"

using namespace closedrange;
using namespace closedrange::heatmap;
using symbols::build_symbol;
using symbols::SymbolDescriptor;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("closedrange_heatmap_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("identity n_phi is constant 1") {
  const auto map = sample(build_symbol(SymbolDescriptor::identity()), {}, Field::n_phi, 16);
  CHECK(map.min == 1.0);
  CHECK(map.max == 1.0);
  CHECK(map.sentinel_count == 0);
  for (auto g : gray_levels(map)) CHECK(g == 255);
}

TEST_CASE("power 2 counts with multiplicity") {
  // No polar pixel sits at w = 0, so every pixel sees two simple preimages.
  const auto map = sample(build_symbol(SymbolDescriptor::power(2)), {}, Field::n_phi, 16);
  CHECK(map.min == 2.0);
  CHECK(map.max == 2.0);
}

TEST_CASE("scaled n_phi is an indicator of the image disk") {
  const auto map = sample(build_symbol(SymbolDescriptor::scaled(0.5)), {}, Field::n_phi, 20);
  for (int row = 0; row < 20; ++row) {
    const double expected = map.pixel_point(row, 0).real() < 0.5 ? 1.0 : 0.0;
    for (int col = 0; col < 20; ++col) CHECK(map.values[row * 20 + col] == expected);
  }
  const auto gray = gray_levels(map);
  CHECK(gray.front() == 255);
  CHECK(gray.back() == 16);
}

TEST_CASE("crescent coverage is thinner near the tangency") {
  carleson::DensityQuery q;
  q.samples_per_disk = 1000;
  const auto map = sample(build_symbol(SymbolDescriptor::crescent()), q, Field::coverage, 8);
  // Outermost row; column 0 sits near angle 0, column 4 near pi.
  const int row = 7;
  CHECK(map.values[row * 8 + 0] < map.values[row * 8 + 4]);
  CHECK(map.max <= 1.0);
  CHECK(map.min >= 0.0);
}

TEST_CASE("cartesian layout marks background and undefined pixels") {
  // Odd resolution puts a pixel at w = 0, where tau is undefined.
  const auto map = sample(build_symbol(SymbolDescriptor::identity()), {}, Field::tau, 9, Layout::cartesian);
  CHECK(map.pixel_point(4, 4) == DiskPoint(0.0, 0.0));
  CHECK(map.states[4 * 9 + 4] == PixelState::sentinel);
  CHECK(map.sentinel_count == 1);
  CHECK(map.states[0] == PixelState::background);
  const auto gray = gray_levels(map);
  CHECK(gray[0] == 8);
  CHECK(gray[4 * 9 + 4] == 0);
  // The identity has tau = 1 away from the origin.
  CHECK(map.min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(map.max == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gc indicator of scaled(0.5)") {
  // One preimage 2w, so tau = log(1 / |2w|) / log(1 / |w|) inside |w| < 1/2.
  const auto map = sample(build_symbol(SymbolDescriptor::scaled(0.5)), {}, Field::gc_indicator, 16);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const double m = std::abs(map.pixel_point(int(i) / 16, int(i) % 16));
    const double t = m < 0.5 ? std::log(1.0 / (2.0 * m)) / std::log(1.0 / m) : 0.0;
    CAPTURE(m);
    CHECK(map.values[i] == (t > 0.5 ? 1.0 : 0.0));
  }
}

TEST_CASE("files on disk") {
  const auto dir = scratch("files");
  const auto map = sample(build_symbol(SymbolDescriptor::scaled(0.5)), {}, Field::n_phi, 12);
  const auto files = emit(map, dir, "scaled_n_phi", true);
  const auto pgm = slurp(files.pgm);
  const std::string header = "P5\n12 12\n255\n";
  REQUIRE(pgm.size() == header.size() + 144);
  CHECK(pgm.substr(0, header.size()) == header);
  const auto side = slurp(files.sidecar);
  CHECK(side.find("field n_phi") != std::string::npos);
  CHECK(side.find("layout polar") != std::string::npos);
  CHECK(side.find("sentinel_pixels 0") != std::string::npos);
  CHECK(breakpoints(map).size() == 5);
  const auto svg = slurp(files.svg);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  const auto plain = emit(map, dir, "plain", false);
  CHECK(plain.svg.empty());
  CHECK_FALSE(std::filesystem::exists(dir / "plain.svg"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("validation") {
  const auto id = build_symbol(SymbolDescriptor::identity());
  CHECK_THROWS_AS(sample(id, {}, Field::n_phi, 4096), ValidationError);
  CHECK_THROWS_AS(sample(id, {}, Field::n_phi, 0), ValidationError);
  CHECK_THROWS_AS(field_from_string("colour"), ValidationError);
  CHECK_THROWS_AS(layout_from_string("spiral"), ValidationError);
  for (auto f : {Field::n_phi, Field::tau, Field::coverage, Field::gc_indicator})
    CHECK(field_from_string(to_string(f)) == f);
  CHECK(layout_from_string("cartesian") == Layout::cartesian);
}
