#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "shapes.hpp"
#include "topomap/binarize.hpp"

using namespace topomap;

namespace {

// Per-cell restatement of the classification rule.
CellClass expected_class(std::uint8_t v, const OccupancyGrid& g) {
  if (v == 205) return CellClass::Background;
  const double p = (255.0 - v) / 255.0;
  if (p > g.occupied_thresh) return CellClass::Obstacle;
  if (p < g.free_thresh) return CellClass::Free;
  return CellClass::Background;
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

OccupancyGrid random_grid(int w, int h, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 3), any(0, 255);
  OccupancyGrid g = OccupancyGrid::filled(w, h, 205);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int k = pick(rng);
      g.cells(y, x) = static_cast<std::uint8_t>(k == 0 ? 0 : k == 1 ? 254 : k == 2 ? 205 : any(rng));
    }
  }
  return g;
}

}  // namespace

TEST_CASE("classify_cells convention endpoints") {
  CHECK((classify_cells(OccupancyGrid::filled(5, 4, 205)) == std::uint8_t(CellClass::Background)).all());
  OccupancyGrid g = OccupancyGrid::filled(2, 1, 0);
  g.cells(0, 1) = 254;
  const TriState t = classify_cells(g);
  CHECK(t(0, 0) == std::uint8_t(CellClass::Obstacle));
  CHECK(t(0, 1) == std::uint8_t(CellClass::Free));
}

TEST_CASE("classify_cells matches a per-cell enumeration on random grids") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const OccupancyGrid g = random_grid(16, 16, rng);
    const TriState tri = classify_cells(g);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) CHECK(tri(y, x) == std::uint8_t(expected_class(g.cells(y, x), g)));
    }
  }
}

TEST_CASE("blur with sigma 0 and threshold 0.5 is the identity on a 0/1 mask") {
  std::mt19937_64 rng(8);
  const Mask m = oracle::random_mask(20, 15, 0.5, rng);
  TriState tri = m.unaryExpr([](std::uint8_t v) { return std::uint8_t(v ? CellClass::Free : CellClass::Obstacle); });
  CHECK((blur_and_threshold(tri, 0.0, 0.5) == m).all());
}

TEST_CASE("a lone free cell vanishes under sigma 2") {
  // The 2D kernel peak is the square of the 1D peak of a kernel truncated at 3 sigma.
  double sum = 0.0;
  for (int i = -6; i <= 6; ++i) sum += std::exp(-i * i / 8.0);
  const double peak = 1.0 / (sum * sum);
  REQUIRE(peak < 0.5);
  TriState tri = TriState::Constant(31, 31, std::uint8_t(CellClass::Background));
  tri(15, 15) = std::uint8_t(CellClass::Free);
  CHECK((blur_and_threshold(tri, 2.0, 0.5) == 0).all());
}

TEST_CASE("a uniform free raster stays free in the interior") {
  const TriState tri = TriState::Constant(40, 40, std::uint8_t(CellClass::Free));
  for (double sigma : {0.5, 1.0, 3.0}) {
    const Mask b = blur_and_threshold(tri, sigma, 0.5);
    const int r = static_cast<int>(std::ceil(3 * sigma));
    CHECK((b.block(r, r, 40 - 2 * r, 40 - 2 * r) == 1).all());
  }
}

TEST_CASE("threshold outside (0,1) is a parameter error") {
  const TriState tri = TriState::Zero(4, 4);
  CHECK_THROWS_AS(blur_and_threshold(tri, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(blur_and_threshold(tri, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(blur_and_threshold(tri, -1.0, 0.5), ParameterError);
}

TEST_CASE("small regions are dropped by area") {
  Mask m = Mask::Zero(40, 40);
  m.block(2, 2, 1, 3).setOnes();      // area 3
  m.block(10, 10, 15, 20).setOnes();  // area 300
  const Mask f = filter_small_regions(m, 10);
  CHECK(f.cast<int>().sum() == 300);
  CHECK(f(2, 2) == 0);
  CHECK((filter_small_regions(m, 0) == m).all());
}

TEST_CASE("component areas match a flood-fill oracle") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const Mask m = oracle::random_mask(24, 18, 0.45, rng);
    for (int conn : {4, 8}) {
      for (std::uint8_t value : {std::uint8_t(0), std::uint8_t(1)}) {
        const Components c = label_components(m, value, conn);
        const oracle::Regions r = oracle::flood_fill(m, value, conn);
        CHECK(sorted(c.areas) == sorted(r.areas));
      }
    }
  }
}

TEST_CASE("surviving components are large enough and min_area is monotone") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Mask m = oracle::random_mask(30, 30, 0.55, rng);
    Mask prev = filter_small_regions(m, 0);
    for (int a : {1, 3, 6, 12, 25, 60}) {
      const Mask f = filter_small_regions(m, a);
      for (int area : oracle::flood_fill(f, 1, 8).areas) CHECK(area >= a);
      CHECK(((f != 0) && (prev == 0)).count() == 0);
      prev = f;
    }
  }
}

TEST_CASE("small holes are filled when requested") {
  Mask m = Mask::Zero(30, 30);
  m.block(5, 5, 20, 20).setOnes();
  m(10, 10) = 0;                       // hole of area 1
  m.block(15, 15, 4, 4).setZero();     // hole of area 16
  const Mask f = filter_small_regions(m, 0, 5);
  CHECK(f(10, 10) == 1);
  CHECK(f(16, 16) == 0);
  CHECK((filter_small_regions(m, 0, 0) == m).all());
}

TEST_CASE("binarize output is a fixed point at sigma 0 and keeps the border clear") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const OccupancyGrid g = random_grid(40, 30, rng);
    BinarizeParams p;
    p.min_area = 5;
    const BinaryMap b = binarize(g, p);
    CHECK((b.mask.row(0) == 0).all());
    CHECK((b.mask.row(b.mask.rows() - 1) == 0).all());
    CHECK((b.mask.col(0) == 0).all());
    CHECK((b.mask.col(b.mask.cols() - 1) == 0).all());
    for (int area : oracle::flood_fill(b.mask, 1, 8).areas) CHECK(area >= p.min_area);

    OccupancyGrid again = shapes::known_grid(b.mask);
    BinarizeParams p0 = p;
    p0.sigma = 0.0;
    CHECK((binarize(again, p0).mask == b.mask).all());
  }
}

TEST_CASE("default blur scale follows the resolution") {
  CHECK(default_sigma(0.05) == 1.0);
  CHECK(default_sigma(0.01) == 3.0);
  CHECK(default_sigma(1.0) == 1.0);
}
