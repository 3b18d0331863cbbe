#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "topomap/errors.hpp"
#include "topomap/grid_io.hpp"

using namespace topomap;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("topomap_grid_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& b) {
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("all-unknown 2x2 graymap loads as four unknown cells") {
  auto bytes = bytes_of("P5\n2 2\n255\n");
  bytes.insert(bytes.end(), 4, kUnknownValue);
  const auto dir = scratch_dir("unknown");
  write_bytes(dir / "u.pgm", bytes);
  const OccupancyGrid g = load_grid(dir / "u.pgm");
  CHECK(g.width() == 2);
  CHECK(g.height() == 2);
  CHECK((g.cells == kUnknownValue).all());
}

TEST_CASE("missing sidecar gives default resolution and origin") {
  const auto dir = scratch_dir("nometa");
  write_pgm(dir / "m.pgm", Raster<std::uint8_t>::Constant(3, 4, 254));
  const OccupancyGrid g = load_grid(dir / "m.pgm");
  CHECK(g.resolution == 0.05);
  CHECK(g.origin == Point2d(0, 0));
}

TEST_CASE("header width 3 with 8 data bytes is a size error") {
  auto bytes = bytes_of("P5\n3 3\n255\n");
  bytes.insert(bytes.end(), 8, 0);
  CHECK_THROWS_AS(parse_pgm(bytes), SizeError);
}

TEST_CASE("malformed headers name the byte offset") {
  try {
    parse_pgm(bytes_of("P5\n3 x\n255\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte 5") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_pgm(bytes_of("P6\n1 1\n255\n\x01")), ParseError);
  CHECK_THROWS_AS(parse_pgm(bytes_of("P5\n1 1\n65535\n\x01\x01")), ParseError);
}

TEST_CASE("ASCII and binary graymaps decode to the same raster") {
  const auto ascii = parse_pgm(bytes_of("P2\n# comment\n3 2\n255\n0 205 254\n1 2 3\n"));
  std::vector<std::uint8_t> bin = bytes_of("P5\n3 2\n255\n");
  for (int v : {0, 205, 254, 1, 2, 3}) bin.push_back(static_cast<std::uint8_t>(v));
  CHECK((ascii == parse_pgm(bin)).all());
  CHECK(ascii(0, 1) == 205);
  CHECK(ascii(1, 2) == 3);
}

TEST_CASE("load/save round trip is byte-identical on generated canonical graymaps") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 40), val(0, 255);
  const auto dir = scratch_dir("roundtrip");
  for (int t = 0; t < 25; ++t) {
    const int w = dim(rng), h = dim(rng);
    // Built by hand so the oracle does not depend on encode_pgm.
    auto bytes = bytes_of("P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n");
    for (int i = 0; i < w * h; ++i) bytes.push_back(static_cast<std::uint8_t>(val(rng)));
    write_bytes(dir / "in.pgm", bytes);
    {
      std::ofstream meta(dir / "in.meta");
      meta << "resolution: 0.1\norigin_x: -3.25\norigin_y: 7\noccupied_thresh: 0.7\nfree_thresh: 0.2\n";
    }
    const OccupancyGrid g = load_grid(dir / "in.pgm");
    save_grid(dir / "out.pgm", g);
    CHECK(read_bytes(dir / "out.pgm") == bytes);
    const OccupancyGrid back = load_grid(dir / "out.pgm");
    CHECK((back.cells == g.cells).all());
    CHECK(back.resolution == 0.1);
    CHECK(back.origin == Point2d(-3.25, 7));
    CHECK(back.occupied_thresh == 0.7);
    CHECK(back.free_thresh == 0.2);
  }
}

TEST_CASE("sidecar values with many digits survive a round trip exactly") {
  const auto dir = scratch_dir("digits");
  OccupancyGrid g = OccupancyGrid::filled(2, 2, 205, 0.1 + 0.2);
  g.origin = Point2d(1.0 / 3.0, -2.0 / 7.0);
  save_grid(dir / "g.pgm", g);
  const OccupancyGrid back = load_grid(dir / "g.pgm");
  CHECK(back.resolution == g.resolution);
  CHECK(back.origin == g.origin);
}

TEST_CASE("bad sidecar values are parse errors") {
  const auto dir = scratch_dir("badmeta");
  write_pgm(dir / "b.pgm", Raster<std::uint8_t>::Constant(2, 2, 0));
  {
    std::ofstream meta(dir / "b.meta");
    meta << "resolution: fast\n";
  }
  CHECK_THROWS_AS(load_grid(dir / "b.pgm"), ParseError);
  {
    std::ofstream meta(dir / "b.meta");
    meta << "resolution: -1\n";
  }
  CHECK_THROWS_AS(load_grid(dir / "b.pgm"), ParseError);
}

TEST_CASE("pixel_to_world worked examples") {
  const WorldTransform id;
  CHECK(pixel_to_world(id, Point2d(3, 4)) == Point2d(3, 4));
  const WorldTransform t{0.05, Point2d(10, 10), Point2d(0, 0)};
  const Point2d w = pixel_to_world(t, Point2d(20, 0));
  CHECK(w.x() == doctest::Approx(11.0));
  CHECK(w.y() == doctest::Approx(10.0));
  const WorldTransform cropped{0.5, Point2d(1, 2), Point2d(4, 6)};
  CHECK(pixel_to_world(cropped, Point2d(0, 0)).isApprox(Point2d(3, 5)));
}

TEST_CASE("world_to_pixel inverts pixel_to_world") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-500, 500), s(0.01, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const WorldTransform t{s(rng), Point2d(u(rng), u(rng)), Point2d(std::floor(u(rng) / 10), std::floor(u(rng) / 10))};
    const Point2d p(std::floor(u(rng)) + 250, std::floor(u(rng)) + 250);
    const Point2d back = world_to_pixel(t, pixel_to_world(t, p));
    CHECK((back - p).cwiseAbs().maxCoeff() < 0.5);
  }
}

TEST_CASE("key-value files") {
  const auto kv = parse_key_values("a: 1\n# note\n\nb:2.5\n", "test");
  CHECK(kv.get_int("a", 0) == 1);
  CHECK(kv.get_double("b", 0) == 2.5);
  CHECK(kv.get_double("missing", 7) == 7);
  CHECK_THROWS_AS(parse_key_values("novalue\n", "test"), ParseError);
}
