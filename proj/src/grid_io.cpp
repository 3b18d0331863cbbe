#include "topomap/grid_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "topomap/errors.hpp"

namespace topomap {

OccupancyGrid OccupancyGrid::filled(int width, int height, std::uint8_t value, double resolution) {
  OccupancyGrid g;
  g.cells = Raster<std::uint8_t>::Constant(height, width, value);
  g.resolution = resolution;
  return g;
}

Point2d pixel_to_world(const WorldTransform& t, const Point2d& p) {
  return (p + t.crop_offset) * t.scale + t.translation;
}

Point2d world_to_pixel(const WorldTransform& t, const Point2d& w) {
  return (w - t.translation) / t.scale - t.crop_offset;
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000) throw ParseError(std::string("graymap: ") + what + " too large at byte " + std::to_string(start));
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(std::string("graymap: expected ") + what + " at byte " + std::to_string(start));
    }
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::size_t size() const { return bytes_.size(); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Raster<std::uint8_t> parse_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("graymap: bad magic at byte 0 (expected P2 or P5)");
  }
  const bool binary = bytes[1] == '5';
  PgmReader rd(bytes);
  rd.advance(2);
  const long width = rd.read_uint("width");
  const long height = rd.read_uint("height");
  const std::size_t maxval_at = rd.pos();
  const long maxval = rd.read_uint("maxval");
  if (maxval != 255) {
    throw ParseError("graymap: maxval must be 255 at byte " + std::to_string(maxval_at));
  }
  if (width <= 0 || height <= 0) throw SizeError("graymap: empty dimensions");

  Raster<std::uint8_t> image(height, width);
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (binary) {
    if (rd.pos() >= rd.size() || !std::isspace(bytes[rd.pos()])) {
      throw ParseError("graymap: expected whitespace after maxval at byte " + std::to_string(rd.pos()));
    }
    rd.advance(1);
    const std::size_t available = rd.size() - rd.pos();
    if (available != expected) {
      throw SizeError("graymap: header says " + std::to_string(width) + "x" + std::to_string(height) + " (" +
                      std::to_string(expected) + " bytes) but " + std::to_string(available) +
                      " data bytes follow");
    }
    std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(rd.pos()), bytes.end(), image.data());
  } else {
    std::size_t count = 0;
    while (true) {
      rd.skip_space_and_comments();
      if (rd.pos() >= rd.size()) break;
      const long v = rd.read_uint("sample");
      if (v > 255) throw ParseError("graymap: sample exceeds maxval before byte " + std::to_string(rd.pos()));
      if (count >= expected) {
        throw SizeError("graymap: more than " + std::to_string(expected) + " samples");
      }
      image.data()[count++] = static_cast<std::uint8_t>(v);
    }
    if (count != expected) {
      throw SizeError("graymap: expected " + std::to_string(expected) + " samples, found " + std::to_string(count));
    }
  }
  return image;
}

Raster<std::uint8_t> read_pgm(const std::filesystem::path& path) { return parse_pgm(read_file_bytes(path)); }

std::vector<std::uint8_t> encode_pgm(const Raster<std::uint8_t>& image) {
  const std::string header =
      "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.data(), image.data() + image.size());
  return out;
}

void write_pgm(const std::filesystem::path& path, const Raster<std::uint8_t>& image) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::filesystem::path sidecar_path(const std::filesystem::path& pgm) {
  auto p = pgm;
  p.replace_extension(".meta");
  return p;
}

const std::string* KeyValueFile::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  double out = 0.0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
    throw ParseError("key '" + key + "': not a number: '" + *v + "'");
  }
  return out;
}

long KeyValueFile::get_int(const std::string& key, long fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  long out = 0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
    throw ParseError("key '" + key + "': not an integer: '" + *v + "'");
  }
  return out;
}

KeyValueFile parse_key_values(const std::string& text, const std::string& source) {
  KeyValueFile kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'key: value'");
    }
    kv.entries.emplace_back(trim(line.substr(0, colon)), trim(line.substr(colon + 1)));
  }
  return kv;
}

KeyValueFile read_key_values(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_key_values(std::string(bytes.begin(), bytes.end()), path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

OccupancyGrid load_grid(const std::filesystem::path& path) {
  OccupancyGrid g;
  g.cells = read_pgm(path);
  const auto meta = sidecar_path(path);
  if (std::filesystem::exists(meta)) {
    const auto kv = read_key_values(meta);
    g.resolution = kv.get_double("resolution", kDefaultResolution);
    g.origin.x() = kv.get_double("origin_x", 0.0);
    g.origin.y() = kv.get_double("origin_y", 0.0);
    g.occupied_thresh = kv.get_double("occupied_thresh", g.occupied_thresh);
    g.free_thresh = kv.get_double("free_thresh", g.free_thresh);
    if (!(g.resolution > 0.0)) throw ParseError(meta.string() + ": resolution must be > 0");
  }
  return g;
}

void save_grid(const std::filesystem::path& path, const OccupancyGrid& grid) {
  write_pgm(path, grid.cells);
  std::ofstream out(sidecar_path(path));
  if (!out) throw InputError("cannot write " + sidecar_path(path).string());
  out << "resolution: " << format_double(grid.resolution) << "\n"
      << "origin_x: " << format_double(grid.origin.x()) << "\n"
      << "origin_y: " << format_double(grid.origin.y()) << "\n"
      << "occupied_thresh: " << format_double(grid.occupied_thresh) << "\n"
      << "free_thresh: " << format_double(grid.free_thresh) << "\n";
}

}  // namespace topomap
