#include "topomap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "topomap/grid_io.hpp"

namespace topomap {

namespace {

std::string num(double v) { return format_double(std::round(v * 100.0) / 100.0); }

std::string gray(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", v, v, v);
  return buf;
}

// Evenly spaced hues, fixed saturation and lightness.
std::string hue_color(int i, int n) {
  const double h = 360.0 * i / std::max(n, 1);
  const double c = 0.7, x = c * (1 - std::abs(std::fmod(h / 60.0, 2.0) - 1)), m = 0.15;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h / 60.0) % 6) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>((r + m) * 255), static_cast<int>((g + m) * 255),
                static_cast<int>((b + m) * 255));
  return buf;
}

void open_svg(std::ostringstream& os, double w, double h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
}

// Row-wise runs of equal value, one rect each.
void raster_rects(std::ostringstream& os, const Raster<std::uint8_t>& image, double s, double dx) {
  for (Eigen::Index y = 0; y < image.rows(); ++y) {
    Eigen::Index x = 0;
    while (x < image.cols()) {
      Eigen::Index e = x;
      while (e < image.cols() && image(y, e) == image(y, x)) ++e;
      os << "<rect x=\"" << num(dx + x * s) << "\" y=\"" << num(y * s) << "\" width=\"" << num((e - x) * s)
         << "\" height=\"" << num(s) << "\" fill=\"" << gray(image(y, x)) << "\"/>\n";
      x = e;
    }
  }
}

// Cell (x, y) is drawn centered at ((x + 0.5) s, (y + 0.5) s).
double px(double v, double s) { return (v + 0.5) * s; }

}  // namespace

std::string render_map_svg(const Raster<std::uint8_t>& image, const MapOverlay& overlay, double scale) {
  std::ostringstream os;
  open_svg(os, image.cols() * scale, image.rows() * scale);
  raster_rects(os, image, scale, 0.0);
  if (overlay.skeletal) {
    os << "<g fill=\"#1f77b4\">\n";
    const Mask& s = *overlay.skeletal;
    for (Eigen::Index y = 0; y < s.rows(); ++y) {
      for (Eigen::Index x = 0; x < s.cols(); ++x) {
        if (s(y, x)) {
          os << "<rect x=\"" << num(x * scale) << "\" y=\"" << num(y * scale) << "\" width=\"" << num(scale)
             << "\" height=\"" << num(scale) << "\"/>\n";
        }
      }
    }
    os << "</g>\n";
  }
  if (overlay.graph) {
    os << "<g fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"" << num(scale * 0.6) << "\">\n";
    for (const auto& e : overlay.graph->edges) {
      os << "<polyline points=\"";
      for (const auto& p : e.polyline) os << num(px(p.x, scale)) << ',' << num(px(p.y, scale)) << ' ';
      os << "\"/>\n";
    }
    os << "</g>\n";
    for (const auto& n : overlay.graph->nodes) {
      const char* fill = n.frontier ? "#d62728" : n.kind == NodeKind::Endpoint ? "#ff7f0e" : "#9467bd";
      os << "<circle cx=\"" << num(px(n.x, scale)) << "\" cy=\"" << num(px(n.y, scale)) << "\" r=\""
         << num(scale * 1.5) << "\" fill=\"" << fill << "\" stroke=\"" << (n.visited ? "#000000" : "none")
         << "\"/>\n";
    }
  }
  if (overlay.trajectory && !overlay.trajectory->empty()) {
    os << "<polyline fill=\"none\" stroke=\"#e377c2\" stroke-width=\"" << num(scale * 0.4) << "\" points=\"";
    for (const auto& p : *overlay.trajectory) os << num(px(p.x(), scale)) << ',' << num(px(p.y(), scale)) << ' ';
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_correspondence_svg(const MedialGraph& a, const MedialGraph& b, const Correspondence& c,
                                      double scale) {
  auto extent = [](const MedialGraph& g) {
    Point2d hi = Point2d::Zero();
    for (const auto& v : g.vertices) hi = hi.cwiseMax(Point2d(v.x + v.r, v.y + v.r));
    return hi;
  };
  const Point2d ea = extent(a), eb = extent(b);
  const double gap = 10.0;
  const double offset = ea.x() + gap;
  std::ostringstream os;
  open_svg(os, (offset + eb.x() + 1) * scale, (std::max(ea.y(), eb.y()) + 1) * scale);
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  auto draw = [&](const MedialGraph& g, double dx, const std::vector<std::string>& color) {
    os << "<g stroke=\"#bbbbbb\" stroke-width=\"" << num(scale * 0.3) << "\">\n";
    for (const auto& [i, j] : g.edges) {
      os << "<line x1=\"" << num(px(g.vertices[i].x + dx, scale)) << "\" y1=\"" << num(px(g.vertices[i].y, scale))
         << "\" x2=\"" << num(px(g.vertices[j].x + dx, scale)) << "\" y2=\"" << num(px(g.vertices[j].y, scale))
         << "\"/>\n";
    }
    os << "</g>\n";
    for (int i = 0; i < g.size(); ++i) {
      const auto& v = g.vertices[i];
      os << "<circle cx=\"" << num(px(v.x + dx, scale)) << "\" cy=\"" << num(px(v.y, scale)) << "\" r=\""
         << num(scale * (v.endpoint ? 1.6 : 0.9)) << "\" fill=\"" << color[i] << "\"/>\n";
    }
  };
  std::vector<std::string> ca(a.size(), "#cccccc"), cb(b.size(), "#cccccc");
  const int n = static_cast<int>(c.pairs.size());
  for (int k = 0; k < n; ++k) {
    ca[c.pairs[k].a] = cb[c.pairs[k].b] = hue_color(k, n);
  }
  draw(a, 0.0, ca);
  draw(b, offset, cb);
  os << "</svg>\n";
  return os.str();
}

}  // namespace topomap
