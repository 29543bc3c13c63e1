#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vinesim/common.hpp"
#include "vinesim/scene.hpp"

namespace vinesim {

/// Minimal deterministic SVG writer for scenes, vine trajectories and
/// heatmaps. Pure view code: consumes already-computed geometry.
class SvgCanvas {
 public:
  SvgCanvas(Bounds world, double pixels_per_meter = 400.0)
      : world_(world), ppm_(pixels_per_meter) {
    width_ = (world.hi.x - world.lo.x) * ppm_;
    height_ = (world.hi.y - world.lo.y) * ppm_;
  }

  void add_rect_world(Vec2 lo, Vec2 hi, const std::string& fill) {
    body_ << "<rect x=\"" << sx(lo.x) << "\" y=\"" << sy(hi.y) << "\" width=\""
          << (hi.x - lo.x) * ppm_ << "\" height=\"" << (hi.y - lo.y) * ppm_
          << "\" fill=\"" << fill << "\"/>\n";
  }

  void add_circle(Vec2 c, double r, const std::string& fill,
                  const std::string& extra = "") {
    body_ << "<circle cx=\"" << sx(c.x) << "\" cy=\"" << sy(c.y) << "\" r=\"" << r * ppm_
          << "\" fill=\"" << fill << "\"" << (extra.empty() ? "" : " " + extra) << "/>\n";
  }

  void add_polygon(const std::vector<Vec2>& pts, const std::string& fill) {
    body_ << "<polygon points=\"";
    for (auto& p : pts) body_ << sx(p.x) << "," << sy(p.y) << " ";
    body_ << "\" fill=\"" << fill << "\"/>\n";
  }

  void add_polyline(const std::vector<Vec2>& pts, const std::string& stroke,
                    double width_m) {
    if (pts.size() < 2) return;
    body_ << "<polyline points=\"";
    for (auto& p : pts) body_ << sx(p.x) << "," << sy(p.y) << " ";
    body_ << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << width_m * ppm_ << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\""
          << " opacity=\"0.9\"/>\n";
  }

  void add_label(Vec2 at, const std::string& text, int px = 14) {
    body_ << "<text x=\"" << sx(at.x) << "\" y=\"" << sy(at.y) << "\" font-size=\"" << px
          << "\" font-family=\"sans-serif\">" << text << "</text>\n";
  }

  void add_scene(const Scene& sc) {
    add_rect_world(sc.bounds.lo, sc.bounds.hi, "#f8f8f6");
    for (auto& ob : sc.obstacles) {
      if (auto* c = std::get_if<Circle>(&ob.shape)) {
        add_circle(c->center, c->radius, "#5b6470");
      } else {
        add_polygon(std::get<ConvexPolygon>(ob.shape).vertices, "#5b6470");
      }
    }
    add_circle(sc.goal.center, sc.goal.radius, "#8fd18f", "opacity=\"0.55\"");
    add_circle(sc.start.position(), 0.012 * (world_.hi - world_.lo).norm(), "#333333");
  }

  std::string str() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
       << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    os << body_.str();
    os << "</svg>\n";
    return os.str();
  }

  void save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write svg: " + path);
    f << str();
  }

 private:
  double sx(double x) const { return (x - world_.lo.x) * ppm_; }
  double sy(double y) const { return height_ - (y - world_.lo.y) * ppm_; }

  Bounds world_;
  double ppm_;
  double width_ = 0, height_ = 0;
  std::ostringstream body_;
};

/// 2D success-rate heatmap (robustness grids).
inline std::string heatmap_svg(const std::vector<std::vector<double>>& rates,
                               const std::string& x_label, const std::string& y_label) {
  size_t ny = rates.size();
  size_t nx = ny ? rates[0].size() : 0;
  const double cell = 64, margin = 70;
  double w = margin + nx * cell + 20, h = margin + ny * cell + 20;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  for (size_t j = 0; j < ny; ++j) {
    for (size_t i = 0; i < nx; ++i) {
      double r = rates[j][i];
      int red = int(235 - 155 * r);
      int green = int(80 + 155 * r);
      os << "<rect x=\"" << margin + i * cell << "\" y=\"" << 10 + (ny - 1 - j) * cell
         << "\" width=\"" << cell - 2 << "\" height=\"" << cell - 2 << "\" fill=\"rgb("
         << red << "," << green << ",90)\"/>\n";
      char txt[16];
      std::snprintf(txt, sizeof txt, "%.2f", r);
      os << "<text x=\"" << margin + i * cell + 10 << "\" y=\""
         << 10 + (ny - 1 - j) * cell + cell / 2 << "\" font-size=\"14\" "
         << "font-family=\"sans-serif\">" << txt << "</text>\n";
    }
  }
  os << "<text x=\"" << margin + nx * cell / 2 - 40 << "\" y=\"" << h - 18
     << "\" font-size=\"14\" font-family=\"sans-serif\">" << x_label << "</text>\n";
  os << "<text x=\"14\" y=\"" << 10 + ny * cell / 2
     << "\" font-size=\"14\" font-family=\"sans-serif\" transform=\"rotate(-90 14 "
     << 10 + ny * cell / 2 << ")\">" << y_label << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace vinesim
