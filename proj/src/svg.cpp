#include "hull_lab/svg.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hull_lab/errors.hpp"

namespace hull_lab::svg {

Canvas::Canvas(double x_min, double x_max, double y_min, double y_max, int width_px)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), wpx_(width_px) {
  scale_ = wpx_ / (x_max_ - x_min_);
  hpx_ = static_cast<int>(std::lround((y_max_ - y_min_) * scale_));
}

double Canvas::sx(double x) const { return (x - x_min_) * scale_; }
double Canvas::sy(double y) const { return (y_max_ - y) * scale_; }

void Canvas::rect(Vec2 c, double w, double h, const std::string& fill) {
  std::ostringstream os;
  os << "<rect x=\"" << sx(c.x - w / 2) << "\" y=\"" << sy(c.y + h / 2) << "\" width=\""
     << w * scale_ << "\" height=\"" << h * scale_ << "\" fill=\"" << fill << "\"/>";
  body_.push_back(os.str());
}

void Canvas::circle(Vec2 c, double r, const std::string& fill) {
  std::ostringstream os;
  os << "<circle cx=\"" << sx(c.x) << "\" cy=\"" << sy(c.y) << "\" r=\"" << r * scale_
     << "\" fill=\"" << fill << "\"/>";
  body_.push_back(os.str());
}

void Canvas::polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width) {
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width * scale_
     << "\" points=\"";
  for (const Vec2& p : pts) os << sx(p.x) << "," << sy(p.y) << " ";
  os << "\"/>";
  body_.push_back(os.str());
}

void Canvas::polygon(const std::vector<Vec2>& pts, const std::string& fill,
                     const std::string& stroke) {
  std::ostringstream os;
  os << "<polygon fill=\"" << fill << "\" stroke=\"" << stroke << "\" points=\"";
  for (const Vec2& p : pts) os << sx(p.x) << "," << sy(p.y) << " ";
  os << "\"/>";
  body_.push_back(os.str());
}

void Canvas::text(Vec2 at, const std::string& label, int font_px) {
  std::ostringstream os;
  os << "<text x=\"" << sx(at.x) << "\" y=\"" << sy(at.y) << "\" font-size=\"" << font_px
     << "\" font-family=\"sans-serif\">" << label << "</text>";
  body_.push_back(os.str());
}

void Canvas::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open SVG output file: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << wpx_ << "\" height=\"" << hpx_
      << "\" viewBox=\"0 0 " << wpx_ << " " << hpx_ << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& e : body_) out << e << "\n";
  out << "</svg>\n";
}

}  // namespace hull_lab::svg
