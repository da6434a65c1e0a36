#pragma once

#include <string>
#include <vector>

#include "hull_lab/vec2.hpp"

namespace hull_lab::svg {

// Minimal SVG writer: world coordinates in, y-flipped pixel output.
class Canvas {
 public:
  Canvas(double x_min, double x_max, double y_min, double y_max, int width_px = 640);

  void rect(Vec2 center, double w, double h, const std::string& fill);
  void circle(Vec2 center, double radius_world, const std::string& fill);
  void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width_world);
  void polygon(const std::vector<Vec2>& pts, const std::string& fill, const std::string& stroke);
  void text(Vec2 at, const std::string& label, int font_px = 12);

  void write(const std::string& path) const;

 private:
  double sx(double x) const;
  double sy(double y) const;
  double scale_ = 1.0;
  double x_min_, x_max_, y_min_, y_max_;
  int wpx_, hpx_;
  std::vector<std::string> body_;
};

}  // namespace hull_lab::svg
