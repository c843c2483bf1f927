#pragma once

#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fractal_spectra/geometry.hpp"

namespace fractal_spectra {

// Minimal SVG canvas in world coordinates (y up).
class SvgCanvas {
 public:
  SvgCanvas(Vec2 lo, Vec2 hi, double width_px = 800.0, double margin_px = 20.0);

  void polygon(std::span<const Vec2> pts, const std::string& fill,
               const std::string& stroke = "#333", double stroke_px = 0.5);
  void polyline(std::span<const Vec2> pts, const std::string& stroke,
                double stroke_px = 1.0, const std::string& dash = "");
  void line(Vec2 a, Vec2 b, const std::string& stroke, double stroke_px = 1.0,
            const std::string& dash = "");
  void circle(Vec2 c, double r_px, const std::string& fill);
  void text(Vec2 at, const std::string& s, double size_px = 10.0,
            const std::string& anchor = "middle");

  void write(std::ostream& os) const;

 private:
  Vec2 map(Vec2 p) const;

  Vec2 lo_;
  double scale_;
  double width_px_, height_px_, margin_px_;
  std::ostringstream body_;
};

// Bounding box of a point cloud, padded when degenerate.
std::pair<Vec2, Vec2> bounding_box(std::span<const Vec2> pts);

// Diverging blue-white-red ramp on t in [-1, 1].
std::string diverging_color(double t);

struct PlotSeries {
  std::string label;
  std::vector<Vec2> points;
  std::string color;
  bool steps = false;  // draw as a right-continuous step function
};

// Line chart with axes and a legend.
void write_line_plot(std::ostream& os, const std::string& title,
                     const std::string& xlabel, const std::vector<PlotSeries>& series);

// Vertical bar chart of labelled counts.
void write_bar_chart(std::ostream& os, const std::string& title,
                     const std::vector<std::string>& labels,
                     const std::vector<double>& values);

}  // namespace fractal_spectra
