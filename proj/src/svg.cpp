#include "fractal_spectra/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fractal_spectra {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SvgCanvas::SvgCanvas(Vec2 lo, Vec2 hi, double width_px, double margin_px)
    : lo_(lo), width_px_(width_px), margin_px_(margin_px) {
  const double w = std::max(hi.x - lo.x, 1e-12);
  const double h = std::max(hi.y - lo.y, 1e-12);
  scale_ = (width_px - 2 * margin_px) / w;
  height_px_ = h * scale_ + 2 * margin_px;
}

Vec2 SvgCanvas::map(Vec2 p) const {
  return {margin_px_ + (p.x - lo_.x) * scale_,
          height_px_ - margin_px_ - (p.y - lo_.y) * scale_};
}

void SvgCanvas::polygon(std::span<const Vec2> pts, const std::string& fill,
                        const std::string& stroke, double stroke_px) {
  body_ << "<polygon points=\"";
  for (const Vec2& p : pts) {
    const Vec2 q = map(p);
    body_ << num(q.x) << ',' << num(q.y) << ' ';
  }
  body_ << "\" fill=\"" << fill << "\" stroke=\"" << stroke
        << "\" stroke-width=\"" << num(stroke_px) << "\"/>\n";
}

void SvgCanvas::polyline(std::span<const Vec2> pts, const std::string& stroke,
                         double stroke_px, const std::string& dash) {
  body_ << "<polyline fill=\"none\" points=\"";
  for (const Vec2& p : pts) {
    const Vec2 q = map(p);
    body_ << num(q.x) << ',' << num(q.y) << ' ';
  }
  body_ << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(stroke_px) << '"';
  if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << '"';
  body_ << "/>\n";
}

void SvgCanvas::line(Vec2 a, Vec2 b, const std::string& stroke, double stroke_px,
                     const std::string& dash) {
  const Vec2 p = map(a), q = map(b);
  body_ << "<line x1=\"" << num(p.x) << "\" y1=\"" << num(p.y) << "\" x2=\""
        << num(q.x) << "\" y2=\"" << num(q.y) << "\" stroke=\"" << stroke
        << "\" stroke-width=\"" << num(stroke_px) << '"';
  if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << '"';
  body_ << "/>\n";
}

void SvgCanvas::circle(Vec2 c, double r_px, const std::string& fill) {
  const Vec2 p = map(c);
  body_ << "<circle cx=\"" << num(p.x) << "\" cy=\"" << num(p.y) << "\" r=\""
        << num(r_px) << "\" fill=\"" << fill << "\"/>\n";
}

void SvgCanvas::text(Vec2 at, const std::string& s, double size_px,
                     const std::string& anchor) {
  const Vec2 p = map(at);
  body_ << "<text x=\"" << num(p.x) << "\" y=\"" << num(p.y)
        << "\" font-family=\"sans-serif\" font-size=\"" << num(size_px)
        << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
}

void SvgCanvas::write(std::ostream& os) const {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_px_)
     << "\" height=\"" << num(height_px_) << "\" viewBox=\"0 0 " << num(width_px_)
     << ' ' << num(height_px_) << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << body_.str() << "</svg>\n";
}

std::pair<Vec2, Vec2> bounding_box(std::span<const Vec2> pts) {
  Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 hi{-lo.x, -lo.y};
  for (const Vec2& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  if (pts.empty()) return {{0, 0}, {1, 1}};
  if (hi.x - lo.x < 1e-12) hi.x = lo.x + 1;
  if (hi.y - lo.y < 1e-12) hi.y = lo.y + 1;
  return {lo, hi};
}

std::string diverging_color(double t) {
  t = std::clamp(t, -1.0, 1.0);
  int r, g, b;
  if (t < 0) {
    r = static_cast<int>(255 * (1 + t));
    g = static_cast<int>(255 * (1 + t));
    b = 255;
  } else {
    r = 255;
    g = static_cast<int>(255 * (1 - t));
    b = static_cast<int>(255 * (1 - t));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

void write_line_plot(std::ostream& os, const std::string& title,
                     const std::string& xlabel, const std::vector<PlotSeries>& series) {
  std::vector<Vec2> all;
  for (const auto& s : series) all.insert(all.end(), s.points.begin(), s.points.end());
  auto [lo, hi] = bounding_box(all);
  const double aspect = 0.6;
  // Plot in a normalized box so both axes get sensible extents.
  auto to_box = [&](Vec2 p) {
    return Vec2{(p.x - lo.x) / (hi.x - lo.x), aspect * (p.y - lo.y) / (hi.y - lo.y)};
  };
  SvgCanvas c({-0.12, -0.12}, {1.3, aspect + 0.1}, 900);
  c.line({0, 0}, {1, 0}, "#000");
  c.line({0, 0}, {0, aspect}, "#000");
  for (int i = 0; i <= 4; ++i) {
    const double fx = i / 4.0;
    c.text({fx, -0.05}, num(lo.x + fx * (hi.x - lo.x)), 11);
    c.text({-0.02, fx * aspect - 0.01}, num(lo.y + fx * (hi.y - lo.y)), 11, "end");
  }
  if (lo.y < 0 && hi.y > 0) c.line(to_box({lo.x, 0}), to_box({hi.x, 0}), "#999", 0.5, "4,3");
  c.text({0.5, -0.1}, xlabel, 13);
  c.text({0.5, aspect + 0.05}, title, 15);
  double legend_y = aspect;
  for (const auto& s : series) {
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (s.steps && i > 0) pts.push_back(to_box({s.points[i].x, s.points[i - 1].y}));
      pts.push_back(to_box(s.points[i]));
    }
    c.polyline(pts, s.color, 1.2);
    c.line({1.04, legend_y}, {1.09, legend_y}, s.color, 2);
    c.text({1.1, legend_y - 0.01}, s.label, 12, "start");
    legend_y -= 0.05;
  }
  c.write(os);
}

void write_bar_chart(std::ostream& os, const std::string& title,
                     const std::vector<std::string>& labels,
                     const std::vector<double>& values) {
  double vmax = 0;
  for (double v : values) vmax = std::max(vmax, v);
  if (vmax <= 0) vmax = 1;
  const double n = static_cast<double>(std::max<std::size_t>(values.size(), 1));
  SvgCanvas c({-0.1, -0.15}, {1.05, 0.75}, 600);
  c.line({0, 0}, {1, 0}, "#000");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x0 = (i + 0.15) / n, x1 = (i + 0.85) / n, h = 0.6 * values[i] / vmax;
    const Vec2 box[4] = {{x0, 0}, {x1, 0}, {x1, h}, {x0, h}};
    c.polygon(box, "#4a78b5", "#223");
    c.text({(x0 + x1) / 2, -0.06}, labels[i], 12);
    c.text({(x0 + x1) / 2, h + 0.02}, num(values[i]), 11);
  }
  c.text({0.5, 0.7}, title, 14);
  c.write(os);
}

}  // namespace fractal_spectra
