#include "potlab/geometry.hpp"

#include <vector>

namespace potlab {

std::optional<Rect> intersect(const Rect& a, const Rect& b) {
  Rect r{std::max(a.x_min, b.x_min), std::min(a.x_max, b.x_max), std::max(a.y_min, b.y_min),
         std::min(a.y_max, b.y_max)};
  if (!r.valid()) return std::nullopt;
  return r;
}

double overlap_area(const Rect& a, const Rect& b) {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

bool interiors_overlap(const Rect& a, const Rect& b) {
  return std::max(a.x_min, b.x_min) < std::min(a.x_max, b.x_max) &&
         std::max(a.y_min, b.y_min) < std::min(a.y_max, b.y_max);
}

Rect hull(const Rect& a, const Rect& b) {
  return {std::min(a.x_min, b.x_min), std::max(a.x_max, b.x_max), std::min(a.y_min, b.y_min),
          std::max(a.y_max, b.y_max)};
}

namespace {

// antiderivative of sqrt(R^2 - x^2)
double circle_primitive(double x, double R) {
  const double t = std::clamp(x / R, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, R * R - x * x));
  return 0.5 * (x * s + R * R * std::asin(t));
}

}  // namespace

double rect_disc_area(const Rect& rect, const Disc& d) {
  const double R = d.radius;
  if (R <= 0.0 || rect.degenerate()) return 0.0;
  // work in coordinates centred at the disc
  const double x0 = std::max(rect.x_min - d.centre.x, -R);
  const double x1 = std::min(rect.x_max - d.centre.x, R);
  const double y0 = rect.y_min - d.centre.y;
  const double y1 = rect.y_max - d.centre.y;
  if (x0 >= x1 || y0 >= R || y1 <= -R) return 0.0;

  std::vector<double> cuts{x0, x1};
  for (double y : {y0, y1}) {
    if (std::abs(y) < R) {
      const double c = std::sqrt(R * R - y * y);
      for (double x : {-c, c})
        if (x > x0 && x < x1) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i];
    const double v = cuts[i + 1];
    if (v <= u) continue;
    const double mid = 0.5 * (u + v);
    const double s = std::sqrt(std::max(0.0, R * R - mid * mid));
    const bool top_is_line = y1 < s;
    const bool bottom_is_line = y0 > -s;
    const double top_mid = top_is_line ? y1 : s;
    const double bottom_mid = bottom_is_line ? y0 : -s;
    if (top_mid <= bottom_mid) continue;
    const double arc = circle_primitive(v, R) - circle_primitive(u, R);
    double piece = 0.0;
    piece += top_is_line ? y1 * (v - u) : arc;
    piece -= bottom_is_line ? y0 * (v - u) : -arc;
    area += piece;
  }
  return std::max(area, 0.0);
}

}  // namespace potlab
