#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>

namespace potlab {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path; `parallel` runs the same arithmetic under OpenMP and must produce
/// bitwise-identical results.
enum class Exec { serial, parallel };

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;

  std::complex<double> as_complex() const { return {x, y}; }
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Closed axis-aligned rectangle. Degenerate rectangles (segments, points)
/// are allowed.
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  friend bool operator==(const Rect&, const Rect&) = default;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Point2 centre() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  double longer_side() const { return std::max(width(), height()); }

  bool valid() const { return x_min <= x_max && y_min <= y_max; }
  bool degenerate() const { return !(width() > 0.0 && height() > 0.0); }

  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool contains_interior(Point2 p) const {
    return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max;
  }
  bool contains(const Rect& r) const {
    return r.x_min >= x_min && r.x_max <= x_max && r.y_min >= y_min && r.y_max <= y_max;
  }

  // longer side / shorter side; undefined for degenerate rectangles
  std::optional<double> aspect() const {
    if (degenerate()) return std::nullopt;
    return longer_side() / std::min(width(), height());
  }

  static Rect square(Point2 centre, double side) {
    const double h = 0.5 * side;
    return {centre.x - h, centre.x + h, centre.y - h, centre.y + h};
  }
  static Rect point(Point2 p) { return {p.x, p.x, p.y, p.y}; }
};

/// Intersection of two closed rectangles, empty if they do not meet.
std::optional<Rect> intersect(const Rect& a, const Rect& b);

/// Area of the intersection of the interiors (zero when they only touch).
double overlap_area(const Rect& a, const Rect& b);

/// True when the open interiors intersect.
bool interiors_overlap(const Rect& a, const Rect& b);

/// Smallest rectangle containing both.
Rect hull(const Rect& a, const Rect& b);

struct Disc {
  Point2 centre;
  double radius = 0.0;

  friend bool operator==(const Disc&, const Disc&) = default;

  bool contains(Point2 p) const { return distance(p, centre) <= radius; }
  double area() const { return M_PI * radius * radius; }
  Rect bounding_square() const { return Rect::square(centre, 2.0 * radius); }
};

/// Exact area of rect ∩ disc. The integrand of the strip integral is
/// piecewise one of {0, h, top - (-s), s - bottom, 2s} with s = sqrt(R^2 - x^2),
/// so splitting at its breakpoints lets every piece be integrated in closed form.
double rect_disc_area(const Rect& r, const Disc& d);

}  // namespace potlab
