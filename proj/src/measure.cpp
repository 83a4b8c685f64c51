#include "potlab/measure.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "potlab/errors.hpp"

namespace potlab {

Rect DensityGrid::cell_rect(int ix, int iy) const {
  const double w = cell_width();
  const double h = cell_height();
  // endpoints computed from the index, so neighbouring cells share edges exactly
  const double x0 = ix == 0 ? rect.x_min : rect.x_min + ix * w;
  const double x1 = ix + 1 == nx ? rect.x_max : rect.x_min + (ix + 1) * w;
  const double y0 = iy == 0 ? rect.y_min : rect.y_min + iy * h;
  const double y1 = iy + 1 == ny ? rect.y_max : rect.y_min + (iy + 1) * h;
  return {x0, x1, y0, y1};
}

double DensityGrid::total() const { return std::accumulate(cells.begin(), cells.end(), 0.0); }

PlanarMeasure::PlanarMeasure(std::vector<Atom> atoms, std::optional<DensityGrid> density,
                             std::optional<Rect> bounding)
    : atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (!(a.mass > 0.0) || !std::isfinite(a.mass) || !std::isfinite(a.at.x) ||
        !std::isfinite(a.at.y))
      throw DomainError("atom mass must be positive and finite");
  }
  if (density && !density->empty()) {
    if (density->nx < 0 || density->ny < 0 ||
        density->cells.size() != static_cast<std::size_t>(density->nx) * density->ny)
      throw DomainError("density cell count does not match nx*ny");
    if (density->rect.degenerate()) throw DomainError("density rectangle must have positive area");
    for (double c : density->cells)
      if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("cell masses must be nonnegative");
    grid_ = std::make_shared<const DensityGrid>(std::move(*density));
  }
  if (bounding) {
    bounding_ = *bounding;
  } else {
    auto box = grid_ ? std::optional<Rect>(grid_->rect) : std::nullopt;
    for (const auto& a : atoms_) box = box ? hull(*box, Rect::point(a.at)) : Rect::point(a.at);
    bounding_ = box.value_or(Rect{});
  }
  for (const auto& a : atoms_)
    if (!bounding_.contains(a.at)) throw DomainError("atom lies outside the bounding rectangle");
  rebuild_nodes();
}

void PlanarMeasure::rebuild_nodes() {
  nodes_.reset();
  if (!grid_ || window_) return;
  const auto& g = *grid_;
  const double inv_area = 1.0 / g.cell_area();
  auto rho = [&](int ix, int iy) {
    if (ix < 0 || iy < 0 || ix >= g.nx || iy >= g.ny) return 0.0;
    return g.at(ix, iy) * inv_area;
  };
  auto w = std::make_shared<std::vector<double>>(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      (*w)[static_cast<std::size_t>(j) * (g.nx + 1) + i] =
          rho(i - 1, j - 1) - rho(i, j - 1) - rho(i - 1, j) + rho(i, j);
  nodes_ = std::move(w);
}

const std::vector<double>& PlanarMeasure::node_weights() const {
  static const std::vector<double> none;
  return nodes_ ? *nodes_ : none;
}

double PlanarMeasure::atom_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

double PlanarMeasure::cell_mass(int ix, int iy) const {
  const double m = grid_->at(ix, iy);
  if (!window_ || m == 0.0) return m;
  const Rect c = grid_->cell_rect(ix, iy);
  if (window_->contains(c)) return m;
  return m * overlap_area(c, *window_) / c.area();
}

double PlanarMeasure::density_mass() const {
  if (!grid_) return 0.0;
  if (!window_) return grid_->total();
  double s = 0.0;
  for_each_density_piece([&](int, int, const Rect&, double, double mass) { s += mass; });
  return s;
}

void PlanarMeasure::for_each_density_piece(
    const std::function<void(int, int, const Rect&, double, double)>& fn) const {
  if (!grid_) return;
  const auto& g = *grid_;
  const double area = g.cell_area();
  int ix0 = 0, ix1 = g.nx - 1, iy0 = 0, iy1 = g.ny - 1;
  if (window_) {
    if (window_->degenerate()) return;
    ix0 = std::max(0, static_cast<int>(std::floor((window_->x_min - g.rect.x_min) / g.cell_width())) - 1);
    ix1 = std::min(g.nx - 1, static_cast<int>(std::floor((window_->x_max - g.rect.x_min) / g.cell_width())) + 1);
    iy0 = std::max(0, static_cast<int>(std::floor((window_->y_min - g.rect.y_min) / g.cell_height())) - 1);
    iy1 = std::min(g.ny - 1, static_cast<int>(std::floor((window_->y_max - g.rect.y_min) / g.cell_height())) + 1);
  }
  for (int iy = iy0; iy <= iy1; ++iy)
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double m = g.at(ix, iy);
      if (m <= 0.0) continue;
      const double rho = m / area;
      Rect c = g.cell_rect(ix, iy);
      if (window_) {
        if (!interiors_overlap(c, *window_)) continue;
        if (!window_->contains(c)) {
          c = *intersect(c, *window_);
          fn(ix, iy, c, rho, m * c.area() / area);
          continue;
        }
      }
      fn(ix, iy, c, rho, m);
    }
}

double PlanarMeasure::mass_on(const Rect& region) const {
  double s = 0.0;
  for (const auto& a : atoms_)
    if (region.contains(a.at)) s += a.mass;
  if (grid_ && !region.degenerate()) {
    for_each_density_piece([&](int, int, const Rect& piece, double rho, double mass) {
      if (region.contains(piece))
        s += mass;
      else
        s += rho * overlap_area(piece, region);
    });
  }
  return s;
}

double PlanarMeasure::mass_on(const Disc& region) const {
  double s = 0.0;
  for (const auto& a : atoms_)
    if (region.contains(a.at)) s += a.mass;
  if (grid_) {
    const Rect box = region.bounding_square();
    for_each_density_piece([&](int, int, const Rect& piece, double rho, double) {
      if (!interiors_overlap(piece, box)) return;
      s += rho * rect_disc_area(piece, region);
    });
  }
  return s;
}

std::optional<Rect> PlanarMeasure::support_bbox() const {
  std::optional<Rect> box;
  for (const auto& a : atoms_) box = box ? hull(*box, Rect::point(a.at)) : Rect::point(a.at);
  for_each_density_piece([&](int, int, const Rect& piece, double, double) {
    box = box ? hull(*box, piece) : piece;
  });
  return box;
}

double log_kernel_primitive(double u, double v) {
  if (u == 0.0 || v == 0.0) return 0.0;
  const double r2 = u * u + v * v;
  return u * v * (std::log(r2) - 3.0) + u * u * std::atan(v / u) + v * v * std::atan(u / v);
}

double rect_log_integral(const Rect& r, Point2 z) {
  const double x0 = r.x_min - z.x, x1 = r.x_max - z.x;
  const double y0 = r.y_min - z.y, y1 = r.y_max - z.y;
  return 0.5 * (log_kernel_primitive(x1, y1) - log_kernel_primitive(x0, y1) -
                log_kernel_primitive(x1, y0) + log_kernel_primitive(x0, y0));
}

double PlanarMeasure::log_potential_atoms(Point2 z) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    const double d = distance(z, a.at);
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    s += a.mass * std::log(d);
  }
  return s;
}

double PlanarMeasure::log_potential_density(Point2 z) const {
  if (!grid_) return 0.0;
  if (nodes_) {
    const auto& g = *grid_;
    const auto& w = *nodes_;
    const double cw = g.cell_width(), ch = g.cell_height();
    double s = 0.0;
    for (int j = 0; j <= g.ny; ++j) {
      const double v = (j == g.ny ? g.rect.y_max : g.rect.y_min + j * ch) - z.y;
      const double* row = w.data() + static_cast<std::size_t>(j) * (g.nx + 1);
      for (int i = 0; i <= g.nx; ++i) {
        if (row[i] == 0.0) continue;
        const double u = (i == g.nx ? g.rect.x_max : g.rect.x_min + i * cw) - z.x;
        s += row[i] * log_kernel_primitive(u, v);
      }
    }
    return 0.5 * s;
  }
  double s = 0.0;
  for_each_density_piece([&](int, int, const Rect& piece, double rho, double) {
    s += rho * rect_log_integral(piece, z);
  });
  return s;
}

double PlanarMeasure::log_potential(Point2 z) const {
  const double a = log_potential_atoms(z);
  if (std::isinf(a)) return a;
  return a + log_potential_density(z);
}

PlanarMeasure PlanarMeasure::with_window(const Rect& w) const {
  PlanarMeasure out = *this;
  out.window_ = out.window_ ? intersect(*out.window_, w).value_or(Rect::point(w.centre())) : w;
  out.rebuild_nodes();
  return out;
}

PlanarMeasure PlanarMeasure::with_atoms(std::vector<Atom> atoms) const {
  PlanarMeasure out = *this;
  out.atoms_ = std::move(atoms);
  return out;
}

LelongSpectrum lelong_spectrum(const PlanarMeasure& m) {
  LelongSpectrum s;
  for (const auto& a : m.atoms()) s[a.at] += a.mass;
  return s;
}

PlanarMeasure scale(const PlanarMeasure& m, double c) {
  if (!(c > 0.0)) throw DomainError("scale factor must be positive");
  PlanarMeasure out = m;
  for (auto& a : out.atoms_) a.mass *= c;
  if (m.grid_) {
    DensityGrid g = *m.grid_;
    for (auto& v : g.cells) v *= c;
    out.grid_ = std::make_shared<const DensityGrid>(std::move(g));
  }
  out.rebuild_nodes();
  return out;
}

AtomSplit split_atom_integer_parts(const PlanarMeasure& m, double snap) {
  AtomSplit out;
  std::vector<Atom> kept;
  for (const auto& a : m.atoms()) {
    double k = std::floor(a.mass);
    const double near = std::round(a.mass);
    if (std::abs(a.mass - near) <= snap) k = near;
    if (k >= 1.0) {
      out.carried.push_back({a.at, static_cast<long>(k)});
      const double rest = a.mass - k;
      if (rest > snap) kept.push_back({a.at, rest});
    } else {
      kept.push_back(a);
    }
  }
  out.stripped = m.with_atoms(std::move(kept));
  return out;
}

}  // namespace potlab
