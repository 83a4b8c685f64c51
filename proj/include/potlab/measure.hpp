#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "potlab/geometry.hpp"

namespace potlab {

struct Atom {
  Point2 at;
  double mass = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Uniform grid of cell masses over `rect`; each cell's mass is spread
/// uniformly over the cell. Cells are row-major: cells[iy * nx + ix].
struct DensityGrid {
  Rect rect;
  int nx = 0;
  int ny = 0;
  std::vector<double> cells;

  double cell_width() const { return rect.width() / nx; }
  double cell_height() const { return rect.height() / ny; }
  double cell_area() const { return cell_width() * cell_height(); }
  Rect cell_rect(int ix, int iy) const;
  double at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * nx + ix]; }
  double total() const;
  bool empty() const { return nx == 0 || ny == 0; }
};

/// Lelong numbers of a measure: the atom masses, merged by location.
using LelongSpectrum = std::map<Point2, double>;

/// Finite positive measure: point atoms plus a piecewise-constant density.
///
/// The density may be restricted to a window rectangle; the effective
/// density is then the grid density times the indicator of the window. This
/// is how sub-measures produced by cutting a measure along lines are
/// represented without resampling the grid. The grid is shared and immutable.
class PlanarMeasure {
 public:
  PlanarMeasure() = default;
  PlanarMeasure(std::vector<Atom> atoms, std::optional<DensityGrid> density,
                std::optional<Rect> bounding = std::nullopt);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool has_density() const { return grid_ != nullptr; }
  const DensityGrid& grid() const { return *grid_; }
  std::shared_ptr<const DensityGrid> grid_ptr() const { return grid_; }
  const std::optional<Rect>& window() const { return window_; }
  const Rect& bounding() const { return bounding_; }

  double atom_mass() const;
  double density_mass() const;
  double total_mass() const { return atom_mass() + density_mass(); }

  /// Effective mass carried by cell (ix, iy) after the window restriction.
  double cell_mass(int ix, int iy) const;

  double mass_on(const Rect& region) const;
  double mass_on(const Disc& region) const;

  /// Visit every cell with positive effective mass: the part of the cell
  /// inside the window, the grid density there and the effective mass.
  void for_each_density_piece(
      const std::function<void(int ix, int iy, const Rect& piece, double rho, double mass)>& fn)
      const;

  /// Smallest rectangle containing every atom and every positive density piece.
  std::optional<Rect> support_bbox() const;

  /// ∫ log|z − ζ| dμ(ζ); −∞ exactly at atoms.
  double log_potential(Point2 z) const;
  double log_potential_atoms(Point2 z) const;
  double log_potential_density(Point2 z) const;

  // Builders returning new measures.
  PlanarMeasure with_window(const Rect& w) const;
  PlanarMeasure with_atoms(std::vector<Atom> atoms) const;
  PlanarMeasure without_atoms() const { return with_atoms({}); }

  /// Corner weights of the density potential. Only meaningful without a window.
  const std::vector<double>& node_weights() const;

 private:
  std::vector<Atom> atoms_;
  std::shared_ptr<const DensityGrid> grid_;
  std::optional<Rect> window_;
  Rect bounding_;
  std::shared_ptr<const std::vector<double>> nodes_;

  friend PlanarMeasure scale(const PlanarMeasure&, double);
  void rebuild_nodes();
};

LelongSpectrum lelong_spectrum(const PlanarMeasure& m);

/// Multiply every atom and cell mass by c > 0.
PlanarMeasure scale(const PlanarMeasure& m, double c);

struct IntegerPart {
  Point2 at;
  long k = 0;
};

struct AtomSplit {
  PlanarMeasure stripped;
  std::vector<IntegerPart> carried;
};

/// Peel ⌊mass⌋ off every atom of mass ≥ 1. Atom masses within `snap` of an
/// integer are treated as that integer.
AtomSplit split_atom_integer_parts(const PlanarMeasure& m, double snap = 0.0);

/// ∫∫_{[0,u]×[0,v]} log(s² + t²) ds dt, the corner primitive of the
/// logarithmic kernel. Odd in each argument.
double log_kernel_primitive(double u, double v);

/// ∫_R log|z − ζ| dA(ζ) over a rectangle.
double rect_log_integral(const Rect& r, Point2 z);

}  // namespace potlab
