#pragma once

#include <string>
#include <vector>

#include "potlab/measure.hpp"

namespace potlab {

struct AtomPiece {
  int index = 0;
  Rect container;  // almost square R_j (degenerate for point pieces)
  Rect support;    // bounding rectangle of Supp μ_j
  PlanarMeasure piece;
  Point2 centre;
};

struct CertificateReport {
  // (a) unit masses and exact reconstruction
  bool a_pass = false;
  double a_max_mass_deviation = 0.0;  // max |μ_j(ℂ) − 1|
  double a_max_cell_deviation = 0.0;  // relative, cell by cell
  double a_max_atom_deviation = 0.0;  // relative, atom by atom
  // (b) containment and cover
  bool b_pass = false;
  bool b_containers_in_square = false;
  bool b_supports_in_containers = false;
  bool b_support_covered = false;
  double b_cover_fraction = 0.0;  // area of ∪ containers / area of square (informational)
  // (c) support interiors disjoint
  bool c_pass = false;
  long c_overlapping_pairs = 0;
  // (d) almost squares
  bool d_pass = false;
  double d_max_aspect = 1.0;
  // (e) overlap multiplicity of container interiors
  bool e_pass = false;
  int e_max_multiplicity = 0;
  // (f) centre separation, empirical
  bool f_pass = false;
  double f_min_distance = 0.0;
  double f_ratio = 0.0;  // d_min · N² / side
  bool f_degenerate_coincident = false;

  bool certified() const { return a_pass && b_pass && c_pass && d_pass && e_pass; }
};

struct AtomisationResult {
  std::vector<AtomPiece> pieces;
  Rect source_square;
  long N = 0;
  long cuts = 0;    // recursive cuts performed
  long peeled = 0;  // unit pieces split off integer atom parts
  PlanarMeasure source;
  CertificateReport certificates;
};

struct AtomiseOptions {
  bool allow_atom_split = true;
  double integer_tolerance = 1e-9;
  Exec exec = Exec::parallel;
};

struct SubProblem {
  PlanarMeasure mu;
  Rect container;
  long N = 0;
};

struct CutResult {
  SubProblem left;
  SubProblem right;
  int axis = 0;  // 0: cut by a vertical line x = t, 1: by a horizontal line y = t
  double t = 0.0;
  long k = 0;
  bool split_atom = false;
};

/// One bisection step: cut perpendicular to the container's longer side so the
/// left/lower part carries integer mass ⌊N/2⌋; the other axis is used when the
/// preferred cut leaves a support of aspect above 3 and the other one does better.
CutResult recursive_cut(const PlanarMeasure& mu, const Rect& container, long N,
                        const AtomiseOptions& opts = {});

/// Decompose a measure of integer mass N on a square into N unit pieces.
AtomisationResult atomise(const PlanarMeasure& mu, const Rect& square, const AtomiseOptions& opts = {});

CertificateReport verify_certificates(const AtomisationResult& r, Exec exec = Exec::parallel);

/// Max number of container interiors containing a common point, by a
/// column sweep over the arrangement of container edges.
int overlap_multiplicity(const std::vector<Rect>& rects, Exec exec = Exec::parallel,
                         double* union_area = nullptr);

/// Smallest almost square containing `support` inside `parent`, grown along the
/// short axis; the growth stays inside `cell` (the support's side of the last
/// cut) whenever `cell` is wide enough.
Rect grow_container(const Rect& support, const Rect& parent);
Rect grow_container(const Rect& support, const Rect& parent, const Rect& cell);

}  // namespace potlab
