#pragma once

#include <vector>

#include "potlab/atomizer.hpp"
#include "potlab/potential.hpp"
#include "potlab/quad.hpp"

namespace potlab {

struct StrippedPoint {
  Point2 at;
  long m_j = 0;     // max(⌊mν⌋, 1)
  double nu = 0.0;  // Lelong number of φ₀ at the point
};

/// ψ_m / m = φ₀ − Σ ⌊mν_j⌋/m log|z − a_j|: the weight after its large point
/// masses have been peeled off.
struct StrippedWeight {
  SubharmonicWeight base;
  long m = 0;
  double delta = 0.0;
  std::vector<StrippedPoint> stripped_points;
  PlanarMeasure residual;  // Riesz measure of ψ_m / m restricted to the square
};

/// Collect the atoms of the square P(x₀, 2r) with mν ≥ 1 − δ and remove their
/// integer parts ⌊mν⌋/m from the measure.
StrippedWeight strip(const SubharmonicWeight& w, long m, double delta);

/// Smallest integer N with (2/(2−δ))·mγ < N ≤ mγ(1+δ).
long choose_Nm(double m, double gamma, double delta);

struct NeutralPoint {
  Point2 at;
  long m_j = 0;
  double nu = 0.0;  // Lelong number of φ₀ at the point
};

struct NeutraliseOptions {
  double tol = 1e-5;       // target relative error of I_m
  double hard_tol = 1e-4;  // QuadratureFailure above this
  long budget = 10'000'000;
  Exec exec = Exec::parallel;
};

struct NeutralisationReport {
  long m = 0;
  double delta = 0.0;
  double gamma = 0.0;      // mass of P(x₀, 2r)
  double gamma_res = 0.0;  // residual mass of the square after stripping
  double gamma_disc = 0.0; // mass of D(x₀, r)
  long N_m = 0;
  std::vector<NeutralPoint> points;
  long stripped_count = 0;
  long sum_mj = 0;
  bool bound_i_ok = false;            // Σ m_j ≤ mγ(1+δ)
  double min_separation_small_nu = 0; // +inf when fewer than two such points
  long small_nu_count = 0;
  bool all_points_in_disc = false;
  double I_m = 0.0;
  double log_I_m = 0.0;
  double I_m_rel_error = 0.0;
  long evaluations = 0;
  bool atomiser_certified = true;
  double atomiser_f_ratio = 0.0;
};

/// The full pipeline for one m: strip, choose N_m, atomise the rescaled
/// residual, assemble f_m and integrate |f_m|² e^{−2mφ₀} over the disc.
NeutralisationReport neutralise(const SubharmonicWeight& w, long m, double delta,
                                const NeutraliseOptions& opts = {});

/// log(|f_m|² e^{−2mφ₀}) at z; the e^{m g₀} factor cancels against h₀.
double log_integrand(const SubharmonicWeight& w, long m, const std::vector<NeutralPoint>& pts, Point2 z);

/// Number of zeros of f_m inside the circle, from the winding of arg f_m.
long argument_principle_count(const SubharmonicWeight& w, long m, const std::vector<NeutralPoint>& pts,
                              const Disc& circle);

}  // namespace potlab
