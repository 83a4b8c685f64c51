#pragma once

#include <complex>
#include <vector>

#include "potlab/measure.hpp"

namespace potlab {

/// φ₀(z) = ∫ log|z − ζ| dμ(ζ) + Re g₀(z) on a disc D(x₀, r), 0 < r < 1/2.
/// g₀ is a polynomial in the local coordinate z − x₀: g₀ = Σ c_k (z − x₀)^k.
struct SubharmonicWeight {
  PlanarMeasure riesz;
  std::vector<std::complex<double>> g0;
  Disc domain;

  /// Throws DomainError unless 0 < r < 1/2.
  void validate() const;

  std::complex<double> g0_at(Point2 z) const;
  double harmonic(Point2 z) const { return g0_at(z).real(); }
};

/// φ₀(z); −∞ exactly at atoms.
double eval_weight(const SubharmonicWeight& w, Point2 z);

struct JensenCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gamma = 0.0;
  bool pass = false;
};

/// e^{−2(φ₀ − h₀)(z)} ≤ (1/γ) ∫_D |ζ − z|^{−2γ} dμ(ζ), with γ the mass of the disc.
/// Needs the Riesz measure to be carried by the closed disc, so that φ₀ − h₀
/// is the potential of μ|_D.
JensenCheck jensen_bound_check(const SubharmonicWeight& w, Point2 z);

/// ∫_R |ζ − z|^{−2s} dA(ζ) over a rectangle, s < 1. Exact up to a smooth 1-D
/// quadrature in the angle.
double rect_power_integral(const Rect& r, Point2 z, double s);

}  // namespace potlab
