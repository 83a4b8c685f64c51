#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "potlab/potential.hpp"
#include "potlab/quad.hpp"

namespace potlab {

/// φ(z) = ν log|z − c| + s + aρ² − b√(−log max(ρ, ε)), ρ = |z − c| < 1.
/// Subharmonic for a, b ≥ 0; b > 0 with ε > 0 is a bounded cut-off of the
/// zero-Lelong exemplar −√(−log|z|).
struct RadialProfile {
  Point2 centre;
  double nu = 0.0;
  double shift = 0.0;
  double a = 0.0;
  double b = 0.0;
  double cutoff = 0.0;

  double h(double rho) const;  // the part without the pole
  double phi(Point2 z) const;
};

/// A weight as seen by the Bergman constructions: its values, its poles
/// (points of positive Lelong number) and, when available, a radial model.
struct BergmanWeight {
  std::function<double(Point2)> phi;
  std::vector<Atom> poles;
  std::optional<RadialProfile> radial;

  static BergmanWeight from_profile(const RadialProfile& p);
  static BergmanWeight from_subharmonic(const SubharmonicWeight& w);
};

/// How derivatives enter the kernel sums: `plain` sums |D^α σ|², `taylor`
/// sums |D^α σ / α!|².
enum class JetVariant { plain, taylor };

struct BasisOptions {
  double tol = 1e-11;  // relative quadrature tolerance for norms and Gram entries
  double max_condition = 1e8;
  Exec exec = Exec::parallel;
};

/// Orthonormal system of H_D(mφ) truncated at degree d above the forced
/// vanishing orders. Radial weights on concentric discs use the monomials
/// (z − c)^k, which are orthogonal; otherwise the monomials times the
/// polynomial P that vanishes to the ideal order at every pole are
/// orthonormalised through a Cholesky factor of their Gram matrix.
struct BergmanBasis {
  Disc domain;
  long m = 0;
  int degree_cap = 0;
  bool radial = false;
  long min_order = 0;                 // common vanishing order at the disc centre
  std::vector<long> excluded_orders;  // monomial orders at the centre with infinite norm

  // radial: log ‖(z − c)^n‖² for n = min_order, …, min_order + degree_cap
  std::vector<double> log_norm_sq;

  // general: e_k = P(u) u^k with u = (z − c)/R; Gram scaled by e^{−log_shift}
  std::vector<std::pair<std::complex<double>, long>> prefactor_roots;  // P = Π (u − u_p)^{k_p}
  Eigen::MatrixXcd chol;                        // lower factor of the diagonally scaled Gram
  std::vector<double> gram_diag;
  double log_shift = 0.0;
  double condition = 1.0;

  int size() const { return degree_cap + 1; }
};

BergmanBasis build_basis(const BergmanWeight& w, const Disc& domain, long m, int degree_cap,
                         const BasisOptions& opts = {});

struct AdaptiveBasis {
  BergmanBasis basis;
  bool converged = false;
  double last_change = 0.0;  // max change of (1/2m) log K over the probe ring
};

/// Grow the degree cap in bands of 4 until adding a band changes
/// (1/2m) log K on the circle of radius `eval_radius` about the disc centre by
/// less than `tol`. Stops at the last well-conditioned degree otherwise.
/// `jet` > 0 measures the change of the plain jet kernel of that order instead.
AdaptiveBasis adaptive_basis(const BergmanWeight& w, const Disc& domain, long m, double eval_radius,
                             double tol = 1e-8, const BasisOptions& opts = {}, int jet = 0, int max_degree = 400);

/// log Σ_j Σ_{α ≤ p} c_α |D^α σ_j(z)|², c_α = 1 (plain) or 1/α!² (taylor).
double log_kernel(const BergmanBasis& b, Point2 z, int p = 0, JetVariant v = JetVariant::plain);

/// φ_m = (1/2m) log Σ |σ_j|².
double demailly_phi_m(const BergmanBasis& b, Point2 z);

/// (1/2m) log of the jet kernel: ψ_m for p = 1 plain, φ_m^δ for p = ⌊δm⌋
/// taylor.
double jet_psi_m(const BergmanBasis& b, Point2 z, int p, JetVariant v);

/// ν(φ_m, centre) = (min vanishing order of the basis) / m.
double lelong_at_centre(const BergmanBasis& b);

/// max |⟨σ_i, σ_j⟩ − δ_ij| over the first `count` basis functions, by an
/// independent 2-D quadrature.
double orthonormality_defect(const BergmanBasis& b, const BergmanWeight& w, int count, const BasisOptions& opts = {});

struct SandwichRow {
  long m = 0;
  double lelong = 0.0;
  bool lelong_ok = false;
  double worst_lower = 0.0;  // max over points of φ − C₁/m − φ_m (≤ 0 passes)
  double worst_upper = 0.0;  // max over points of φ_m − sup φ − (1/m) log(1/(√π r)) (≤ 0 passes)
  bool pass = false;
  int degree_cap = 0;
};

struct SandwichReport {
  double C1 = 0.0;      // max m(φ − φ_m) at the first m
  double log_C2 = 0.0;  // max m(φ_m − sup φ) + log r over the grid; at most log(1/√π)
  double r = 0.0;
  std::vector<SandwichRow> rows;
  bool pass = false;
};

/// φ − C₁/m ≤ φ_m ≤ sup_{D(z,r)} φ + (1/m) log(C₂/r) at the sample points, with
/// C₁ fitted on the first m of the grid and C₂ = 1/√π from the sub-mean-value
/// inequality. Points must satisfy |z − c| + r < R.
SandwichReport sandwich_probe(const BergmanWeight& w, const Disc& domain, const std::vector<long>& m_grid,
                              const std::vector<Point2>& points, double r, const BasisOptions& opts = {});

struct MassGrowthRow {
  long m = 0;
  double sup_abs_psi = 0.0;
  double mass = 0.0;  // ∫_B dd^c ψ_m
  int degree_cap = 0;
};

/// sup_B |ψ_m| on a polar grid and the Laplacian mass of ψ_m on B from the
/// flux of its gradient through ∂B.
std::vector<MassGrowthRow> mass_growth_probe(const BergmanWeight& w, const Disc& domain, const std::vector<long>& m_grid,
                                             const Disc& B, const BasisOptions& opts = {});

/// ∫_B dd^c φ for a weight given pointwise, by the same flux rule.
double flux_mass(const std::function<double(Point2)>& f, const Disc& B, int n_theta = 64);

struct KernelComparison {
  long points = 0;
  long violations = 0;
  double max_log_excess = 0.0;  // max log B_Ω − log B_B (≤ 0 expected)
  double max_log_ratio = 0.0;   // max log B_B − log B_Ω, the measured constant
  bool pass = false;
};

/// B^{(p)}_{mφ,Ω} ≤ B^{(p)}_{mφ,B} on the points of an n×n grid lying in B₀.
KernelComparison kernel_comparison(const BergmanWeight& w, const Disc& omega, const Disc& B, const Disc& B0, long m,
                                   int p, int n = 20, const BasisOptions& opts = {});

}  // namespace potlab
