#pragma once

#include <functional>
#include <vector>

#include "potlab/geometry.hpp"

namespace potlab {

struct QuadOptions {
  double tol = 1e-8;       // relative
  double abs_tol = 0.0;    // absolute floor on the error target
  long budget = 10'000'000;  // integrand evaluations
  int max_rings = 200;
  Exec exec = Exec::parallel;
  bool throw_on_failure = true;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
  int rings = 0;  // deepest ring reached around any singularity
};

struct VecQuadResult {
  std::vector<double> value;
  double error = 0.0;  // weighted max-norm
  long evaluations = 0;
  bool converged = true;
};

/// A registered point singularity: the integrand behaves like |z − at|^{−2s}
/// inside |z − at| < core (everywhere when core is 0); outside the core the
/// rings may grow toward the point.
struct Singularity {
  Point2 at;
  double s = 0.0;
  double core = 0.0;
};

using Integrand = std::function<double(Point2)>;
using Integrand1d = std::function<double(double)>;
/// Writes `dim` values at the point.
using VecIntegrand = std::function<void(Point2, double*)>;

/// Adaptive Gauss–Kronrod (7/15) on [a, b].
QuadResult integrate_1d(const Integrand1d& f, double a, double b, const QuadOptions& opts = {});

/// Adaptive tensor Gauss–Kronrod on a rectangle.
QuadResult integrate_rect(const Integrand& f, const Rect& r, const QuadOptions& opts = {});

/// Integral over a disc of an integrand with registered point singularities.
/// The integrand is split by smooth cutoffs: the regular part in polar
/// coordinates about the centre, and a neighbourhood of each singularity in
/// geometric polar rings about that point, with the geometric tail of the
/// ring series extrapolated. Throws DivergenceDetected when the ring
/// contributions stop decaying.
QuadResult integrate_disc(const Integrand& f, const Disc& disc,
                          const std::vector<Singularity>& singularities,
                          const QuadOptions& opts = {});

/// Vector-valued version. `scale` weights the components in the error norm
/// (defaults to 1); the error target is tol times the largest weighted
/// component of the result.
VecQuadResult integrate_disc_vec(const VecIntegrand& f, int dim, const Disc& disc,
                                 const std::vector<Singularity>& singularities,
                                 const QuadOptions& opts = {},
                                 const std::vector<double>& scale = {});

/// Cutoff radius used around each singularity: at most half the distance to
/// the disc boundary and to every other singularity.
std::vector<double> singularity_radii(const Disc& disc, const std::vector<Singularity>& sing);

/// C^∞ cutoff: 1 for t ≤ 1/2, 0 for t ≥ 1.
double bump(double t);

/// Compensated (Neumaier) summation in the given order.
class NeumaierSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace potlab
