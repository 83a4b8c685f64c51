#include "potlab/potential.hpp"

#include <cmath>
#include <limits>

#include "potlab/errors.hpp"
#include "potlab/quad.hpp"

namespace potlab {

void SubharmonicWeight::validate() const {
  if (!(domain.radius > 0.0 && domain.radius < 0.5))
    throw DomainError("disc radius must lie in (0, 1/2)");
}

std::complex<double> SubharmonicWeight::g0_at(Point2 z) const {
  const std::complex<double> u = z.as_complex() - domain.centre.as_complex();
  std::complex<double> acc = 0.0;
  for (auto it = g0.rbegin(); it != g0.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double eval_weight(const SubharmonicWeight& w, Point2 z) {
  const double u = w.riesz.log_potential(z);
  if (std::isinf(u)) return u;
  return u + w.harmonic(z);
}

namespace {

// ∫∫_{[0,a]×[0,b]} (u² + v²)^{−s} du dv for a, b ≥ 0, s < 1
double corner_power(double a, double b, double s) {
  if (a <= 0.0 || b <= 0.0) return 0.0;
  const double e = 2.0 - 2.0 * s;
  const double th = std::atan2(b, a);
  QuadOptions o;
  o.tol = 1e-13;
  o.exec = Exec::serial;
  auto fa = [&](double t) { return std::pow(a / std::cos(t), e); };
  auto fb = [&](double t) { return std::pow(b / std::cos(t), e); };
  const double ia = integrate_1d(fa, 0.0, th, o).value;
  const double ib = integrate_1d(fb, 0.0, M_PI / 2 - th, o).value;
  return (ia + ib) / e;
}

double corner_signed(double u, double v, double s) {
  const double sg = (u < 0 ? -1.0 : 1.0) * (v < 0 ? -1.0 : 1.0);
  return sg * corner_power(std::abs(u), std::abs(v), s);
}

}  // namespace

double rect_power_integral(const Rect& r, Point2 z, double s) {
  if (s >= 1.0) throw DomainError("rect_power_integral needs s < 1");
  const double x0 = r.x_min - z.x, x1 = r.x_max - z.x;
  const double y0 = r.y_min - z.y, y1 = r.y_max - z.y;
  return corner_signed(x1, y1, s) - corner_signed(x0, y1, s) - corner_signed(x1, y0, s) +
         corner_signed(x0, y0, s);
}

JensenCheck jensen_bound_check(const SubharmonicWeight& w, Point2 z) {
  const Disc& D = w.domain;
  if (!(distance(z, D.centre) < D.radius)) throw DomainError("z must lie in the open disc");
  JensenCheck out;
  out.gamma = w.riesz.mass_on(D);
  if (!(out.gamma > 0.0)) throw ZeroMass("no Riesz mass on the disc; the bound is vacuous");
  const double outside = w.riesz.total_mass() - out.gamma;
  if (outside > 1e-12 * std::max(1.0, w.riesz.total_mass()))
    throw DomainError("Riesz measure must be carried by the closed disc");
  for (const auto& a : w.riesz.atoms())
    if (a.at == z) throw DomainError("z must not be an atom");

  const double gamma = out.gamma;
  out.lhs = std::exp(-2.0 * w.riesz.log_potential(z));

  NeumaierSum acc;
  for (const auto& a : w.riesz.atoms()) acc.add(a.mass * std::pow(distance(a.at, z), -2.0 * gamma));
  bool infinite = false;
  w.riesz.for_each_density_piece([&](int, int, const Rect& piece, double rho, double) {
    if (infinite) return;
    if (gamma < 1.0) {
      acc.add(rho * rect_power_integral(piece, z, gamma));
    } else if (piece.contains(z)) {
      infinite = true;
    } else {
      QuadOptions o;
      o.tol = 1e-10;
      o.exec = Exec::serial;
      auto q = integrate_rect([&](Point2 p) { return std::pow(distance(p, z), -2.0 * gamma); }, piece, o);
      acc.add(rho * q.value);
    }
  });
  out.rhs = infinite ? std::numeric_limits<double>::infinity() : acc.value() / gamma;
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-6);
  return out;
}

}  // namespace potlab
