#include "potlab/ideals1d.hpp"

#include <cmath>

#include "potlab/errors.hpp"
#include "potlab/quad.hpp"

namespace potlab {

long ideal_order(double nu, double m) {
  if (!(nu >= 0.0) || !(m > 0.0)) throw DomainError("ideal_order needs ν ≥ 0 and m > 0");
  const double x = m * nu;
  const double r = std::round(x);
  // mν within rounding of an integer is that integer; otherwise k = ⌊mν⌋
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<long>(r);
  return static_cast<long>(std::floor(x));
}

InclusionCheck check_inclusions(double nu, long m0, long q, double eps) {
  if (m0 < 1 || q < 1 || !(eps > 0.0)) throw DomainError("check_inclusions needs m₀, q ≥ 1 and ε > 0");
  InclusionCheck c;
  c.order_m0 = ideal_order(nu, static_cast<double>(m0));
  c.order_m0q = ideal_order(nu, static_cast<double>(m0 * q));
  c.order_m0eps = ideal_order(nu, static_cast<double>(m0) * (1.0 + eps));
  c.right_ok = c.order_m0q >= q * c.order_m0;
  c.left_ok = q * c.order_m0eps >= c.order_m0q;
  c.left_contractual = static_cast<double>(m0) * eps >= 3.0 - 1e-12;
  return c;
}

namespace {

// ∫_{D(0,1/2)} |z|^{−2s} dλ; throws DivergenceDetected for s ≥ 1
QuadResult model_integral(double s) {
  QuadOptions o;
  o.tol = 1e-8;
  o.exec = Exec::serial;
  o.max_rings = 400;
  const Disc d{{0, 0}, 0.5};
  std::vector<Singularity> sing;
  if (s != 0.0) sing.push_back({{0, 0}, s});
  return integrate_disc([s](Point2 z) { return std::pow(std::hypot(z.x, z.y), -2.0 * s); }, d, sing, o);
}

}  // namespace

SkodaResult skoda_integrability(double nu) {
  SkodaResult r;
  r.integrable_below_1 = nu < 1.0;
  try {
    r.value = model_integral(nu).value;
    r.quadrature_integrable = true;
  } catch (const DivergenceDetected&) {
    r.quadrature_integrable = false;
  }
  return r;
}

long ideal_order_by_quadrature(double nu, double m) {
  const double x = m * nu;
  // downward from a certainly convergent order; large exponents overflow
  long k = static_cast<long>(std::ceil(x)) + 1;
  while (k > 0) {
    try {
      model_integral(x - static_cast<double>(k - 1));
    } catch (const DivergenceDetected&) {
      break;
    }
    --k;
  }
  return k;
}

InclusionGridReport exhaustive_inclusion_grid() {
  InclusionGridReport rep;
  for (int i = 1; i <= 300; ++i) {
    const double nu = i / 100.0;
    for (long m0 = 1; m0 <= 50; ++m0)
      for (long q = 1; q <= 20; ++q)
        for (double f : {1.0, 2.0, 5.0}) {
          const double eps = 3.0 / static_cast<double>(m0) * f;
          const auto c = check_inclusions(nu, m0, q, eps);
          ++rep.cases;
          const bool right_bad = !c.right_ok;
          const bool left_bad = c.left_contractual && !c.left_ok;
          rep.right_failures += right_bad;
          rep.left_failures += left_bad;
          if ((right_bad || left_bad) && rep.first_failures.size() < 40) rep.first_failures.push_back({nu, m0, q, eps, c});
        }
  }
  return rep;
}

}  // namespace potlab
