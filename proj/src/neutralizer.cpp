#include "potlab/neutralizer.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

constexpr double kFloorSnap = 1e-9;

Rect source_square(const SubharmonicWeight& w) { return Rect::square(w.domain.centre, 2.0 * w.domain.radius); }

// log|Π (z − a_j)^{m_j}| with the simple points multiplied as complex numbers
// and renormalised by powers of two, the multiple ones summed as logarithms.
class LogModulus {
 public:
  explicit LogModulus(const std::vector<NeutralPoint>& pts) {
    for (const auto& p : pts) {
      if (p.m_j == 1)
        simple_.push_back(p.at.as_complex());
      else
        multiple_.push_back(p);
    }
  }

  double operator()(Point2 z) const {
    const std::complex<double> zc = z.as_complex();
    std::complex<double> prod = 1.0;
    long exponent = 0;
    for (std::size_t i = 0; i < simple_.size(); ++i) {
      prod *= zc - simple_[i];
      if ((i & 15u) == 15u) renormalise(prod, exponent);
    }
    double out = std::log(std::abs(prod)) + static_cast<double>(exponent) * M_LN2;
    for (const auto& p : multiple_) out += static_cast<double>(p.m_j) * std::log(distance(z, p.at));
    return out;
  }

 private:
  static void renormalise(std::complex<double>& p, long& exponent) {
    const double mag = std::max(std::abs(p.real()), std::abs(p.imag()));
    if (!(mag > 0.0) || !std::isfinite(mag)) return;
    int k = 0;
    std::frexp(mag, &k);
    p = {std::ldexp(p.real(), -k), std::ldexp(p.imag(), -k)};
    exponent += k;
  }

  std::vector<std::complex<double>> simple_;
  std::vector<NeutralPoint> multiple_;
};

double log_integrand_with(const SubharmonicWeight& w, long m, const LogModulus& lm, Point2 z) {
  return 2.0 * lm(z) - 2.0 * static_cast<double>(m) * w.riesz.log_potential(z);
}

double min_pair_distance(const std::vector<Point2>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, distance(pts[i], pts[j]));
  return best;
}

double wrap(double a) { return std::remainder(a, 2.0 * M_PI); }

}  // namespace

StrippedWeight strip(const SubharmonicWeight& w, long m, double delta) {
  if (m < 1) throw DomainError("m must be a positive integer");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const Rect sq = source_square(w);
  StrippedWeight out{w, m, delta, {}, {}};
  std::vector<Atom> residual_atoms;
  for (const auto& [p, nu] : lelong_spectrum(w.riesz)) {
    if (!sq.contains(p)) continue;
    const double mnu = static_cast<double>(m) * nu;
    double rest = nu;
    if (mnu >= 1.0 - delta) {
      const long k = static_cast<long>(std::floor(mnu + kFloorSnap));
      out.stripped_points.push_back({p, std::max(k, 1L), nu});
      rest = std::max(0.0, nu - static_cast<double>(k) / static_cast<double>(m));
    }
    if (rest > 1e-15 * std::max(1.0, nu)) residual_atoms.push_back({p, rest});
  }
  out.residual = w.riesz.with_window(sq).with_atoms(std::move(residual_atoms));
  return out;
}

long choose_Nm(double m, double gamma, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(gamma > 0.0)) throw DomainError("choose_Nm needs positive mass");
  const double mg = m * gamma;
  if (!(mg * delta * (1.0 - delta) / (2.0 - delta) > 1.0))
    throw WindowEmpty("no integer in (" + std::to_string(2.0 / (2.0 - delta) * mg) + ", " +
                      std::to_string(mg * (1.0 + delta)) + "]; increase m");
  const double lo = 2.0 / (2.0 - delta) * mg;
  const long n = static_cast<long>(std::floor(lo)) + 1;
  if (static_cast<double>(n) > mg * (1.0 + delta)) throw WindowEmpty("window for N_m is empty");
  return n;
}

double log_integrand(const SubharmonicWeight& w, long m, const std::vector<NeutralPoint>& pts, Point2 z) {
  return log_integrand_with(w, m, LogModulus(pts), z);
}

NeutralisationReport neutralise(const SubharmonicWeight& w, long m, double delta, const NeutraliseOptions& opts) {
  w.validate();
  const auto sw = strip(w, m, delta);
  const Rect sq = source_square(w);
  const auto spectrum = lelong_spectrum(w.riesz);
  auto nu_at = [&](Point2 p) {
    auto it = spectrum.find(p);
    return it == spectrum.end() ? 0.0 : it->second;
  };

  NeutralisationReport rep;
  rep.m = m;
  rep.delta = delta;
  rep.gamma = w.riesz.mass_on(sq);
  rep.gamma_disc = w.riesz.mass_on(w.domain);
  rep.gamma_res = sw.residual.total_mass();
  rep.stripped_count = static_cast<long>(sw.stripped_points.size());

  std::map<Point2, NeutralPoint> merged;
  for (const auto& s : sw.stripped_points) merged[s.at] = {s.at, s.m_j, s.nu};

  if (rep.gamma_res > 1e-12 * std::max(1.0, rep.gamma)) {
    rep.N_m = choose_Nm(static_cast<double>(m), rep.gamma_res, delta);
    AtomiseOptions ao;
    ao.exec = opts.exec;
    const auto at = atomise(scale(sw.residual, static_cast<double>(rep.N_m) / rep.gamma_res), sq, ao);
    rep.atomiser_certified = at.certificates.certified();
    rep.atomiser_f_ratio = at.certificates.f_ratio;
    for (const auto& piece : at.pieces) {
      auto [it, fresh] = merged.try_emplace(piece.centre, NeutralPoint{piece.centre, 0, nu_at(piece.centre)});
      it->second.m_j += 1;
    }
  }

  std::vector<Point2> small_nu;
  rep.all_points_in_disc = true;
  for (const auto& [p, np] : merged) {
    rep.points.push_back(np);
    rep.sum_mj += np.m_j;
    if (np.nu < (1.0 - delta) / static_cast<double>(m)) small_nu.push_back(p);
    if (distance(p, w.domain.centre) > w.domain.radius) rep.all_points_in_disc = false;
  }
  rep.bound_i_ok = static_cast<double>(rep.sum_mj) <= static_cast<double>(m) * rep.gamma * (1.0 + delta);
  rep.small_nu_count = static_cast<long>(small_nu.size());
  rep.min_separation_small_nu = min_pair_distance(small_nu);

  // I_m = ∫_D exp(L), L = 2 log|Π(z − a_j)^{m_j}| − 2m U_μ, integrated as e^{L_ref} ∫ e^{L − L_ref}
  const LogModulus lm(rep.points);
  const Disc& D = w.domain;
  double l_ref = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 16; ++i)
    for (int j = 0; j < 32; ++j) {
      const double rho = D.radius * (i - 0.5) / 16.0, th = 2.0 * M_PI * (j + 0.25) / 32.0;
      const double l = log_integrand_with(w, m, lm, {D.centre.x + rho * std::cos(th), D.centre.y + rho * std::sin(th)});
      if (std::isfinite(l)) l_ref = std::max(l_ref, l);
    }
  if (!std::isfinite(l_ref)) l_ref = 0.0;

  std::vector<Singularity> sing;
  for (const auto& [p, nu] : spectrum) {
    if (!(distance(p, D.centre) < D.radius)) continue;
    auto it = merged.find(p);
    const double s = static_cast<double>(m) * nu - static_cast<double>(it == merged.end() ? 0 : it->second.m_j);
    if (std::abs(s) > 1e-12) sing.push_back({p, s});
  }

  QuadOptions qo;
  qo.tol = opts.tol;
  qo.budget = opts.budget;
  qo.exec = opts.exec;
  qo.throw_on_failure = false;
  auto q = integrate_disc([&](Point2 z) { return std::exp(log_integrand_with(w, m, lm, z) - l_ref); }, D, sing, qo);
  rep.evaluations = q.evaluations;
  rep.I_m_rel_error = q.value != 0.0 ? q.error / std::abs(q.value) : std::numeric_limits<double>::infinity();
  if (!std::isfinite(q.value) || !(q.value > 0.0) || rep.I_m_rel_error > opts.hard_tol)
    throw QuadratureFailure("I_m estimate for m = " + std::to_string(m) + " has relative error " +
                            std::to_string(rep.I_m_rel_error));
  rep.log_I_m = l_ref + std::log(q.value);
  rep.I_m = std::exp(rep.log_I_m);
  return rep;
}

long argument_principle_count(const SubharmonicWeight& w, long m, const std::vector<NeutralPoint>& pts,
                              const Disc& circle) {
  // arg f_m mod 2π; e^{m g₀} contributes its continuous phase m·Im g₀
  auto phase = [&](double th) {
    const Point2 z{circle.centre.x + circle.radius * std::cos(th), circle.centre.y + circle.radius * std::sin(th)};
    std::complex<double> u = 1.0;
    for (const auto& p : pts) {
      const std::complex<double> d = z.as_complex() - p.at.as_complex();
      if (d == 0.0) throw DomainError("a zero of f_m lies on the contour");
      u *= std::pow(d / std::abs(d), static_cast<int>(p.m_j));
      u /= std::abs(u);
    }
    return std::arg(u) + static_cast<double>(m) * w.g0_at(z).imag();
  };

  double winding = 0.0;
  std::function<void(double, double, double, double, int)> walk = [&](double ta, double tb, double pa, double pb,
                                                                       int depth) {
    const double d = wrap(pb - pa);
    if (std::abs(d) <= M_PI / 8 || depth > 48) {
      winding += d;
      return;
    }
    const double tm = 0.5 * (ta + tb);
    const double pm = phase(tm);
    walk(ta, tm, pa, pm, depth + 1);
    walk(tm, tb, pm, pb, depth + 1);
  };
  const int n = 256;
  std::vector<double> ph(n + 1);
  for (int i = 0; i <= n; ++i) ph[i] = phase(2.0 * M_PI * i / n);
  for (int i = 0; i < n; ++i) walk(2.0 * M_PI * i / n, 2.0 * M_PI * (i + 1) / n, ph[i], ph[i + 1], 0);
  const double turns = winding / (2.0 * M_PI);
  if (std::abs(turns - std::round(turns)) > 0.1)
    throw QuadratureFailure("argument-principle winding is not close to an integer");
  return std::lround(turns);
}

}  // namespace potlab
