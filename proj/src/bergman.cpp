#include "potlab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "potlab/errors.hpp"
#include "potlab/ideals1d.hpp"

namespace potlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using cd = std::complex<double>;

double log_sum_exp(const std::vector<double>& t) {
  double mx = -kInf;
  for (double x : t) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : t) s += std::exp(x - mx);
  return mx + std::log(s);
}

bool same_point(Point2 a, Point2 b, double scale) { return distance(a, b) <= 1e-14 * std::max(1.0, scale); }

bool radial_about(const BergmanWeight& w, const Disc& d) {
  return w.radial && same_point(w.radial->centre, d.centre, d.radius);
}

// ------------------------------------------------------------------ radial

double log_radial_norm(const RadialProfile& pr, double R, long m, long n, double tol) {
  const double md = static_cast<double>(m);
  const double e1 = 2.0 * static_cast<double>(n) + 2.0 - 2.0 * md * pr.nu;
  if (!(e1 > 0.0)) throw DomainError("monomial order below the integrability threshold");
  // ‖(z − c)^n‖² = 2π R^{e1} ∫_{−∞}^0 e^{F(s)} ds with ρ = R e^s
  auto F = [&](double s) { return e1 * s - 2.0 * md * pr.h(R * std::exp(s)); };
  if (!std::isfinite(F(0.0)) || !std::isfinite(pr.h(0.0))) throw DomainError("radial profile must be finite on [0, R]");
  const bool kink = pr.b != 0.0 && pr.cutoff > 0.0 && pr.cutoff < R;
  const double s_cut = kink ? std::log(pr.cutoff / R) : 0.0;
  // below s_lo the profile is constant to rounding and the tail is e^{F(s_lo)}/e1
  const double s_lo = std::min(kink ? s_cut - 20.0 : 0.0, std::log(1e-9)) - 1.0;
  const double tail = F(s_lo) - std::log(e1);

  std::vector<double> cuts{s_lo};
  if (kink) cuts.push_back(s_cut);
  double fmax = -kInf, s_max = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double s = s_lo * (1.0 - i / 400.0);
    if (F(s) > fmax) {
      fmax = F(s);
      s_max = s;
    }
  }
  if (s_max > s_lo && s_max < 0.0 && !(kink && s_max == s_cut)) cuts.push_back(s_max);
  cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  QuadOptions o;
  o.tol = tol;
  o.exec = Exec::serial;
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i])
      integral += integrate_1d([&](double s) { return std::exp(F(s) - fmax); }, cuts[i], cuts[i + 1], o).value;
  return std::log(2.0 * M_PI) + e1 * std::log(R) + log_sum_exp({tail, fmax + std::log(integral)});
}

double radial_log_kernel(const BergmanBasis& b, Point2 z, int p, JetVariant v) {
  const double r = distance(z, b.domain.centre);
  const double logr = std::log(r);
  std::vector<double> terms;
  for (int a = 0; a <= p; ++a)
    for (int k = 0; k <= b.degree_cap; ++k) {
      const long n = b.min_order + k;
      if (n < a) continue;
      if (n > a && r == 0.0) continue;
      double t = 2.0 * (std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(n - a) + 1.0));
      if (v == JetVariant::taylor) t -= 2.0 * std::lgamma(a + 1.0);
      if (n > a) t += 2.0 * static_cast<double>(n - a) * logr;
      terms.push_back(t - b.log_norm_sq[k]);
    }
  return log_sum_exp(terms);
}

// ----------------------------------------------------------------- general

// log|P(u)|
double log_abs_prefactor(const BergmanBasis& b, cd u) {
  double s = 0.0;
  for (const auto& [root, k] : b.prefactor_roots) s += static_cast<double>(k) * std::log(std::abs(u - root));
  return s;
}

// Taylor coefficients t_i of P at u0 up to order p: P(u0 + h) = Σ t_i hⁱ + O(h^{p+1})
std::vector<cd> prefactor_taylor(const BergmanBasis& b, cd u0, int p) {
  std::vector<cd> t(p + 1, 0.0);
  t[0] = 1.0;
  for (const auto& [root, k] : b.prefactor_roots) {
    const cd d = u0 - root;
    // (d + h)^k = Σ C(k, i) d^{k−i} hⁱ
    std::vector<cd> f(p + 1, 0.0);
    double binom = 1.0;
    for (int i = 0; i <= std::min<long>(p, k); ++i) {
      f[i] = binom * std::pow(d, static_cast<int>(k - i));
      binom = binom * static_cast<double>(k - i) / (i + 1.0);
    }
    std::vector<cd> out(p + 1, 0.0);
    for (int i = 0; i <= p; ++i)
      for (int j = 0; i + j <= p; ++j) out[i + j] += t[i] * f[j];
    t = std::move(out);
  }
  return t;
}

// ẽ_k^{(α)} / α! = [h^α] P(u0 + h)(u0 + h)^k / √D_k for k = 0..d, in u-derivatives
std::vector<cd> scaled_jet(const BergmanBasis& b, const std::vector<cd>& pt, cd u0, int alpha) {
  const int d = b.degree_cap;
  std::vector<cd> out(d + 1, 0.0);
  std::vector<cd> pw(d + 1);
  pw[0] = 1.0;
  for (int j = 1; j <= d; ++j) pw[j] = pw[j - 1] * u0;
  for (int k = 0; k <= d; ++k) {
    cd acc = 0.0;
    // Σ_i t_i C(k, α − i) u0^{k − α + i}
    for (int i = std::max(0, alpha - k); i <= alpha; ++i) {
      const int j = alpha - i;
      const double c = std::exp(std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0));
      acc += pt[i] * c * pw[k - j];
    }
    out[k] = acc / std::sqrt(b.gram_diag[k]);
  }
  return out;
}

double general_log_kernel(const BergmanBasis& b, Point2 z, int p, JetVariant v) {
  const double R = b.domain.radius;
  const cd u0 = (z.as_complex() - b.domain.centre.as_complex()) / R;
  const auto pt = prefactor_taylor(b, u0, p);
  std::vector<double> terms;
  for (int a = 0; a <= p; ++a) {
    const auto jet = scaled_jet(b, pt, u0, a);
    Eigen::VectorXcd e(b.size());
    for (int k = 0; k < b.size(); ++k) e[k] = jet[k];
    const Eigen::VectorXcd w = b.chol.triangularView<Eigen::Lower>().solve(e);
    const double s = w.squaredNorm();
    if (!(s > 0.0)) continue;
    // D_z^α = R^{−α} D_u^α, and the jet above carries 1/α!
    double t = std::log(s) - 2.0 * a * std::log(R);
    if (v == JetVariant::plain) t += 2.0 * std::lgamma(a + 1.0);
    terms.push_back(t);
  }
  return log_sum_exp(terms) - b.log_shift;
}

double shift_estimate(const BergmanWeight& w, const BergmanBasis& b) {
  const Disc& D = b.domain;
  double mx = -kInf;
  for (int i = 0; i <= 24; ++i)
    for (int j = 0; j < 48; ++j) {
      const double rho = D.radius * i / 24.0 * 0.999, th = 2.0 * M_PI * (j + 0.37) / 48.0;
      const Point2 z{D.centre.x + rho * std::cos(th), D.centre.y + rho * std::sin(th)};
      const cd u = (z.as_complex() - D.centre.as_complex()) / D.radius;
      const double l = 2.0 * log_abs_prefactor(b, u) - 2.0 * static_cast<double>(b.m) * w.phi(z);
      if (std::isfinite(l)) mx = std::max(mx, l);
    }
  return std::isfinite(mx) ? mx : 0.0;
}

std::vector<Singularity> pole_singularities(const BergmanWeight& w, const Disc& D, long m) {
  std::vector<Singularity> out;
  for (const auto& pole : w.poles) {
    if (!(distance(pole.at, D.centre) < D.radius)) continue;
    const double s = static_cast<double>(m) * pole.mass - static_cast<double>(ideal_order(pole.mass, static_cast<double>(m)));
    if (s > 1e-12) out.push_back({pole.at, s});
  }
  // a cut-off √log profile peaks inside its cutoff radius
  if (w.radial && w.radial->b != 0.0 && w.radial->cutoff > 0.0 && distance(w.radial->centre, D.centre) < D.radius) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Singularity& s) { return s.at == w.radial->centre; });
    if (it == out.end()) it = out.insert(out.end(), {w.radial->centre, 0.0});
    it->core = w.radial->cutoff;
  }
  return out;
}

// basis data and the diagonally scaled Gram matrix up to degree d
struct GeneralGram {
  BergmanBasis b;
  Eigen::MatrixXcd A;
};

GeneralGram general_gram(const BergmanWeight& w, const Disc& D, long m, int d, const BasisOptions& opts) {
  BergmanBasis b;
  b.domain = D;
  b.m = m;
  b.degree_cap = d;
  b.radial = false;
  for (const auto& pole : w.poles) {
    if (!(distance(pole.at, D.centre) < D.radius)) continue;
    const long k = ideal_order(pole.mass, static_cast<double>(m));
    if (k == 0) continue;
    const cd up = (pole.at.as_complex() - D.centre.as_complex()) / D.radius;
    b.prefactor_roots.push_back({up, k});
    if (same_point(pole.at, D.centre, D.radius)) {
      b.min_order = k;
      for (long j = 0; j < k; ++j) b.excluded_orders.push_back(j);
    }
  }
  b.log_shift = shift_estimate(w, b);
  const auto sing = pole_singularities(w, D, m);
  const double md = static_cast<double>(m);

  auto weight_and_u = [&](Point2 z, cd& u) {
    u = (z.as_complex() - D.centre.as_complex()) / D.radius;
    return std::exp(2.0 * log_abs_prefactor(b, u) - 2.0 * md * w.phi(z) - b.log_shift);
  };

  QuadOptions qo;
  qo.tol = opts.tol;
  qo.exec = opts.exec;

  // a coarse diagonal fixes the scale of every entry
  const int n = d + 1;
  QuadOptions coarse = qo;
  coarse.tol = std::max(qo.tol, 1e-6);
  auto unit_powers = [&](Point2 z, double* o) {
    cd u;
    const double wt = weight_and_u(z, u);
    const double a2 = std::norm(u);
    double pw = wt;
    for (int k = 0; k < n; ++k) {
      o[k] = pw;
      pw *= a2;
    }
  };
  std::vector<double> rank_scale(n);
  for (int k = 0; k < n; ++k) rank_scale[k] = static_cast<double>(k + 1);
  const auto rough = integrate_disc_vec(unit_powers, n, D, sing, coarse, rank_scale).value;
  for (double g : rough)
    if (!(g > 0.0) || !std::isfinite(g)) throw IllConditioned("non-positive Gram diagonal");
  std::vector<double> inv_sqrt(n);
  for (int k = 0; k < n; ++k) inv_sqrt[k] = 1.0 / std::sqrt(rough[k]);

  // one pass for the scaled Gram matrix: diagonal, then the upper triangle as
  // real and imaginary parts; every entry is of size at most about 1
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) pairs.push_back({j, k});
  const int dim = static_cast<int>(n + 2 * pairs.size());
  QuadOptions fine = qo;
  fine.abs_tol = opts.tol;
  const auto all = integrate_disc_vec(
      [&](Point2 z, double* o) {
        cd u;
        const double wt = weight_and_u(z, u);
        thread_local std::vector<cd> pw;
        pw.resize(n);
        pw[0] = 1.0;
        for (int k = 1; k < n; ++k) pw[k] = pw[k - 1] * u;
        for (int k = 0; k < n; ++k) o[k] = wt * std::norm(pw[k]) * inv_sqrt[k] * inv_sqrt[k];
        double* off = o + n;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const auto [j, k] = pairs[i];
          const cd v = wt * pw[j] * std::conj(pw[k]) * (inv_sqrt[j] * inv_sqrt[k]);
          off[2 * i] = v.real();
          off[2 * i + 1] = v.imag();
        }
      },
      dim, D, sing, fine);
  b.gram_diag.resize(n);
  std::vector<double> renorm(n);
  for (int k = 0; k < n; ++k) {
    if (!(all.value[k] > 0.0) || !std::isfinite(all.value[k])) throw IllConditioned("non-positive Gram diagonal");
    b.gram_diag[k] = all.value[k] * rough[k];
    renorm[k] = 1.0 / std::sqrt(all.value[k]);
  }
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [j, k] = pairs[i];
    A(j, k) = cd(all.value[n + 2 * i], all.value[n + 2 * i + 1]) * (renorm[j] * renorm[k]);
    A(k, j) = std::conj(A(j, k));
  }
  return {std::move(b), std::move(A)};
}

// the basis of degree d from the leading block of a larger Gram matrix
BergmanBasis truncate_gram(const GeneralGram& g, int d, const BasisOptions& opts) {
  BergmanBasis b = g.b;
  b.degree_cap = d;
  b.gram_diag.resize(d + 1);
  const Eigen::MatrixXcd A = g.A.topLeftCorner(d + 1, d + 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  b.condition = lmin > 0.0 ? lmax / lmin : kInf;
  if (!(b.condition <= opts.max_condition))
    throw IllConditioned("Gram matrix condition " + std::to_string(b.condition) + " at degree " + std::to_string(d));
  Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() != Eigen::Success) throw IllConditioned("Cholesky factorisation failed");
  b.chol = llt.matrixL();
  return b;
}

BergmanBasis build_general(const BergmanWeight& w, const Disc& D, long m, int d, const BasisOptions& opts) {
  return truncate_gram(general_gram(w, D, m, d, opts), d, opts);
}

BergmanBasis build_radial(const BergmanWeight& w, const Disc& D, long m, int d, const BasisOptions& opts) {
  const auto& pr = *w.radial;
  BergmanBasis b;
  b.domain = D;
  b.m = m;
  b.degree_cap = d;
  b.radial = true;
  b.min_order = ideal_order(pr.nu, static_cast<double>(m));
  for (long j = 0; j < b.min_order; ++j) b.excluded_orders.push_back(j);
  b.log_norm_sq.resize(d + 1);
  for (int k = 0; k <= d; ++k) b.log_norm_sq[k] = log_radial_norm(pr, D.radius, m, b.min_order + k, 0.01 * opts.tol);
  return b;
}

double max_change_on_ring(const BergmanBasis& a, const BergmanBasis& b, double radius, int jet) {
  double mx = 0.0;
  const double md = 2.0 * static_cast<double>(a.m);
  for (int j = 0; j < 32; ++j) {
    const double th = 2.0 * M_PI * (j + 0.5) / 32.0;
    const Point2 z{a.domain.centre.x + radius * std::cos(th), a.domain.centre.y + radius * std::sin(th)};
    const double x = log_kernel(a, z, jet), y = log_kernel(b, z, jet);
    if (std::isfinite(x) && std::isfinite(y))
      mx = std::max(mx, std::abs(x - y) / md);
    else if (x != y || std::isnan(x))
      return kInf;
  }
  return mx;
}

}  // namespace

// ------------------------------------------------------------------ public

double RadialProfile::h(double rho) const {
  double v = shift + a * rho * rho;
  if (b != 0.0) v -= b * std::sqrt(-std::log(std::max(rho, cutoff)));
  return v;
}

double RadialProfile::phi(Point2 z) const {
  const double rho = distance(z, centre);
  const double v = h(rho);
  return nu != 0.0 ? v + nu * std::log(rho) : v;
}

BergmanWeight BergmanWeight::from_profile(const RadialProfile& p) {
  BergmanWeight w;
  w.phi = [p](Point2 z) { return p.phi(z); };
  if (p.nu > 0.0) w.poles.push_back({p.centre, p.nu});
  w.radial = p;
  return w;
}

BergmanWeight BergmanWeight::from_subharmonic(const SubharmonicWeight& sw) {
  BergmanWeight w;
  w.phi = [sw](Point2 z) { return eval_weight(sw, z); };
  for (const auto& [p, nu] : lelong_spectrum(sw.riesz)) w.poles.push_back({p, nu});
  // a single point mass with a constant harmonic part is radial about its atom
  if (!sw.riesz.has_density() && w.poles.size() <= 1 && sw.g0.size() <= 1) {
    RadialProfile pr;
    pr.centre = w.poles.empty() ? sw.domain.centre : w.poles[0].at;
    pr.nu = w.poles.empty() ? 0.0 : w.poles[0].mass;
    pr.shift = sw.g0.empty() ? 0.0 : sw.g0[0].real();
    w.radial = pr;
  }
  return w;
}

BergmanBasis build_basis(const BergmanWeight& w, const Disc& domain, long m, int degree_cap, const BasisOptions& opts) {
  if (degree_cap < 0) throw DomainError("degree cap must be nonnegative");
  if (m < 1) throw DomainError("m must be positive");
  if (!(domain.radius > 0.0)) throw DomainError("domain radius must be positive");
  if (radial_about(w, domain)) return build_radial(w, domain, m, degree_cap, opts);
  return build_general(w, domain, m, degree_cap, opts);
}

AdaptiveBasis adaptive_basis(const BergmanWeight& w, const Disc& domain, long m, double eval_radius, double tol,
                             const BasisOptions& opts, int jet, int max_degree) {
  AdaptiveBasis out;
  int d = 8;
  if (radial_about(w, domain)) {
    out.basis = build_basis(w, domain, m, d, opts);
  }
  // general weights: one Gram matrix serves every degree up to `hi`
  int hi = std::min(std::max(2 * d, 16), std::max(max_degree, d));
  std::optional<GeneralGram> gram;
  if (!out.basis.radial) {
    if (m < 1) throw DomainError("m must be positive");
    if (!(domain.radius > 0.0)) throw DomainError("domain radius must be positive");
    gram = general_gram(w, domain, m, hi, opts);
    out.basis = truncate_gram(*gram, d, opts);
  }
  while (d + 4 <= max_degree) {
    BergmanBasis next;
    try {
      if (!gram) {
        next = build_basis(w, domain, m, d + 4, opts);
      } else {
        if (d + 4 > hi) {
          hi = std::min(std::max(d + 4, (3 * hi / 2 + 3) / 4 * 4), max_degree);
          gram = general_gram(w, domain, m, hi, opts);
        }
        next = truncate_gram(*gram, d + 4, opts);
      }
    } catch (const IllConditioned&) {
      return out;
    }
    out.last_change = max_change_on_ring(out.basis, next, eval_radius, jet);
    out.basis = std::move(next);
    d += 4;
    if (out.last_change < tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

double log_kernel(const BergmanBasis& b, Point2 z, int p, JetVariant v) {
  if (p < 0) throw DomainError("jet order must be nonnegative");
  return b.radial ? radial_log_kernel(b, z, p, v) : general_log_kernel(b, z, p, v);
}

double demailly_phi_m(const BergmanBasis& b, Point2 z) { return log_kernel(b, z, 0) / (2.0 * static_cast<double>(b.m)); }

double jet_psi_m(const BergmanBasis& b, Point2 z, int p, JetVariant v) {
  return log_kernel(b, z, p, v) / (2.0 * static_cast<double>(b.m));
}

double lelong_at_centre(const BergmanBasis& b) { return static_cast<double>(b.min_order) / static_cast<double>(b.m); }

double orthonormality_defect(const BergmanBasis& b, const BergmanWeight& w, int count, const BasisOptions& opts) {
  count = std::min(count, b.size());
  const Disc& D = b.domain;
  const double md = static_cast<double>(b.m);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < count; ++i)
    for (int j = i; j < count; ++j) pairs.push_back({i, j});
  std::vector<Singularity> sing;
  if (b.radial) {
    const double s = md * w.radial->nu - static_cast<double>(b.min_order);
    if (s > 1e-12) sing.push_back({D.centre, s});
  } else {
    sing = pole_singularities(w, D, b.m);
  }

  VecIntegrand f = [&](Point2 z, double* o) {
    std::vector<cd> q(count);
    double logw = 0.0;
    if (b.radial) {
      const cd u = z.as_complex() - D.centre.as_complex();
      const double lu = std::log(std::abs(u)), th = std::arg(u);
      const double phi = w.phi(z);
      for (int i = 0; i < count; ++i) {
        const double n = static_cast<double>(b.min_order + i);
        q[i] = std::polar(std::exp(n * lu - md * phi - 0.5 * b.log_norm_sq[i]), n * th);
      }
    } else {
      const cd u = (z.as_complex() - D.centre.as_complex()) / D.radius;
      logw = 2.0 * log_abs_prefactor(b, u) - 2.0 * md * w.phi(z) - b.log_shift;
      Eigen::VectorXcd e(b.size());
      cd pw = 1.0;
      for (int k = 0; k < b.size(); ++k) {
        e[k] = pw / std::sqrt(b.gram_diag[k]);
        pw *= u;
      }
      const Eigen::VectorXcd s = b.chol.triangularView<Eigen::Lower>().solve(e);
      const double sw = std::exp(0.5 * logw);
      for (int i = 0; i < count; ++i) q[i] = s[i] * sw;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      const cd v = q[i] * std::conj(q[j]);
      o[2 * k] = v.real();
      o[2 * k + 1] = v.imag();
    }
  };
  QuadOptions qo;
  qo.tol = opts.tol;
  qo.exec = opts.exec;
  const auto r = integrate_disc_vec(f, static_cast<int>(2 * pairs.size()), D, sing, qo);
  double defect = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const cd g(r.value[2 * k], r.value[2 * k + 1]);
    defect = std::max(defect, std::abs(g - (i == j ? 1.0 : 0.0)));
  }
  return defect;
}

namespace {

double sup_on_disc(const BergmanWeight& w, Point2 z, double r) {
  // subharmonic: the sup over the disc is attained on the circle
  if (w.radial && w.radial->a >= 0.0 && w.radial->b >= 0.0 && w.radial->nu >= 0.0) {
    const double rho = distance(z, w.radial->centre) + r;
    return w.radial->phi({w.radial->centre.x + rho, w.radial->centre.y});
  }
  double mx = -kInf;
  for (int j = 0; j < 720; ++j) {
    const double th = 2.0 * M_PI * j / 720.0;
    mx = std::max(mx, w.phi({z.x + r * std::cos(th), z.y + r * std::sin(th)}));
  }
  return mx;
}

double centre_lelong(const BergmanWeight& w, const Disc& D) {
  for (const auto& p : w.poles)
    if (same_point(p.at, D.centre, D.radius)) return p.mass;
  return 0.0;
}

}  // namespace

// |f(z)|² ≤ (1/πr²) ∫_{D(z,r)} |f|² gives C₂ = 1/√π
const double kLogMeanValueC2 = -0.5 * std::log(M_PI);

SandwichReport sandwich_probe(const BergmanWeight& w, const Disc& domain, const std::vector<long>& m_grid,
                              const std::vector<Point2>& points, double r, const BasisOptions& opts) {
  if (m_grid.empty()) throw DomainError("empty m grid");
  SandwichReport rep;
  rep.r = r;
  double reach = 0.0;
  for (const auto& z : points) {
    reach = std::max(reach, distance(z, domain.centre));
    if (!(distance(z, domain.centre) + r < domain.radius)) throw DomainError("sample disc leaves the domain");
  }
  std::vector<double> phi(points.size()), sup(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    phi[i] = w.phi(points[i]);
    sup[i] = sup_on_disc(w, points[i], r);
  }
  const double nu = centre_lelong(w, domain);
  rep.pass = true;
  for (std::size_t g = 0; g < m_grid.size(); ++g) {
    const long m = m_grid[g];
    const double md = static_cast<double>(m);
    // weights with a density converge only algebraically in the degree
    const auto ab = adaptive_basis(w, domain, m, reach, 1e-8, opts);
    std::vector<double> pm(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) pm[i] = demailly_phi_m(ab.basis, points[i]);
    if (g == 0) {
      rep.C1 = 0.0;
      rep.log_C2 = -kInf;
      for (std::size_t i = 0; i < points.size(); ++i)
        if (std::isfinite(phi[i])) rep.C1 = std::max(rep.C1, md * (phi[i] - pm[i]));
    }
    for (std::size_t i = 0; i < points.size(); ++i)
      rep.log_C2 = std::max(rep.log_C2, md * (pm[i] - sup[i]) + std::log(r));
    SandwichRow row;
    row.m = m;
    row.degree_cap = ab.basis.degree_cap;
    row.lelong = lelong_at_centre(ab.basis);
    row.lelong_ok = row.lelong >= nu - 1.0 / md - 1e-12 && row.lelong <= nu + 1e-12;
    row.worst_lower = -kInf;
    row.worst_upper = -kInf;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (std::isfinite(phi[i])) row.worst_lower = std::max(row.worst_lower, phi[i] - rep.C1 / md - pm[i]);
      row.worst_upper = std::max(row.worst_upper, pm[i] - sup[i] - (kLogMeanValueC2 - std::log(r)) / md);
    }
    const double slack = 1e-7;
    row.pass = row.lelong_ok && row.worst_lower <= slack && row.worst_upper <= slack;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

double flux_mass(const std::function<double(Point2)>& f, const Disc& B, int n_theta) {
  const double h = 1e-4 * B.radius;
  double s = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    const double th = 2.0 * M_PI * (j + 0.5) / n_theta;
    const double c = std::cos(th), sn = std::sin(th);
    const double out = f({B.centre.x + (B.radius + h) * c, B.centre.y + (B.radius + h) * sn});
    const double in = f({B.centre.x + (B.radius - h) * c, B.centre.y + (B.radius - h) * sn});
    s += B.radius * (out - in) / (2.0 * h);
  }
  // (1/2π) ∮ ∂_n f ds with ds = R dθ
  return s / n_theta;
}

std::vector<MassGrowthRow> mass_growth_probe(const BergmanWeight& w, const Disc& domain, const std::vector<long>& m_grid,
                                             const Disc& B, const BasisOptions& opts) {
  const double reach = distance(B.centre, domain.centre) + 1.001 * B.radius;
  if (!(reach < domain.radius)) throw DomainError("B must be relatively compact in the domain");
  std::vector<MassGrowthRow> rows;
  for (long m : m_grid) {
    const auto ab = adaptive_basis(w, domain, m, reach, 1e-10, opts, 1);
    auto psi = [&](Point2 z) { return jet_psi_m(ab.basis, z, 1, JetVariant::plain); };
    MassGrowthRow row;
    row.m = m;
    row.degree_cap = ab.basis.degree_cap;
    for (int i = 0; i <= 16; ++i)
      for (int j = 0; j < (i == 0 ? 1 : 32); ++j) {
        const double rho = B.radius * i / 16.0, th = 2.0 * M_PI * j / 32.0;
        row.sup_abs_psi = std::max(row.sup_abs_psi, std::abs(psi({B.centre.x + rho * std::cos(th), B.centre.y + rho * std::sin(th)})));
      }
    row.mass = flux_mass(psi, B);
    rows.push_back(row);
  }
  return rows;
}

KernelComparison kernel_comparison(const BergmanWeight& w, const Disc& omega, const Disc& B, const Disc& B0, long m,
                                   int p, int n, const BasisOptions& opts) {
  if (!(distance(B.centre, omega.centre) + B.radius <= omega.radius * (1 + 1e-12)))
    throw DomainError("B must lie in Ω");
  if (!(distance(B0.centre, B.centre) + B0.radius < B.radius || (B == omega && B0.radius < B.radius)))
    throw DomainError("B₀ must be relatively compact in B");
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point2 z{B0.centre.x - B0.radius + 2.0 * B0.radius * (i + 0.5) / n,
                     B0.centre.y - B0.radius + 2.0 * B0.radius * (j + 0.5) / n};
      if (distance(z, B0.centre) <= B0.radius) pts.push_back(z);
    }
  double reach_o = 0.0, reach_b = 0.0;
  for (const auto& z : pts) {
    reach_o = std::max(reach_o, distance(z, omega.centre));
    reach_b = std::max(reach_b, distance(z, B.centre));
  }
  const auto bo = adaptive_basis(w, omega, m, reach_o, 1e-12, opts, p);
  const bool same = omega == B;
  const auto bb = same ? bo : adaptive_basis(w, B, m, reach_b, 1e-12, opts, p);
  KernelComparison out;
  out.points = static_cast<long>(pts.size());
  out.max_log_excess = -kInf;
  out.max_log_ratio = -kInf;
  for (const auto& z : pts) {
    const double ko = log_kernel(bo.basis, z, p), kb = log_kernel(bb.basis, z, p);
    const double ex = ko - kb;
    out.max_log_excess = std::max(out.max_log_excess, ex);
    out.max_log_ratio = std::max(out.max_log_ratio, -ex);
    if (ex > 1e-9) ++out.violations;
  }
  out.pass = out.violations == 0;
  return out;
}

}  // namespace potlab
