#include "potlab/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "potlab/errors.hpp"

namespace potlab {

void NeumaierSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double bump(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double u = 2.0 * t - 1.0;
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  return a / (a + b);
}

namespace {

// Kronrod 15 nodes on [-1, 1] in increasing order, with the embedded Gauss 7 weights
// (zero at the Kronrod-only nodes).
struct Rule {
  std::array<double, 15> x{};
  std::array<double, 15> wk{};
  std::array<double, 15> wg{};
  Rule() {
    const double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.0};
    const double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    const double wg7[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    for (int i = 0; i < 8; ++i) {
      x[i] = -xgk[i];
      x[14 - i] = xgk[i];
      wk[i] = wk[14 - i] = wgk[i];
      const double g = (i % 2 == 1) ? wg7[i / 2] : 0.0;
      wg[i] = wg[14 - i] = g;
    }
  }
};

const Rule& rule() {
  static const Rule r;
  return r;
}

constexpr int kPts = 15;
constexpr long kCellEvals = kPts * kPts;

using ParamFn = std::function<void(double, double, double*)>;

struct Cell {
  Rect r;
  double err = 0.0;
  bool split_x = true;
};

// Evaluate one rectangle: writes the Kronrod value (dim entries) and returns the
// weighted error. Also decides the split direction.
double eval_cell(const ParamFn& f, int dim, const std::vector<double>& scale, Cell& cell,
                 double* value, std::vector<double>& scratch) {
  const Rule& R = rule();
  const Rect& r = cell.r;
  const double hx = 0.5 * r.width(), hy = 0.5 * r.height();
  const double mx = 0.5 * (r.x_min + r.x_max), my = 0.5 * (r.y_min + r.y_max);
  scratch.assign(static_cast<std::size_t>(kCellEvals) * dim, 0.0);
  for (int j = 0; j < kPts; ++j)
    for (int i = 0; i < kPts; ++i)
      f(mx + hx * R.x[i], my + hy * R.x[j], scratch.data() + (static_cast<std::size_t>(j) * kPts + i) * dim);
  const double jac = hx * hy;
  double err = 0.0, ex = 0.0, ey = 0.0;
  for (int c = 0; c < dim; ++c) {
    double kk = 0, gg = 0, gk = 0, kg = 0;
    for (int j = 0; j < kPts; ++j) {
      double rk = 0, rg = 0;
      for (int i = 0; i < kPts; ++i) {
        const double v = scratch[(static_cast<std::size_t>(j) * kPts + i) * dim + c];
        rk += R.wk[i] * v;
        rg += R.wg[i] * v;
      }
      kk += R.wk[j] * rk;
      gg += R.wg[j] * rg;
      gk += R.wk[j] * rg;  // Gauss in x, Kronrod in y
      kg += R.wg[j] * rk;  // Kronrod in x, Gauss in y
    }
    const double w = scale.empty() ? 1.0 : scale[c];
    value[c] = jac * kk;
    err = std::max(err, w * jac * std::abs(kk - gg));
    ex = std::max(ex, w * jac * std::abs(kk - gk));
    ey = std::max(ey, w * jac * std::abs(kk - kg));
  }
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
  cell.err = err;
  cell.split_x = ex >= ey;
  return err;
}

struct AdaptResult {
  std::vector<double> value;
  double error = 0.0;
  long evaluations = 0;
  bool converged = false;
};

AdaptResult adapt_rect(const ParamFn& f, int dim, const std::vector<Rect>& initial, double tol,
                       double abs_tol, long budget, Exec exec, const std::vector<double>& scale) {
  std::vector<Cell> cells(initial.size());
  std::vector<double> vals(initial.size() * dim);
  for (std::size_t i = 0; i < initial.size(); ++i) cells[i].r = initial[i];

  auto evaluate = [&](std::size_t first) {
    const long n = static_cast<long>(cells.size() - first);
    bool finite = true;
#pragma omp parallel if (exec == Exec::parallel && n > 1)
    {
      std::vector<double> scratch;
#pragma omp for schedule(dynamic) reduction(&& : finite)
      for (long k = 0; k < n; ++k) {
        const std::size_t idx = first + static_cast<std::size_t>(k);
        eval_cell(f, dim, scale, cells[idx], vals.data() + idx * dim, scratch);
        for (int c = 0; c < dim; ++c) finite = finite && std::isfinite(vals[idx * dim + c]);
      }
    }
    return finite;
  };

  AdaptResult out;
  out.value.assign(dim, 0.0);
  bool finite = evaluate(0);
  out.evaluations = static_cast<long>(cells.size()) * kCellEvals;
  std::vector<std::size_t> order;
  while (true) {
    double target_scale = 0.0;
    for (int c = 0; c < dim; ++c) {
      NeumaierSum s;
      for (std::size_t i = 0; i < cells.size(); ++i) s.add(vals[i * dim + c]);
      out.value[c] = s.value();
      const double w = scale.empty() ? 1.0 : scale[c];
      target_scale = std::max(target_scale, w * std::abs(out.value[c]));
    }
    NeumaierSum es;
    for (const auto& c : cells) es.add(c.err);
    out.error = es.value();
    const double target = std::max(abs_tol, tol * target_scale);
    if (!finite) return out;
    if (out.error <= target) {
      out.converged = true;
      return out;
    }

    // split the worst cells, enough of them to hold about half the excess error
    order.resize(cells.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cells[a].err > cells[b].err; });
    std::vector<std::size_t> chosen;
    double acc = 0.0;
    const double want = 0.5 * (out.error - target);
    for (std::size_t idx : order) {
      const Rect& r = cells[idx].r;
      const double span = cells[idx].split_x ? r.width() : r.height();
      const double ref = std::max({std::abs(r.x_min), std::abs(r.x_max), std::abs(r.y_min), std::abs(r.y_max), 1.0});
      if (span <= 1e-13 * ref) continue;
      chosen.push_back(idx);
      acc += cells[idx].err;
      if (acc >= want) break;
    }
    if (chosen.empty()) return out;
    if (out.evaluations + 2 * static_cast<long>(chosen.size()) * kCellEvals > budget) return out;
    std::sort(chosen.begin(), chosen.end());

    const std::size_t first_new = cells.size();
    for (std::size_t idx : chosen) {
      Rect a = cells[idx].r, b = cells[idx].r;
      if (cells[idx].split_x) {
        const double mid = 0.5 * (a.x_min + a.x_max);
        a.x_max = mid;
        b.x_min = mid;
      } else {
        const double mid = 0.5 * (a.y_min + a.y_max);
        a.y_max = mid;
        b.y_min = mid;
      }
      cells[idx].r = a;
      cells.push_back(Cell{b});
    }
    vals.resize(cells.size() * dim);
    // re-evaluate the shrunk cells in place, then the appended halves
    const long n_old = static_cast<long>(chosen.size());
    {
      bool fin = true;
#pragma omp parallel if (exec == Exec::parallel)
      {
        std::vector<double> scratch;
#pragma omp for schedule(dynamic) reduction(&& : fin)
        for (long k = 0; k < n_old; ++k) {
          const std::size_t idx = chosen[static_cast<std::size_t>(k)];
          eval_cell(f, dim, scale, cells[idx], vals.data() + idx * dim, scratch);
          for (int c = 0; c < dim; ++c) fin = fin && std::isfinite(vals[idx * dim + c]);
        }
      }
      finite = fin && evaluate(first_new);
    }
    out.evaluations += 2 * n_old * kCellEvals;
  }
}

}  // namespace

QuadResult integrate_rect(const Integrand& f, const Rect& r, const QuadOptions& opts) {
  QuadResult res;
  if (r.degenerate()) return res;
  ParamFn pf = [&](double u, double v, double* out) { out[0] = f({u, v}); };
  auto a = adapt_rect(pf, 1, {r}, opts.tol, opts.abs_tol, opts.budget, opts.exec, {});
  res.value = a.value[0];
  res.error = a.error;
  res.evaluations = a.evaluations;
  res.converged = a.converged;
  if (!res.converged && opts.throw_on_failure)
    throw QuadratureFailure("rectangle quadrature did not reach the tolerance (error " +
                            std::to_string(a.error) + ")");
  return res;
}

QuadResult integrate_1d(const Integrand1d& f, double a, double b, const QuadOptions& opts) {
  QuadResult res;
  if (a == b) return res;
  const Rule& R = rule();
  struct Seg {
    double lo, hi, val, err;
  };
  auto eval = [&](double lo, double hi) {
    const double h = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double k = 0, g = 0;
    for (int i = 0; i < kPts; ++i) {
      const double v = f(mid + h * R.x[i]);
      k += R.wk[i] * v;
      g += R.wg[i] * v;
    }
    return Seg{lo, hi, h * k, std::abs(h * (k - g))};
  };
  std::vector<Seg> segs{eval(a, b)};
  res.evaluations = kPts;
  while (true) {
    NeumaierSum vs, es;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      vs.add(segs[i].val);
      es.add(segs[i].err);
      if (segs[i].err > segs[worst].err) worst = i;
    }
    res.value = vs.value();
    res.error = es.value();
    if (!std::isfinite(res.value)) {
      res.converged = false;
      break;
    }
    if (res.error <= std::max(opts.abs_tol, opts.tol * std::abs(res.value))) break;
    const Seg w = segs[worst];
    const double mid = 0.5 * (w.lo + w.hi);
    if (res.evaluations + 2 * kPts > opts.budget || !(mid > w.lo && mid < w.hi)) {
      res.converged = false;
      break;
    }
    segs[worst] = eval(w.lo, mid);
    segs.push_back(eval(mid, w.hi));
    res.evaluations += 2 * kPts;
  }
  if (!res.converged && opts.throw_on_failure)
    throw QuadratureFailure("1-D quadrature did not reach the tolerance (error " +
                            std::to_string(res.error) + ")");
  return res;
}

std::vector<double> singularity_radii(const Disc& disc, const std::vector<Singularity>& sing) {
  std::vector<double> eps(sing.size());
  for (std::size_t i = 0; i < sing.size(); ++i) {
    double e = 0.5 * (disc.radius - distance(sing[i].at, disc.centre));
    for (std::size_t j = 0; j < sing.size(); ++j)
      if (j != i) e = std::min(e, 0.5 * distance(sing[i].at, sing[j].at));
    eps[i] = e;
  }
  return eps;
}

namespace {

double weighted_norm(const std::vector<double>& v, const std::vector<double>& scale) {
  double n = 0.0;
  for (std::size_t c = 0; c < v.size(); ++c) n = std::max(n, (scale.empty() ? 1.0 : scale[c]) * std::abs(v[c]));
  return n;
}

struct DiscOut {
  VecQuadResult r;
  int rings = 0;
};

DiscOut disc_impl(const VecIntegrand& f, int dim, const Disc& disc,
                  const std::vector<Singularity>& sing_in, const QuadOptions& opts,
                  const std::vector<double>& scale) {
  std::vector<Singularity> sing;
  for (const auto& s : sing_in)
    if (distance(s.at, disc.centre) < disc.radius) sing.push_back(s);
  const auto eps = singularity_radii(disc, sing);
  for (std::size_t i = 0; i < sing.size(); ++i)
    if (!(eps[i] > 0.0)) throw DomainError("coincident singularities must be merged before integration");

  DiscOut out;
  out.r.value.assign(dim, 0.0);
  bool ok = true;
  long budget = opts.budget;

  auto cutoff_sum = [&](Point2 z) {
    double w = 0.0;
    for (std::size_t i = 0; i < sing.size(); ++i) {
      const double t = distance(z, sing[i].at) / eps[i];
      if (t < 1.0) w += bump(t);
    }
    return w;
  };

  // regular part, polar about the disc centre
  {
    const double R = disc.radius;
    ParamFn pf = [&](double rho, double th, double* o) {
      const Point2 z{disc.centre.x + rho * std::cos(th), disc.centre.y + rho * std::sin(th)};
      const double w = cutoff_sum(z);
      if (w >= 1.0) {
        std::fill(o, o + dim, 0.0);
        return;
      }
      f(z, o);
      for (int c = 0; c < dim; ++c) o[c] *= (1.0 - w) * rho;
    };
    std::vector<Rect> init;
    const int nr = 4, nt = 8;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j)
        init.push_back({R * i / nr, R * (i + 1) / nr, 2 * M_PI * j / nt, 2 * M_PI * (j + 1) / nt});
    auto a = adapt_rect(pf, dim, init, 0.5 * opts.tol, 0.5 * opts.abs_tol, budget, opts.exec, scale);
    out.r.value = a.value;
    out.r.error += a.error;
    out.r.evaluations += a.evaluations;
    budget -= a.evaluations;
    ok = ok && a.converged;
  }

  for (std::size_t i = 0; i < sing.size(); ++i) {
    const Point2 p = sing[i].at;
    const double s = sing[i].s;
    const double ratio = std::pow(0.5, 2.0 - 2.0 * s);
    std::vector<double> total(dim, 0.0);
    std::vector<double> prev;
    std::vector<std::vector<double>> hist;  // ring values, oldest first
    std::vector<double> ratios;
    bool done = false;
    for (int k = 0; k < opts.max_rings && !done; ++k) {
      const double hi = eps[i] * std::ldexp(1.0, -k);
      const double lo = 0.5 * hi;
      ParamFn pf = [&, k](double rho, double th, double* o) {
        const Point2 z{p.x + rho * std::cos(th), p.y + rho * std::sin(th)};
        const double w = k == 0 ? bump(rho / eps[i]) : 1.0;
        if (w == 0.0) {
          std::fill(o, o + dim, 0.0);
          return;
        }
        f(z, o);
        for (int c = 0; c < dim; ++c) o[c] *= w * rho;
      };
      std::vector<Rect> init;
      for (int j = 0; j < 4; ++j) init.push_back({lo, hi, M_PI * j / 2, M_PI * (j + 1) / 2});
      auto a = adapt_rect(pf, dim, init, 0.25 * opts.tol, 0.25 * std::ldexp(opts.abs_tol, -k), budget, opts.exec, scale);
      out.r.error += a.error;
      out.r.evaluations += a.evaluations;
      budget -= a.evaluations;
      ok = ok && a.converged;
      out.rings = std::max(out.rings, k + 1);
      for (int c = 0; c < dim; ++c) total[c] += a.value[c];

      const double ck = weighted_norm(a.value, scale);
      const bool in_core = sing[i].core <= 0.0 || hi <= sing[i].core;
      if (k >= 2 && !prev.empty()) {
        const double cp = weighted_norm(prev, scale);
        if (cp > 0.0) ratios.push_back(dim == 1 ? a.value[0] / prev[0] : ck / cp);
      }
      if (!in_core) ratios.clear();
      prev = a.value;
      hist.push_back(a.value);
      if (k >= 6 && ratios.size() >= 3) {
        const std::size_t n = ratios.size();
        if (ratios[n - 1] >= 1.0 - 1e-9 && ratios[n - 2] >= 1.0 - 1e-9 && ratios[n - 3] >= 1.0 - 1e-9)
          throw DivergenceDetected("ring contributions around (" + std::to_string(p.x) + ", " +
                                   std::to_string(p.y) + ") do not decay");
      }
      if (!a.converged) break;
      if (!in_core) continue;

      std::vector<double> cur(dim);
      for (int c = 0; c < dim; ++c) cur[c] = out.r.value[c] + total[c];
      const double ref = std::max(weighted_norm(cur, scale), opts.abs_tol / std::max(opts.tol, 1e-300));
      const double goal = opts.tol * ref / 10.0;
      if (ratio < 1.0) {
        const double tail_factor = ratio / (1.0 - ratio);
        if (dim == 1 && k >= 3 && ratios.size() >= 2) {
          const std::size_t n = ratios.size();
          const double dev = std::max(std::abs(ratios[n - 1] - ratio), std::abs(ratios[n - 2] - ratio));
          const double tail = a.value[0] * tail_factor;
          const double tail_err = std::abs(a.value[0]) * dev / ((1.0 - ratio) * (1.0 - ratio)) +
                                  std::abs(tail) * 1e-12;
          if (tail_err < goal || ck < goal) {
            total[0] += tail;
            out.r.error += tail_err;
            done = true;
          }
        } else if (dim > 1 && k >= 4 && hist.size() >= 4) {
          // per component c_k = A r^k + B (r/4)^k: the smooth factor's
          // quadratic term gives the second mode; the error is the misfit of
          // the two-mode model on the previous rings
          const double r1 = ratio, r2 = 0.25 * ratio;
          auto fit = [&](const std::vector<double>& c0, const std::vector<double>& c1, int c, double& a, double& b) {
            a = (c1[c] - r2 * c0[c]) / (r1 - r2);
            b = c0[c] - a;
          };
          const std::size_t n = hist.size();
          std::vector<double> dev(dim), tail(dim);
          for (int c = 0; c < dim; ++c) {
            double a, b, a2, b2;
            fit(hist[n - 3], hist[n - 2], c, a, b);
            const double miss1 = hist[n - 1][c] - (r1 * r1 * a + r2 * r2 * b);
            fit(hist[n - 4], hist[n - 3], c, a2, b2);
            const double miss2 = hist[n - 2][c] - (r1 * r1 * a2 + r2 * r2 * b2);
            dev[c] = std::max(std::abs(miss1), std::abs(miss2));
            fit(hist[n - 2], hist[n - 1], c, a, b);
            tail[c] = a * r1 * r1 / (1.0 - r1) + b * r2 * r2 / (1.0 - r2);
          }
          const double tail_err = weighted_norm(dev, scale) / ((1.0 - ratio) * (1.0 - ratio)) +
                                  weighted_norm(tail, scale) * 1e-12;
          if (tail_err < goal || ck * tail_factor < goal) {
            for (int c = 0; c < dim; ++c) total[c] += tail[c];
            out.r.error += tail_err;
            done = true;
          }
        } else if (ck * tail_factor < goal) {
          out.r.error += ck * tail_factor;
          done = true;
        }
      } else if (ck == 0.0 && k >= 6) {
        done = true;
      }
      if (ck == 0.0 && k >= 2) done = true;
    }
    if (!done) ok = false;
    for (int c = 0; c < dim; ++c) out.r.value[c] += total[c];
  }
  out.r.converged = ok;
  return out;
}

}  // namespace

QuadResult integrate_disc(const Integrand& f, const Disc& disc,
                          const std::vector<Singularity>& singularities, const QuadOptions& opts) {
  VecIntegrand vf = [&](Point2 z, double* o) { o[0] = f(z); };
  auto d = disc_impl(vf, 1, disc, singularities, opts, {});
  QuadResult res;
  res.value = d.r.value[0];
  res.error = d.r.error;
  res.evaluations = d.r.evaluations;
  res.rings = d.rings;
  res.converged = d.r.converged && std::isfinite(res.value) &&
                  res.error <= std::max(opts.abs_tol, opts.tol * std::abs(res.value));
  if (!res.converged && opts.throw_on_failure)
    throw QuadratureFailure("disc quadrature did not reach relative error " + std::to_string(opts.tol) +
                            " (value " + std::to_string(res.value) + ", error " +
                            std::to_string(res.error) + ")");
  return res;
}

VecQuadResult integrate_disc_vec(const VecIntegrand& f, int dim, const Disc& disc,
                                 const std::vector<Singularity>& singularities,
                                 const QuadOptions& opts, const std::vector<double>& scale) {
  auto d = disc_impl(f, dim, disc, singularities, opts, scale);
  if (!d.r.converged && opts.throw_on_failure)
    throw QuadratureFailure("vector disc quadrature did not reach the tolerance");
  return d.r;
}

}  // namespace potlab
