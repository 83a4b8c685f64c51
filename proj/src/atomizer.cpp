#include "potlab/atomizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

// margin keeping grown containers strictly inside the aspect bound after rounding
constexpr double kAspectMargin = 4e-12;

double coord(Point2 p, int axis) { return axis == 0 ? p.x : p.y; }
double other(Point2 p, int axis) { return axis == 0 ? p.y : p.x; }
double lo(const Rect& r, int axis) { return axis == 0 ? r.x_min : r.y_min; }
double hi(const Rect& r, int axis) { return axis == 0 ? r.x_max : r.y_max; }
double extent(const Rect& r, int axis) { return hi(r, axis) - lo(r, axis); }

Rect half(const Rect& r, int axis, double t, bool lower) {
  Rect out = r;
  if (axis == 0) {
    if (lower) out.x_max = std::clamp(t, r.x_min, r.x_max);
    else out.x_min = std::clamp(t, r.x_min, r.x_max);
  } else {
    if (lower) out.y_max = std::clamp(t, r.y_min, r.y_max);
    else out.y_min = std::clamp(t, r.y_min, r.y_max);
  }
  return out;
}

struct DensitySlab {
  double lo, hi, mass;
};

struct CutPlan {
  bool found = false;
  double t = 0.0;
  bool split_atom = false;
  std::vector<Atom> left_atoms;
  std::vector<Atom> right_atoms;
};

// Place a cut along `axis` leaving mass k on the lower side. The marginal of the
// density is piecewise linear, so the cut coordinate is found by exact inversion;
// atoms sitting on the cut line are assigned in order of their other coordinate.
CutPlan plan_cut(const PlanarMeasure& mu, int axis, long k, double tol) {
  std::vector<DensitySlab> slabs;
  mu.for_each_density_piece([&](int, int, const Rect& piece, double, double mass) {
    slabs.push_back({lo(piece, axis), hi(piece, axis), mass});
  });
  std::vector<double> cs;
  for (const auto& s : slabs) {
    cs.push_back(s.lo);
    cs.push_back(s.hi);
  }
  for (const auto& a : mu.atoms()) cs.push_back(coord(a.at, axis));
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());

  auto density_below = [&](double t) {
    double s = 0.0;
    for (const auto& sl : slabs) {
      if (t >= sl.hi) s += sl.mass;
      else if (t > sl.lo) s += sl.mass * (t - sl.lo) / (sl.hi - sl.lo);
    }
    return s;
  };
  auto atoms_at = [&](double c) {
    double s = 0.0;
    for (const auto& a : mu.atoms())
      if (coord(a.at, axis) == c) s += a.mass;
    return s;
  };

  CutPlan plan;
  const double target = static_cast<double>(k);
  double cum = 0.0;
  for (std::size_t i = 0; i < cs.size() && !plan.found; ++i) {
    const double c = cs[i];
    const double A = atoms_at(c);
    if (A > 0.0 && cum + A >= target - tol) {
      plan.found = true;
      plan.t = c;
      break;
    }
    cum += A;
    if (i + 1 == cs.size()) break;
    const double next = cs[i + 1];
    const double seg = density_below(next) - density_below(c);
    if (seg > 0.0 && cum + seg >= target - tol) {
      plan.found = true;
      plan.t = std::clamp(c + (target - cum) / seg * (next - c), c, next);
    }
    cum += seg;
  }
  if (!plan.found) return plan;

  // distribute the atoms
  const double t = plan.t;
  double need = target - density_below(t);
  std::vector<Atom> on_line;
  for (const auto& a : mu.atoms()) {
    const double x = coord(a.at, axis);
    if (x < t) {
      plan.left_atoms.push_back(a);
      need -= a.mass;
    } else if (x > t) {
      plan.right_atoms.push_back(a);
    } else {
      on_line.push_back(a);
    }
  }
  std::stable_sort(on_line.begin(), on_line.end(), [&](const Atom& a, const Atom& b) {
    if (other(a.at, axis) != other(b.at, axis)) return other(a.at, axis) < other(b.at, axis);
    return a.mass < b.mass;
  });
  for (const auto& a : on_line) {
    if (need >= a.mass - tol) {
      plan.left_atoms.push_back(a);
      need -= a.mass;
    } else if (need > tol) {
      plan.left_atoms.push_back({a.at, need});
      plan.right_atoms.push_back({a.at, a.mass - need});
      plan.split_atom = true;
      need = 0.0;
    } else {
      plan.right_atoms.push_back(a);
    }
  }
  return plan;
}

SubProblem make_child(const PlanarMeasure& mu, const Rect& container, std::vector<Atom> atoms,
                      const Rect& window, const Rect& cell, long n) {
  PlanarMeasure m = mu.with_atoms(std::move(atoms));
  if (m.has_density()) m = m.with_window(window);
  auto box = m.support_bbox();
  if (!box) throw CutInfeasible("cut produced an empty side");
  if (m.has_density()) m = m.with_window(*box);
  return {std::move(m), grow_container(*box, container, cell), n};
}

}  // namespace

Rect grow_container(const Rect& s, const Rect& parent) { return grow_container(s, parent, parent); }

Rect grow_container(const Rect& s, const Rect& parent, const Rect& cell) {
  const double w = s.width(), h = s.height();
  if (w == 0.0 && h == 0.0) return s;
  Rect out = s;
  // centre on the support inside [lo, hi], shifting to stay inside
  auto place = [](double slo, double shi, double target, double lo, double hi, double& olo, double& ohi) {
    double a = 0.5 * (slo + shi) - 0.5 * target;
    double b = a + target;
    if (a < lo) {
      a = lo;
      b = a + target;
    }
    if (b > hi) {
      b = hi;
      a = b - target;
    }
    olo = std::min(a, slo);
    ohi = std::max(b, shi);
  };
  // the own side of the last cut first, then the rest of the parent
  auto widen = [&](double slo, double shi, double target, double clo, double chi, double plo, double phi, double& olo,
                   double& ohi) {
    if (target >= phi - plo) {
      olo = plo;
      ohi = phi;
    } else if (target <= chi - clo) {
      place(slo, shi, target, clo, chi, olo, ohi);
    } else {
      place(clo, chi, target, plo, phi, olo, ohi);
    }
  };
  if (h > 3.0 * w) {
    widen(s.x_min, s.x_max, h / 3.0 * (1.0 + kAspectMargin), std::max(cell.x_min, parent.x_min),
          std::min(cell.x_max, parent.x_max), parent.x_min, parent.x_max, out.x_min, out.x_max);
  } else if (w > 3.0 * h) {
    widen(s.y_min, s.y_max, w / 3.0 * (1.0 + kAspectMargin), std::max(cell.y_min, parent.y_min),
          std::min(cell.y_max, parent.y_max), parent.y_min, parent.y_max, out.y_min, out.y_max);
  }
  return out;
}

namespace {

double support_aspect(const PlanarMeasure& m) {
  const auto b = m.support_bbox();
  const double w = b->width(), h = b->height();
  if (w == 0.0 && h == 0.0) return 1.0;
  if (w == 0.0 || h == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(w / h, h / w);
}

double child_aspect(const CutResult& r) { return std::max(support_aspect(r.left.mu), support_aspect(r.right.mu)); }

}  // namespace

CutResult recursive_cut(const PlanarMeasure& mu, const Rect& container, long N, const AtomiseOptions& opts) {
  if (N < 2) throw DomainError("recursive_cut needs N >= 2");
  auto box = mu.support_bbox();
  if (!box) throw EmptyMeasure("nothing to cut");
  const int primary = container.width() >= container.height() ? 0 : 1;
  std::vector<int> axes{primary, 1 - primary};
  if (extent(*box, primary) == 0.0) std::swap(axes[0], axes[1]);

  std::vector<long> ks{N / 2};
  if (!opts.allow_atom_split)
    for (long d = 1; d < N; ++d) {
      if (N / 2 - d >= 1) ks.push_back(N / 2 - d);
      if (N / 2 + d <= N - 1) ks.push_back(N / 2 + d);
    }

  const double tol = 1e-12 * static_cast<double>(N);
  const Rect base = mu.window() ? *mu.window() : (mu.has_density() ? hull(mu.grid().rect, *box) : *box);
  for (long k : ks) {
    std::optional<CutResult> best;
    for (int axis : axes) {
      if (extent(*box, axis) == 0.0) continue;
      CutPlan plan = plan_cut(mu, axis, k, tol);
      if (!plan.found || (plan.split_atom && !opts.allow_atom_split)) continue;
      CutResult r;
      r.axis = axis;
      r.t = plan.t;
      r.k = k;
      r.split_atom = plan.split_atom;
      r.left = make_child(mu, container, std::move(plan.left_atoms), half(base, axis, plan.t, true),
                          half(container, axis, plan.t, true), k);
      r.right = make_child(mu, container, std::move(plan.right_atoms), half(base, axis, plan.t, false),
                           half(container, axis, plan.t, false), N - k);
      // a sliver support forces its container across its neighbours; the
      // other axis is taken only when it leaves thicker pieces
      if (!best || child_aspect(r) < child_aspect(*best)) best = std::move(r);
      if (child_aspect(*best) <= 3.0) break;
    }
    if (best) return std::move(*best);
  }
  throw CutInfeasible("no axis-parallel cut achieves an integer split without splitting an atom");
}

namespace {

void solve(const SubProblem& p, int base, std::vector<AtomPiece>& out, std::atomic<long>& cuts,
           const AtomiseOptions& opts) {
  if (p.N == 1) {
    auto box = p.mu.support_bbox().value_or(p.container);
    out[base] = {base, p.container, box, p.mu, box.centre()};
    return;
  }
  CutResult c = recursive_cut(p.mu, p.container, p.N, opts);
  ++cuts;
  const int right_base = base + static_cast<int>(c.k);
  if (opts.exec == Exec::parallel && p.N >= 32) {
#pragma omp task shared(out, cuts, opts) firstprivate(c, base)
    solve(c.left, base, out, cuts, opts);
#pragma omp task shared(out, cuts, opts) firstprivate(c, right_base)
    solve(c.right, right_base, out, cuts, opts);
#pragma omp taskwait
  } else {
    solve(c.left, base, out, cuts, opts);
    solve(c.right, right_base, out, cuts, opts);
  }
}

}  // namespace

AtomisationResult atomise(const PlanarMeasure& mu, const Rect& square, const AtomiseOptions& opts) {
  if (std::abs(square.width() - square.height()) > 1e-12 * std::max(1.0, square.width()) || square.degenerate())
    throw DomainError("atomise needs a nondegenerate square");
  const double total = mu.mass_on(square);
  if (std::abs(mu.total_mass() - total) > opts.integer_tolerance * std::max(1.0, total))
    throw DomainError("the measure must be carried by the square");
  const double Nr = std::round(total);
  if (std::abs(total - Nr) > opts.integer_tolerance) throw NonIntegerMass("total mass " + std::to_string(total) + " is not an integer");
  if (Nr < 1.0) throw EmptyMeasure("total mass is zero");

  AtomisationResult res;
  res.source_square = square;
  res.N = static_cast<long>(Nr);
  res.source = mu;

  // merge coincident atoms so every point carries less than one unit after peeling
  std::map<Point2, double> merged;
  for (const auto& a : mu.atoms()) merged[a.at] += a.mass;
  std::vector<Atom> atoms;
  for (const auto& [p, m] : merged) atoms.push_back({p, m});
  auto split = split_atom_integer_parts(mu.with_atoms(std::move(atoms)), opts.integer_tolerance);

  long peeled = 0;
  for (const auto& c : split.carried) peeled += c.k;
  const long rest = res.N - peeled;
  if (rest < 0) throw NonIntegerMass("integer atom parts exceed the total mass");
  res.pieces.resize(static_cast<std::size_t>(res.N));
  res.peeled = peeled;

  std::atomic<long> cuts{0};
  if (rest >= 1) {
    SubProblem top{split.stripped, square, rest};
    if (opts.exec == Exec::parallel) {
#pragma omp parallel
#pragma omp single
      solve(top, 0, res.pieces, cuts, opts);
    } else {
      solve(top, 0, res.pieces, cuts, opts);
    }
  }
  int idx = static_cast<int>(rest);
  for (const auto& c : split.carried)
    for (long u = 0; u < c.k; ++u, ++idx) {
      PlanarMeasure unit({{c.at, 1.0}}, std::nullopt, mu.bounding());
      res.pieces[idx] = {idx, Rect::point(c.at), Rect::point(c.at), unit, c.at};
    }
  res.cuts = cuts.load();
  res.certificates = verify_certificates(res, opts.exec);
  return res;
}

int overlap_multiplicity(const std::vector<Rect>& rects, Exec exec, double* union_area) {
  std::vector<const Rect*> live;
  std::vector<double> xs;
  for (const auto& r : rects)
    if (!r.degenerate()) {
      live.push_back(&r);
      xs.push_back(r.x_min);
      xs.push_back(r.x_max);
    }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const long ncol = xs.empty() ? 0 : static_cast<long>(xs.size()) - 1;
  int best = 0;
  double area = 0.0;
  std::vector<double> col_area(static_cast<std::size_t>(std::max(ncol, 0L)), 0.0);
#pragma omp parallel for schedule(dynamic) reduction(max : best) if (exec == Exec::parallel)
  for (long c = 0; c < ncol; ++c) {
    const double a = xs[c], b = xs[c + 1];
    std::vector<std::pair<double, int>> ev;
    for (const Rect* r : live)
      if (r->x_min <= a && r->x_max >= b) {
        ev.emplace_back(r->y_min, +1);
        ev.emplace_back(r->y_max, -1);
      }
    // closing before opening at equal y: touching intervals do not overlap
    std::sort(ev.begin(), ev.end());
    int cur = 0;
    double covered = 0.0, start = 0.0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      if (cur == 0 && ev[i].second > 0) start = ev[i].first;
      cur += ev[i].second;
      if (cur == 0) covered += ev[i].first - start;
      const bool last_at_y = i + 1 == ev.size() || ev[i + 1].first != ev[i].first;
      if (last_at_y && cur > best) best = cur;
    }
    col_area[c] = covered * (b - a);
  }
  if (union_area) {
    for (double v : col_area) area += v;
    *union_area = area;
  }
  return best;
}

CertificateReport verify_certificates(const AtomisationResult& r, Exec exec) {
  CertificateReport rep;
  const auto& P = r.pieces;
  const double N = static_cast<double>(r.N);
  const Rect& sq = r.source_square;

  // (a)
  double max_dev = 0.0;
  for (const auto& p : P) max_dev = std::max(max_dev, std::abs(p.piece.total_mass() - 1.0));
  rep.a_max_mass_deviation = max_dev;
  bool counts_ok = static_cast<long>(P.size()) == r.N;
  double cell_dev = 0.0;
  if (r.source.has_density()) {
    const auto& g = r.source.grid();
    std::vector<double> sum(g.cells.size(), 0.0);
    for (const auto& p : P) {
      if (!p.piece.has_density()) continue;
      if (p.piece.grid().nx != g.nx || p.piece.grid().ny != g.ny) counts_ok = false;
      p.piece.for_each_density_piece([&](int ix, int iy, const Rect&, double, double mass) {
        sum[static_cast<std::size_t>(iy) * g.nx + ix] += mass;
      });
    }
    const double floor = N / static_cast<double>(g.cells.size());
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const double orig = r.source.cell_mass(ix, iy);
        const double d = std::abs(sum[static_cast<std::size_t>(iy) * g.nx + ix] - orig) / std::max(orig, floor);
        cell_dev = std::max(cell_dev, d);
      }
  }
  rep.a_max_cell_deviation = cell_dev;
  std::map<Point2, double> want, got;
  for (const auto& a : r.source.atoms()) want[a.at] += a.mass;
  for (const auto& p : P)
    for (const auto& a : p.piece.atoms()) got[a.at] += a.mass;
  double atom_dev = 0.0;
  for (const auto& [pt, m] : want) {
    auto it = got.find(pt);
    atom_dev = std::max(atom_dev, std::abs((it == got.end() ? 0.0 : it->second) - m) / m);
  }
  for (const auto& [pt, m] : got)
    if (!want.count(pt)) atom_dev = std::max(atom_dev, 1.0);
  rep.a_max_atom_deviation = atom_dev;
  rep.a_pass = counts_ok && max_dev <= 1e-9 && cell_dev <= 1e-9 && atom_dev <= 1e-9;

  // (b)
  rep.b_containers_in_square = true;
  rep.b_supports_in_containers = true;
  for (const auto& p : P) {
    rep.b_containers_in_square = rep.b_containers_in_square && sq.contains(p.container);
    rep.b_supports_in_containers = rep.b_supports_in_containers && p.container.contains(p.support);
  }
  bool covered = true;
  for (const auto& a : r.source.atoms()) {
    bool in = false;
    for (const auto& p : P) in = in || p.support.contains(a.at);
    covered = covered && in;
  }
  if (r.source.has_density()) {
    r.source.for_each_density_piece([&](int, int, const Rect& cell, double, double) {
      double a = 0.0;
      for (const auto& p : P) a += overlap_area(cell, p.support);
      covered = covered && a >= cell.area() * (1.0 - 1e-9);
    });
  }
  rep.b_support_covered = covered;
  std::vector<Rect> containers;
  for (const auto& p : P) containers.push_back(p.container);
  double ua = 0.0;
  rep.e_max_multiplicity = overlap_multiplicity(containers, exec, &ua);
  rep.b_cover_fraction = ua / sq.area();
  rep.b_pass = rep.b_containers_in_square && rep.b_supports_in_containers && rep.b_support_covered;

  // (c)
  long pairs = 0;
  const long n = static_cast<long>(P.size());
#pragma omp parallel for schedule(dynamic) reduction(+ : pairs) if (exec == Exec::parallel)
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      if (interiors_overlap(P[i].support, P[j].support)) ++pairs;
  rep.c_overlapping_pairs = pairs;
  rep.c_pass = pairs == 0;

  // (d)
  rep.d_pass = true;
  for (const auto& p : P)
    if (auto a = p.container.aspect()) {
      rep.d_max_aspect = std::max(rep.d_max_aspect, *a);
      rep.d_pass = rep.d_pass && *a <= 3.0;
    }

  // (e)
  rep.e_pass = rep.e_max_multiplicity <= 4;

  // (f)
  double dmin = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(dynamic) reduction(min : dmin) if (exec == Exec::parallel)
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) dmin = std::min(dmin, distance(P[i].centre, P[j].centre));
  if (n < 2) dmin = sq.width();
  rep.f_min_distance = dmin;
  rep.f_ratio = dmin * N * N / sq.width();
  rep.f_degenerate_coincident = dmin == 0.0;
  rep.f_pass = rep.f_ratio >= 1.0;
  return rep;
}

}  // namespace potlab
