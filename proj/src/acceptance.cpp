#include "potlab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "potlab/atomizer.hpp"
#include "potlab/bergman.hpp"
#include "potlab/errors.hpp"
#include "potlab/ideals1d.hpp"
#include "potlab/quad.hpp"

namespace potlab {

NeutraliseSweep neutralise_sweep(const Scenario& s, const std::vector<long>& m_grid, const NeutraliseOptions& opts) {
  NeutraliseSweep out;
  out.decay_applies = !m_grid.empty();
  for (long m : m_grid) {
    out.rows.push_back(neutralise(s.weight, m, s.delta, opts));
    out.decay_applies = out.decay_applies && out.rows.back().gamma_res > 0.0;
  }
  const std::size_t half = (out.rows.size() + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) out.fitted_C_r = std::max(out.fitted_C_r, out.rows[i].I_m);
  fit_separation(out);
  return out;
}

void fit_separation(NeutraliseSweep& sweep) {
  sweep.sep_constant = 0.0;
  sweep.sep_ok.assign(sweep.rows.size(), true);
  bool fitted = false;
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& r = sweep.rows[i];
    if (r.small_nu_count < 2) continue;
    const double md = static_cast<double>(r.m);
    const double v = r.min_separation_small_nu * md * md;
    if (!fitted) {
      sweep.sep_constant = v;
      fitted = true;
    }
    sweep.sep_ok[i] = v >= sweep.sep_constant * (1.0 - 1e-12);
  }
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream o;
  o << (r.pass ? "[PASS] " : "[FAIL] ") << (r.id < 10 ? " " : "") << r.id << "  " << r.title;
  o.setf(std::ios::fixed);
  o.precision(1);
  o << "  (" << r.seconds << " s)";
  if (!r.detail.empty()) o << "  " << r.detail;
  return o.str();
}

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v, int digits = 4) {
  std::ostringstream o;
  o.precision(digits);
  o << v;
  return o.str();
}

struct Corpus {
  std::vector<Scenario> scenarios;
  std::vector<std::string> load_errors;
};

Corpus load_corpus(const std::string& dir) {
  Corpus c;
  for (const auto& p : list_scenarios(dir)) {
    try {
      c.scenarios.push_back(load_scenario(p));
    } catch (const ConfigError& e) {
      c.load_errors.push_back(e.what());
    }
  }
  return c;
}

struct SweepCache {
  const Corpus& corpus;
  const AcceptanceOptions& opts;
  std::map<std::string, NeutraliseSweep> sweeps;
  std::map<std::string, std::string> errors;
  bool done = false;

  void ensure() {
    if (done) return;
    done = true;
    NeutraliseOptions no;
    no.exec = opts.exec;
    for (const auto& s : corpus.scenarios) {
      const auto grid = (opts.m_grid ? *opts.m_grid : s.m_grid).values();
      try {
        sweeps[s.name] = neutralise_sweep(s, grid, no);
      } catch (const Error& e) {
        errors[s.name] = e.what();
      }
    }
  }
};

// ------------------------------------------------------------------ 1

PlanarMeasure random_measure(std::mt19937_64& rng, long N, Rect& square) {
  std::uniform_real_distribution<double> U(0, 1);
  std::uniform_int_distribution<int> G(1, 10), A(0, 5);
  const double side = 0.5 + 2.0 * U(rng);
  square = Rect::square({U(rng) - 0.5, U(rng) - 0.5}, side);
  auto inside = [&] { return Point2{square.x_min + side * U(rng), square.y_min + side * U(rng)}; };
  std::vector<Atom> atoms;
  double atom_total = 0;
  const int na = static_cast<int>(std::min<long>(A(rng), N - 1));
  for (int i = 0; i < na; ++i) {
    const double m = 0.05 + 0.9 * U(rng);
    atoms.push_back({inside(), m});
    atom_total += m;
  }
  const int nx = G(rng), ny = G(rng);
  const Point2 p = inside(), q = inside();
  DensityGrid g{{std::min(p.x, q.x), std::max(p.x, q.x), std::min(p.y, q.y), std::max(p.y, q.y)}, nx, ny, {}};
  if (g.rect.width() < 0.05 * side || g.rect.height() < 0.05 * side) g.rect = square;
  double s = 0;
  for (int i = 0; i < nx * ny; ++i) {
    g.cells.push_back(U(rng) < 0.25 ? 0.0 : U(rng));
    s += g.cells.back();
  }
  if (s == 0) {
    g.cells[0] = 1;
    s = 1;
  }
  for (auto& c : g.cells) c *= (static_cast<double>(N) - atom_total) / s;
  return PlanarMeasure(atoms, g, square);
}

const char* const kTitles[] = {
    "",
    "atomiser certificates on 200 random measures",
    "Σ m_j ≤ mγ(1+δ) on the corpus",
    "separation ≥ C/m² with C fixed at the first m",
    "I_m/m decays, I_m uniformly bounded, closed form πr²",
    "Jensen bound at 500 random samples, equality for one atom",
    "Lelong sandwich on 50 (ν, m), Demailly sandwich on the corpus",
    "sup|ψ_m| ~ log m and ∫_B dd^cψ_m ≤ C log m on zero-Lelong scenarios",
    "kernel monotone under restriction on 10 configurations",
    "inclusion chain on the exhaustive grid, order oracle",
    "quadrature closed forms and divergence detection",
};

CriterionResult criterion_1(const AcceptanceOptions& o) {
  CriterionResult r{1, kTitles[1], false, "", 0};
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<long> NN(2, 64);
  int certified = 0, f_ok = 0;
  std::ostringstream failures;
  AtomiseOptions ao;
  ao.exec = o.exec;
  const int runs = 200;
  for (int t = 0; t < runs; ++t) {
    const long N = NN(rng);
    Rect square;
    const auto mu = random_measure(rng, N, square);
    const auto res = atomise(mu, square, ao);
    const auto& c = res.certificates;
    certified += c.certified() && static_cast<long>(res.pieces.size()) == N;
    f_ok += c.f_ratio >= 1.0;
    if (!c.certified()) failures << " run " << t << " (N=" << N << ") uncertified;";
    else if (c.f_ratio < 1.0) failures << " run " << t << " f=" << fmt(c.f_ratio, 3) << ";";
  }
  r.pass = certified == runs && f_ok >= 0.95 * runs;
  r.detail = "(a)-(e) " + std::to_string(certified) + "/" + std::to_string(runs) + ", (f) ratio ≥ 1 on " +
             std::to_string(f_ok) + "/" + std::to_string(runs);
  if (f_ok < runs || certified < runs) r.detail += ";" + failures.str();
  return r;
}

// ------------------------------------------------------------------ 2, 3, 4

CriterionResult criterion_2(SweepCache& cache) {
  CriterionResult r{2, kTitles[2], true, "", 0};
  cache.ensure();
  long runs = 0, bad = 0;
  std::ostringstream d;
  for (const auto& [name, msg] : cache.errors) {
    r.pass = false;
    d << " " << name << ": " << msg << ";";
  }
  for (const auto& s : cache.corpus.scenarios) {
    auto it = cache.sweeps.find(s.name);
    if (it == cache.sweeps.end()) continue;
    for (const auto& row : it->second.rows) {
      ++runs;
      const bool ok = static_cast<double>(row.sum_mj) <= static_cast<double>(row.m) * row.gamma * (1.0 + row.delta) &&
                      row.bound_i_ok && row.all_points_in_disc;
      if (!ok) {
        ++bad;
        d << " " << s.name << " m=" << row.m << " Σm_j=" << row.sum_mj << ";";
      }
    }
  }
  r.pass = r.pass && bad == 0 && runs > 0;
  r.detail = std::to_string(runs - bad) + "/" + std::to_string(runs) + " runs over " +
             std::to_string(cache.corpus.scenarios.size()) + " scenarios;" + d.str();
  return r;
}

CriterionResult criterion_3(SweepCache& cache) {
  CriterionResult r{3, kTitles[3], true, "", 0};
  cache.ensure();
  std::ostringstream d;
  if (!cache.errors.empty()) {
    r.pass = false;
    d << " " << cache.errors.size() << " scenario(s) failed to run;";
  }
  for (const auto& s : cache.corpus.scenarios) {
    auto it = cache.sweeps.find(s.name);
    if (it == cache.sweeps.end()) continue;
    const auto& sw = it->second;
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sw.rows.size(); ++i) {
      ok = ok && sw.sep_ok[i];
      if (sw.rows[i].small_nu_count >= 2) {
        const double md = static_cast<double>(sw.rows[i].m);
        worst = std::min(worst, sw.rows[i].min_separation_small_nu * md * md);
      }
    }
    r.pass = r.pass && ok;
    d << " " << s.name << ": ";
    if (sw.sep_constant > 0.0) d << "C=" << fmt(sw.sep_constant) << " min sep·m²=" << fmt(worst);
    else d << "vacuous";
    d << (ok ? ";" : " FAILED;");
  }
  r.detail = d.str().empty() ? "" : d.str().substr(1);
  return r;
}

CriterionResult criterion_4(SweepCache& cache) {
  CriterionResult r{4, kTitles[4], true, "", 0};
  cache.ensure();
  std::ostringstream d;
  if (!cache.errors.empty()) {
    r.pass = false;
    d << " " << cache.errors.size() << " scenario(s) failed to run;";
  }
  for (const auto& s : cache.corpus.scenarios) {
    auto it = cache.sweeps.find(s.name);
    if (it == cache.sweeps.end()) continue;
    const auto& rows = it->second.rows;
    if (rows.empty()) continue;
    bool ok = true;
    double max_I = 0.0;
    for (const auto& row : rows) max_I = std::max(max_I, row.I_m);
    const bool bounded = max_I <= 2.0 * it->second.fitted_C_r;
    ok = ok && bounded;
    d << " " << s.name << ": max I_m/C(r)=" << fmt(max_I / it->second.fitted_C_r, 3);
    if (it->second.decay_applies) {
      bool mono = true;
      for (std::size_t i = 1; i < rows.size(); ++i)
        mono = mono && rows[i].I_m / static_cast<double>(rows[i].m) <= 1.05 * rows[i - 1].I_m / static_cast<double>(rows[i - 1].m);
      const double ratio = (rows.back().I_m / static_cast<double>(rows.back().m)) / (rows.front().I_m / static_cast<double>(rows.front().m));
      ok = ok && mono && ratio < 1e-2;
      d << ", decay " << (mono ? "monotone" : "NOT monotone") << ", final/initial=" << fmt(ratio, 3);
    }
    if (s.closed_form) {
      const double exact = M_PI * s.weight.domain.radius * s.weight.domain.radius;
      double worst = 0.0;
      for (const auto& row : rows) worst = std::max(worst, std::abs(row.I_m - exact) / exact);
      ok = ok && worst <= 1e-6;
      d << ", |I_m − πr²|/πr² ≤ " << fmt(worst, 2);
    }
    r.pass = r.pass && ok;
    d << (ok ? ";" : " FAILED;");
  }
  r.detail = d.str().empty() ? "" : d.str().substr(1);
  return r;
}

// ------------------------------------------------------------------ 5

CriterionResult criterion_5(const AcceptanceOptions& o) {
  CriterionResult r{5, kTitles[5], true, "", 0};
  std::mt19937_64 rng(o.seed + 5);
  std::uniform_real_distribution<double> U(0, 1);
  const Disc D{{0.03, -0.02}, 0.4};
  auto in_disc = [&](double frac) {
    const double rho = frac * D.radius * std::sqrt(U(rng)), th = 2 * M_PI * U(rng);
    return Point2{D.centre.x + rho * std::cos(th), D.centre.y + rho * std::sin(th)};
  };
  const double half = D.radius / std::sqrt(2.0) * 0.99;
  int passed = 0, total = 0;
  double worst_ratio = 0.0;
  for (int w = 0; w < 50; ++w) {
    std::vector<Atom> atoms;
    const int na = static_cast<int>(U(rng) * 4);
    for (int i = 0; i < na; ++i) atoms.push_back({in_disc(0.95), 0.02 + 0.25 * U(rng)});
    std::optional<DensityGrid> g;
    if (U(rng) < 0.8 || atoms.empty()) {
      const int n = 2 + static_cast<int>(U(rng) * 6);
      DensityGrid grid{{D.centre.x - half, D.centre.x + half, D.centre.y - half, D.centre.y + half}, n, n, {}};
      for (int i = 0; i < n * n; ++i) grid.cells.push_back(U(rng) * 0.6 / (n * n));
      g = grid;
    }
    const SubharmonicWeight sw{PlanarMeasure(atoms, g, D.bounding_square()), {{U(rng), U(rng)}}, D};
    for (int k = 0; k < 10; ++k) {
      const auto c = jensen_bound_check(sw, in_disc(0.99));
      ++total;
      passed += c.pass;
      worst_ratio = std::max(worst_ratio, c.lhs / c.rhs);
    }
  }
  double worst_eq = 0.0;
  for (int k = 0; k < 20; ++k) {
    const SubharmonicWeight one{PlanarMeasure({{in_disc(0.9), 0.05 + 0.9 * U(rng)}}, std::nullopt, D.bounding_square()), {}, D};
    const auto c = jensen_bound_check(one, in_disc(0.99));
    worst_eq = std::max(worst_eq, std::abs(c.lhs - c.rhs) / c.rhs);
  }
  r.pass = passed == total && worst_eq <= 1e-8;
  r.detail = std::to_string(passed) + "/" + std::to_string(total) + " pass, max lhs/rhs=" + fmt(worst_ratio, 6) +
             ", single-atom |lhs − rhs|/rhs ≤ " + fmt(worst_eq, 2);
  return r;
}

// ------------------------------------------------------------------ 6

CriterionResult criterion_6(const Corpus& corpus, const AcceptanceOptions& o) {
  CriterionResult r{6, kTitles[6], true, "", 0};
  std::mt19937_64 rng(o.seed + 6);
  std::uniform_real_distribution<double> U(0, 1);
  std::uniform_int_distribution<long> M(1, 200);
  BasisOptions bo;
  bo.exec = o.exec;
  bo.tol = 1e-10;
  int lelong_ok = 0;
  for (int t = 0; t < 50; ++t) {
    RadialProfile p;
    p.nu = t < 5 ? 0.25 * (t + 1) : 3.0 * U(rng);  // a few exact multiples first
    p.a = U(rng);
    const long m = M(rng);
    const auto b = build_basis(BergmanWeight::from_profile(p), {{0, 0}, 0.4}, m, 0, bo);
    const double nu_m = lelong_at_centre(b);
    const double md = static_cast<double>(m);
    lelong_ok += nu_m >= p.nu - 1.0 / md - 1e-12 && nu_m <= p.nu + 1e-12 &&
                 b.min_order == ideal_order(p.nu, md);
  }
  std::ostringstream d;
  d << "Lelong " << lelong_ok << "/50;";
  r.pass = lelong_ok == 50;
  for (const auto& s : corpus.scenarios) {
    const auto w = bergman_weight(s);
    const Disc& D = s.weight.domain;
    const auto pts = sandwich_points(s, w);
    try {
      const auto rep = sandwich_probe(w, D, s.grids.bergman_m, pts, s.grids.sandwich_r, bo);
      double lo = -1e300, hi = -1e300;
      for (const auto& row : rep.rows) {
        lo = std::max(lo, row.worst_lower);
        hi = std::max(hi, row.worst_upper);
      }
      r.pass = r.pass && rep.pass;
      d << " " << s.name << ": C1=" << fmt(rep.C1, 3) << " logC2=" << fmt(rep.log_C2, 3) << " slack " << fmt(lo, 2)
        << "/" << fmt(hi, 2) << (rep.pass ? ";" : " FAILED;");
    } catch (const Error& e) {
      r.pass = false;
      d << " " << s.name << ": " << e.what() << ";";
    }
  }
  r.detail = d.str();
  return r;
}

// ------------------------------------------------------------------ 7

CriterionResult criterion_7(const Corpus& corpus, const AcceptanceOptions& o) {
  CriterionResult r{7, kTitles[7], true, "", 0};
  BasisOptions bo;
  bo.exec = o.exec;
  std::ostringstream d;
  int count = 0;
  for (const auto& s : corpus.scenarios) {
    if (!s.zero_lelong) continue;
    ++count;
    try {
      const auto rows = mass_growth_probe(bergman_weight(s), s.weight.domain, s.grids.bergman_m, s.jet.subdisc, bo);
      // least squares y = α + β log m
      const double n = static_cast<double>(rows.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (const auto& row : rows) {
        const double x = std::log(static_cast<double>(row.m)), y = row.sup_abs_psi;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double beta = rows.size() > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
      const double alpha = (sy - beta * sx) / n;
      double resid = 0.0;
      for (const auto& row : rows) {
        const double fit = alpha + beta * std::log(static_cast<double>(row.m));
        resid = std::max(resid, std::abs(row.sup_abs_psi - fit) / std::abs(fit));
      }
      const double C = rows.front().mass / std::log(static_cast<double>(rows.front().m));
      bool mass_ok = true;
      for (const auto& row : rows) mass_ok = mass_ok && row.mass <= C * std::log(static_cast<double>(row.m)) * (1 + 1e-9);
      const bool ok = beta >= 0.0 && resid < 0.1 && mass_ok;
      r.pass = r.pass && ok;
      d << s.name << ": slope=" << fmt(beta, 3) << " resid=" << fmt(resid, 3) << " C=" << fmt(C, 3) << " sup";
      for (const auto& row : rows) d << " " << fmt(row.sup_abs_psi, 3);
      d << " masses";
      for (const auto& row : rows) d << " " << fmt(row.mass, 3);
      d << (ok ? "; " : " FAILED; ");
    } catch (const Error& e) {
      r.pass = false;
      d << s.name << ": " << e.what() << "; ";
    }
  }
  if (count == 0) {
    r.pass = false;
    d << "no zero-Lelong scenario in the corpus";
  }
  r.detail = d.str();
  return r;
}

// ------------------------------------------------------------------ 8

struct KernelConfig {
  std::string label;
  BergmanWeight w;
  long m;
  int p;
  Disc B, B0;
};

BergmanWeight smooth_off_centre(double nu, Point2 pole, double a) {
  BergmanWeight w;
  w.phi = [=](Point2 z) { return nu * std::log(distance(z, pole)) + a * z.x * z.x; };
  w.poles.push_back({pole, nu});
  return w;
}

CriterionResult criterion_8(const AcceptanceOptions& o) {
  CriterionResult r{8, kTitles[8], true, "", 0};
  const Disc omega{{0, 0}, 0.4};
  const Disc B{{0.05, 0.02}, 0.28}, B0{{0.05, 0.02}, 0.14};
  auto radial = [](double nu, double a, double b = 0.0, double cutoff = 0.0) {
    RadialProfile p;
    p.nu = nu;
    p.a = a;
    p.b = b;
    p.cutoff = cutoff;
    return BergmanWeight::from_profile(p);
  };
  SubharmonicWeight two{PlanarMeasure({{{0.1, 0.0}, 0.3}, {{-0.1, 0.1}, 0.45}}, std::nullopt, omega.bounding_square()), {}, omega};
  std::vector<KernelConfig> configs{
      {"flat p=0", radial(0, 0), 4, 0, B, B0},
      {"flat p=1", radial(0, 0), 4, 1, B, B0},
      {"pole .35 p=0", radial(0.35, 0.5), 10, 0, B, B0},
      {"pole .35 p=1", radial(0.35, 0.5), 10, 1, B, B0},
      {"pole .35 p=3", radial(0.35, 0.5), 10, 3, B, B0},
      {"off-centre p=0", smooth_off_centre(0.25, {0.1, -0.05}, 1.0), 8, 0, B, B0},
      {"off-centre p=1", smooth_off_centre(0.25, {0.1, -0.05}, 1.0), 8, 1, B, B0},
      {"sqrt-log p=1", radial(0, 0, 1.0, 1e-6), 8, 1, B, B0},
      {"smooth p=2", radial(0, 1.0), 16, 2, {{-0.1, 0.05}, 0.25}, {{-0.12, 0.04}, 0.12}},
      {"two atoms p=1", BergmanWeight::from_subharmonic(two), 6, 1, B, B0},
  };
  BasisOptions bo;
  bo.exec = o.exec;
  std::ostringstream d;
  long points = 0, violations = 0;
  double worst_excess = -1e300, worst_equal = 0.0;
  for (const auto& c : configs) {
    try {
      const auto k = kernel_comparison(c.w, omega, c.B, c.B0, c.m, c.p, 20, bo);
      const auto eq = kernel_comparison(c.w, omega, omega, c.B0, c.m, c.p, 20, bo);
      points += k.points;
      violations += k.violations;
      worst_excess = std::max(worst_excess, k.max_log_excess);
      worst_equal = std::max(worst_equal, std::abs(eq.max_log_excess));
      if (!k.pass) d << " " << c.label << ": " << k.violations << " violations;";
    } catch (const Error& e) {
      r.pass = false;
      d << " " << c.label << ": " << e.what() << ";";
    }
  }
  r.pass = r.pass && violations == 0 && worst_equal <= 1e-10;
  r.detail = std::to_string(points - violations) + "/" + std::to_string(points) + " points, max log B_Ω − log B_B=" +
             fmt(worst_excess, 3) + ", Ω = B deviation " + fmt(worst_equal, 2) + ";" + d.str();
  return r;
}

// ------------------------------------------------------------------ 9

CriterionResult criterion_9(const AcceptanceOptions& o) {
  CriterionResult r{9, kTitles[9], false, "", 0};
  const auto g = exhaustive_inclusion_grid();
  std::mt19937_64 rng(o.seed + 9);
  std::uniform_real_distribution<double> U(0, 3);
  std::uniform_int_distribution<long> M(1, 60);
  int agree = 0;
  for (int t = 0; t < 50; ++t) {
    const double nu = t < 5 ? 0.5 * t : std::round(U(rng) * 100) / 100;
    const long m = M(rng);
    agree += ideal_order(nu, static_cast<double>(m)) == ideal_order_by_quadrature(nu, static_cast<double>(m));
  }
  r.pass = g.right_failures == 0 && g.left_failures == 0 && agree == 50;
  std::ostringstream d;
  d << g.cases << " cases, right failures " << g.right_failures << ", left failures " << g.left_failures
    << ", oracle " << agree << "/50";
  if (!g.first_failures.empty()) {
    const auto& f = g.first_failures.front();
    d << "; first: ν=" << f.nu << " m0=" << f.m0 << " q=" << f.q << " ε=" << fmt(f.eps, 3) << " gives q·"
      << f.check.order_m0eps << " < " << f.check.order_m0q;
  }
  r.detail = d.str();
  return r;
}

// ------------------------------------------------------------------ 10

CriterionResult criterion_10(const AcceptanceOptions& o) {
  CriterionResult r{10, kTitles[10], true, "", 0};
  QuadOptions q;
  q.tol = 1e-10;
  q.exec = o.exec;
  double worst = 0.0;
  for (double s : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    std::vector<Singularity> sing;
    if (s > 0) sing.push_back({{0, 0}, s});
    const auto v = integrate_disc([s](Point2 z) { return std::pow(z.x * z.x + z.y * z.y, -s); }, {{0, 0}, 1.0}, sing, q);
    worst = std::max(worst, std::abs(v.value - M_PI / (1 - s)) / (M_PI / (1 - s)));
  }
  for (double rad : {0.1, 0.4, 2.5}) {
    const auto v = integrate_disc([](Point2) { return 1.0; }, {{0.3, -0.2}, rad}, {}, q);
    worst = std::max(worst, std::abs(v.value - M_PI * rad * rad) / (M_PI * rad * rad));
  }
  std::mt19937_64 rng(o.seed + 10);
  std::uniform_real_distribution<double> U(0, 1);
  int bound_ok = 0;
  for (int t = 0; t < 20; ++t) {
    const double rr = 0.05 + 0.4 * U(rng), tau = 0.05 + 1.9 * U(rng), ang = 2 * M_PI * U(rng), rad = 1.5 * rr * U(rng);
    const Point2 a{rad * std::cos(ang), rad * std::sin(ang)};
    const auto v = integrate_disc(
        [&](Point2 x) { return (x.x * x.x + x.y * x.y) * std::pow(std::hypot(x.x - a.x, x.y - a.y), -tau); }, {{0, 0}, rr},
        {{a, tau / 2}}, q);
    const double A = rad + rr;
    bound_ok += v.value > 0 && v.value <= 4 * M_PI * std::pow(A, 2 - tau) * (A * A / (4 - tau) + rad * rad / (2 - tau));
  }
  int diverged = 0;
  for (double s : {1.0, 1.2}) {
    try {
      integrate_disc([s](Point2 z) { return std::pow(z.x * z.x + z.y * z.y, -s); }, {{0, 0}, 1.0}, {{{0, 0}, s}}, q);
    } catch (const DivergenceDetected&) {
      ++diverged;
    }
  }
  r.pass = worst <= 1e-8 && bound_ok == 20 && diverged == 2;
  r.detail = "max relative error " + fmt(worst, 2) + ", model bound " + std::to_string(bound_ok) + "/20, divergence " +
             std::to_string(diverged) + "/2";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  const Corpus corpus = load_corpus(opts.scenario_dir);
  if (!corpus.load_errors.empty()) throw ConfigError(opts.scenario_dir, corpus.load_errors.front());
  if (corpus.scenarios.empty()) throw ConfigError(opts.scenario_dir, "no scenarios found");
  SweepCache cache{corpus, opts, {}, {}, false};
  const std::vector<std::function<CriterionResult()>> all{
      [&] { return criterion_1(opts); },          [&] { return criterion_2(cache); },
      [&] { return criterion_3(cache); },         [&] { return criterion_4(cache); },
      [&] { return criterion_5(opts); },          [&] { return criterion_6(corpus, opts); },
      [&] { return criterion_7(corpus, opts); }, [&] { return criterion_8(opts); },
      [&] { return criterion_9(opts); },          [&] { return criterion_10(opts); },
  };
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) {
    if (!opts.only.empty() && !opts.only.count(id)) continue;
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = all[id - 1]();
    } catch (const Error& e) {
      r.id = id;
      r.title = kTitles[id];
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    } catch (const std::exception& e) {
      r.id = id;
      r.title = kTitles[id];
      r.pass = false;
      r.detail = std::string("unexpected error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.push_back(r);
  }
  return out;
}

}  // namespace potlab
