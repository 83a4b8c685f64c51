#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "potlab/atomizer.hpp"
#include "potlab/errors.hpp"

using namespace potlab;

namespace {

const Rect kUnit{0, 1, 0, 1};

PlanarMeasure uniform(double total, int n = 4, std::vector<Atom> atoms = {}) {
  DensityGrid g{kUnit, n, n, std::vector<double>(static_cast<std::size_t>(n) * n, total / (n * n))};
  return PlanarMeasure(std::move(atoms), g, kUnit);
}

PlanarMeasure random_measure(std::mt19937_64& rng, long N) {
  std::uniform_real_distribution<double> U(0, 1);
  std::uniform_int_distribution<int> G(1, 10), A(0, 5);
  std::vector<Atom> atoms;
  double atom_total = 0;
  const int na = std::min<long>(A(rng), N - 1);
  for (int i = 0; i < na; ++i) {
    const double m = 0.05 + 0.9 * U(rng);
    atoms.push_back({{U(rng), U(rng)}, m});
    atom_total += m;
  }
  const int nx = G(rng), ny = G(rng);
  DensityGrid g{{0.1 * U(rng), 1 - 0.1 * U(rng), 0.1 * U(rng), 1 - 0.1 * U(rng)}, nx, ny, {}};
  double s = 0;
  for (int i = 0; i < nx * ny; ++i) {
    g.cells.push_back(U(rng) < 0.25 ? 0.0 : U(rng));
    s += g.cells.back();
  }
  if (s == 0) {
    g.cells[0] = 1;
    s = 1;
  }
  for (auto& c : g.cells) c *= (N - atom_total) / s;
  return PlanarMeasure(atoms, g, kUnit);
}

// brute-force scan of axis-parallel cut coordinates for a split (k, N-k) that keeps every atom whole
bool whole_atom_cut_exists(const PlanarMeasure& mu, long k) {
  for (int axis = 0; axis < 2; ++axis)
    for (int i = 0; i <= 100000; ++i) {
      const double t = i / 100000.0;
      const Rect lower = axis == 0 ? Rect{0, t, 0, 1} : Rect{0, 1, 0, t};
      double m = mu.mass_on(lower);
      // atoms on the line counted on the lower side by mass_on; also try them on the upper side
      double on_line = 0;
      for (auto& a : mu.atoms())
        if ((axis == 0 ? a.at.x : a.at.y) == t) on_line += a.mass;
      if (std::abs(m - k) < 1e-6 || std::abs(m - on_line - k) < 1e-6) return true;
    }
  return false;
}

}  // namespace

TEST_CASE("uniform mass 4 gives four certified unit pieces") {
  auto r = atomise(uniform(4.0), kUnit);
  REQUIRE(r.pieces.size() == 4);
  for (auto& p : r.pieces) CHECK(p.piece.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.certificates.certified());
  CHECK(r.certificates.e_max_multiplicity == 1);
  CHECK(r.certificates.b_cover_fraction == doctest::Approx(1.0));
  CHECK(r.cuts == 3);
}

TEST_CASE("unit mass is a single piece on the square") {
  auto r = atomise(uniform(1.0), kUnit);
  REQUIRE(r.pieces.size() == 1);
  CHECK(r.pieces[0].container == kUnit);
  CHECK(r.certificates.certified());
}

TEST_CASE("a double atom becomes two degenerate pieces") {
  const Point2 p{0.3, 0.6};
  PlanarMeasure mu({{p, 2.0}}, std::nullopt, kUnit);
  auto r = atomise(mu, kUnit);
  REQUIRE(r.pieces.size() == 2);
  for (auto& piece : r.pieces) {
    CHECK(piece.support == Rect::point(p));
    CHECK(piece.piece.atoms().size() == 1);
  }
  CHECK(r.certificates.certified());
  CHECK(r.certificates.f_degenerate_coincident);
  CHECK(r.certificates.f_min_distance == 0.0);
}

TEST_CASE("cuts by cumulative-mass inversion") {
  auto c2 = recursive_cut(uniform(2.0), kUnit, 2);
  CHECK(c2.axis == 0);
  CHECK(c2.t == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c2.left.mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c2.right.mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

  auto c3 = recursive_cut(uniform(3.0, 3), kUnit, 3);
  CHECK(c3.k == 1);
  CHECK(c3.t == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(c3.left.mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c3.right.mu.total_mass() == doctest::Approx(2.0).epsilon(1e-14));
  for (auto* s : {&c3.left, &c3.right}) {
    REQUIRE(s->container.aspect());
    CHECK(*s->container.aspect() <= 3.0);
    CHECK(kUnit.contains(s->container));
  }
}

TEST_CASE("heavy atom near the edge: every whole-atom cut is infeasible, so the atom is split") {
  auto mu = uniform(1.1, 4, {{{0.1, 0.5}, 0.9}});
  CHECK_FALSE(whole_atom_cut_exists(mu, 1));
  AtomiseOptions strict;
  strict.allow_atom_split = false;
  CHECK_THROWS_AS(recursive_cut(mu, kUnit, 2, strict), CutInfeasible);
  auto c = recursive_cut(mu, kUnit, 2);
  CHECK(c.split_atom);
  CHECK(c.left.mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.right.mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  auto r = atomise(mu, kUnit);
  CHECK(r.certificates.certified());
}

TEST_CASE("collinear atoms are assigned in order along the cut line") {
  PlanarMeasure mu({{{0.5, 0.2}, 0.5}, {{0.5, 0.4}, 0.5}, {{0.5, 0.6}, 0.5}, {{0.5, 0.8}, 0.5}}, std::nullopt, kUnit);
  auto r = atomise(mu, kUnit);
  REQUIRE(r.pieces.size() == 2);
  CHECK(r.certificates.certified());
  CHECK(r.pieces[0].support == Rect{0.5, 0.5, 0.2, 0.4});
  CHECK(r.pieces[1].support == Rect{0.5, 0.5, 0.6, 0.8});
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(atomise(uniform(2.5), kUnit), NonIntegerMass);
  CHECK_THROWS_AS(atomise(PlanarMeasure({}, std::nullopt, kUnit), kUnit), EmptyMeasure);
  CHECK_NOTHROW(atomise(uniform(3.0 + 1e-11), kUnit));
}

TEST_CASE("corrupted piece mass is caught by certificate (a)") {
  auto r = atomise(uniform(4.0), kUnit);
  r.pieces[2].piece = scale(r.pieces[2].piece, 1.5);
  auto rep = verify_certificates(r);
  CHECK_FALSE(rep.a_pass);
  CHECK(rep.a_max_mass_deviation == doctest::Approx(0.5));
  CHECK(rep.c_pass);
}

TEST_CASE("overlap multiplicity sweep") {
  std::vector<Rect> rs{{0, 2, 0, 2}, {1, 3, 1, 3}, {1.5, 2.5, 0, 4}, {2, 4, 0, 1}};
  CHECK(overlap_multiplicity(rs, Exec::serial) == 3);
  std::vector<Rect> touching{{0, 1, 0, 1}, {1, 2, 0, 1}, {0, 1, 1, 2}, {1, 2, 1, 2}};
  double area = 0;
  CHECK(overlap_multiplicity(touching, Exec::serial, &area) == 1);
  CHECK(area == doctest::Approx(4.0));
  // brute-force check on random rectangles
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<Rect> rr;
    for (int i = 0; i < 15; ++i) {
      const double a = std::round(U(rng) * 20) / 20, b = std::round(U(rng) * 20) / 20;
      const double c = std::round(U(rng) * 20) / 20, d = std::round(U(rng) * 20) / 20;
      rr.push_back({std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d)});
    }
    int brute = 0;
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j) {
        const Point2 p{(i + 0.5) / 40, (j + 0.5) / 40};
        int c = 0;
        for (auto& r : rr) c += r.contains_interior(p);
        brute = std::max(brute, c);
      }
    CHECK(overlap_multiplicity(rr, Exec::serial) == brute);
    CHECK(overlap_multiplicity(rr, Exec::parallel) == brute);
  }
}

TEST_CASE("grown containers are almost squares inside the parent") {
  auto w = grow_container({0.1, 0.2, 0.0, 0.9}, kUnit);
  CHECK(w.x_min == 0.0);
  CHECK(w.x_max == doctest::Approx(0.3).epsilon(1e-11));
  CHECK(w.y_min == 0.0);
  CHECK(w.y_max == 0.9);
  CHECK(*w.aspect() <= 3.0);
  auto g = grow_container({0.45, 0.45, 0.2, 0.8}, kUnit);
  REQUIRE(g.aspect());
  CHECK(*g.aspect() <= 3.0);
  CHECK(g.contains(Rect{0.45, 0.45, 0.2, 0.8}));
}

TEST_CASE("random measures: exact decomposition and certificates") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long> NN(2, 64);
  int f_ok = 0;
  const int runs = 60;
  for (int t = 0; t < runs; ++t) {
    const long N = NN(rng);
    auto mu = random_measure(rng, N);
    auto r = atomise(mu, kUnit);
    const auto& c = r.certificates;
    INFO("run " << t << " N=" << N);
    CHECK(c.a_pass);
    CHECK(c.b_pass);
    CHECK(c.c_pass);
    CHECK(c.d_pass);
    CHECK(c.e_pass);
    CHECK(r.cuts == N - r.peeled - 1);
    f_ok += c.f_pass;
    auto serial = verify_certificates(r, Exec::serial);
    CHECK(serial.e_max_multiplicity == c.e_max_multiplicity);
    CHECK(serial.f_min_distance == c.f_min_distance);
  }
  CHECK(f_ok >= runs * 95 / 100);
}

TEST_CASE("serial and parallel atomisation agree") {
  std::mt19937_64 rng(99);
  auto mu = random_measure(rng, 50);
  AtomiseOptions s;
  s.exec = Exec::serial;
  auto a = atomise(mu, kUnit, s);
  auto b = atomise(mu, kUnit);
  REQUIRE(a.pieces.size() == b.pieces.size());
  for (std::size_t i = 0; i < a.pieces.size(); ++i) {
    CHECK(a.pieces[i].container == b.pieces[i].container);
    CHECK(a.pieces[i].support == b.pieces[i].support);
  }
}
