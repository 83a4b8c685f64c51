#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "potlab/bergman.hpp"
#include "potlab/errors.hpp"

using namespace potlab;

namespace {

const Disc kDisc{{0, 0}, 0.4};

RadialProfile profile(double nu, double a, double b = 0.0, double cutoff = 0.0) {
  RadialProfile p;
  p.nu = nu;
  p.a = a;
  p.b = b;
  p.cutoff = cutoff;
  return p;
}

BergmanWeight without_radial_model(BergmanWeight w) {
  w.radial.reset();
  return w;
}

// φ = ν log|z − p| + a·x², not radial about any point
BergmanWeight off_centre(double nu, Point2 p, double a) {
  BergmanWeight w;
  w.phi = [=](Point2 z) { return nu * std::log(distance(z, p)) + a * z.x * z.x; };
  w.poles.push_back({p, nu});
  return w;
}

}  // namespace

TEST_CASE("monomial norms for the zero weight on the unit disc") {
  const auto w = BergmanWeight::from_profile(profile(0, 0));
  const auto b = build_basis(w, {{0, 0}, 1.0}, 5, 12);
  CHECK(b.radial);
  CHECK(b.min_order == 0);
  for (int k = 0; k <= 12; ++k) CHECK(std::exp(b.log_norm_sq[k]) == doctest::Approx(M_PI / (k + 1)).epsilon(1e-12));
}

TEST_CASE("orders excluded by a pole at the centre") {
  const auto w = BergmanWeight::from_profile(profile(0.35, 0.5));
  const auto b = build_basis(w, kDisc, 10, 6);
  CHECK(b.min_order == 3);
  CHECK(b.excluded_orders == std::vector<long>{0, 1, 2});
  CHECK(lelong_at_centre(b) == doctest::Approx(0.3));
  // the first admissible monomial: ∫ ρ^{2·3 − 7} over the disc with the smooth factor
  const double md = 10, e1 = 2 * 3 + 2 - 2 * md * 0.35;
  CHECK(e1 == doctest::Approx(1.0));
}

TEST_CASE("Bergman kernel of the disc") {
  const auto w = BergmanWeight::from_profile(profile(0, 0));
  const auto ab = adaptive_basis(w, kDisc, 4, 0.25, 1e-12);
  CHECK(ab.converged);
  const double R2 = kDisc.radius * kDisc.radius;
  double prev = -1e300;
  for (double rho : {0.0, 0.05, 0.1, 0.15, 0.2, 0.25}) {
    const double k = std::exp(log_kernel(ab.basis, {rho * 0.6, rho * 0.8}));
    CHECK(k == doctest::Approx(R2 / (M_PI * (R2 - rho * rho) * (R2 - rho * rho))).epsilon(1e-9));
    CHECK(k > prev);
    prev = k;
  }
}

TEST_CASE("radial and Gram paths agree") {
  const auto w = BergmanWeight::from_profile(profile(0.35, 0.5));
  BasisOptions o;
  const auto r = build_basis(w, kDisc, 10, 12, o);
  const auto g = build_basis(without_radial_model(w), kDisc, 10, 12, o);
  CHECK_FALSE(g.radial);
  CHECK(g.min_order == 3);
  // a radial weight makes the scaled Gram matrix the identity
  CHECK(g.condition == doctest::Approx(1.0).epsilon(1e-9));
  for (Point2 z : {Point2{0.1, 0.05}, Point2{-0.2, 0.1}, Point2{0.0, -0.3}})
    for (int p : {0, 1, 3}) CHECK(log_kernel(r, z, p) == doctest::Approx(log_kernel(g, z, p)).epsilon(1e-9));
}

TEST_CASE("orthonormality by independent quadrature") {
  const auto rw = BergmanWeight::from_profile(profile(0.35, 0.5));
  const auto r = build_basis(rw, kDisc, 10, 10);
  CHECK(orthonormality_defect(r, rw, 6) <= 1e-8);

  const auto w = off_centre(0.25, {0.1, -0.05}, 1.0);
  const auto g = build_basis(w, kDisc, 8, 10);
  CHECK_FALSE(g.radial);
  REQUIRE(g.prefactor_roots.size() == 1);
  CHECK(g.prefactor_roots[0].second == 2);
  CHECK(g.condition > 1.0);
  CHECK(orthonormality_defect(g, w, 6) <= 1e-8);
}

TEST_CASE("jet kernels") {
  const auto w = BergmanWeight::from_profile(profile(0.35, 0.5));
  const auto b = build_basis(w, kDisc, 10, 12);
  for (Point2 z : {Point2{0.1, 0.05}, Point2{-0.2, 0.1}}) {
    CHECK(std::abs(jet_psi_m(b, z, 0, JetVariant::plain) - demailly_phi_m(b, z)) <= 1e-12);
    // more derivatives, larger kernel; the Taylor weights only shrink terms
    CHECK(log_kernel(b, z, 2) > log_kernel(b, z, 1));
    CHECK(log_kernel(b, z, 2, JetVariant::taylor) <= log_kernel(b, z, 2) + 1e-12);
    CHECK(log_kernel(b, z, 1, JetVariant::taylor) == doctest::Approx(log_kernel(b, z, 1)).epsilon(1e-13));
  }
  // every section vanishes to order 3 at the pole: jets below 3 see nothing
  CHECK(std::isinf(log_kernel(b, kDisc.centre, 2)));
  CHECK(std::isfinite(log_kernel(b, kDisc.centre, 3)));
  const auto g = build_basis(without_radial_model(w), kDisc, 10, 12);
  CHECK(log_kernel(g, kDisc.centre, 3) == doctest::Approx(log_kernel(b, kDisc.centre, 3)).epsilon(1e-9));
  CHECK_THROWS_AS(log_kernel(b, {0.1, 0}, -1), DomainError);
}

TEST_CASE("Lelong sandwich for a radial weight") {
  const auto w = BergmanWeight::from_profile(profile(0.35, 0.5));
  std::vector<Point2> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({0.2 * std::cos(i * 0.8), 0.2 * std::sin(i * 0.8)});
  pts.push_back({0.05, 0.0});
  const auto rep = sandwich_probe(w, kDisc, {8, 16, 32}, pts, 0.1);
  CHECK(rep.pass);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(row.lelong_ok);
    CHECK(row.lelong <= 0.35);
  }
  CHECK_THROWS_AS(sandwich_probe(w, kDisc, {8}, {{0.35, 0}}, 0.1), DomainError);
}

TEST_CASE("ψ_m for a smooth weight tends to its mass") {
  const auto w = BergmanWeight::from_profile(profile(0, 1.0));
  const Disc B{{0, 0}, 0.2};
  // dd^c(ρ²) = (2/π) dA, so the mass on B is 2·0.04
  CHECK(flux_mass([](Point2 z) { return z.x * z.x + z.y * z.y; }, B) == doctest::Approx(0.08).epsilon(1e-6));
  const auto rows = mass_growth_probe(w, kDisc, {8, 32}, B);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(std::isfinite(r.sup_abs_psi));
  CHECK(std::abs(rows[1].mass - 0.08) < std::abs(rows[0].mass - 0.08));
}

TEST_CASE("kernel monotone in the domain") {
  const auto w = off_centre(0.2, {0.05, 0.0}, 0.5);
  const Disc B{{0.05, 0.02}, 0.2}, B0{{0.05, 0.02}, 0.1};
  const auto c = kernel_comparison(w, kDisc, B, B0, 8, 1, 6);
  CHECK(c.points > 0);
  CHECK(c.violations == 0);
  CHECK(c.max_log_excess < 0.0);
  const auto same = kernel_comparison(w, kDisc, kDisc, {{0, 0}, 0.2}, 8, 1, 6);
  CHECK(same.max_log_excess == 0.0);
  CHECK(same.pass);
}

TEST_CASE("radial norms stay finite at high degree with a tiny cutoff") {
  const auto w = BergmanWeight::from_profile(profile(0, 0, 1.0, 1e-6));
  const auto b = build_basis(w, kDisc, 256, 40);
  REQUIRE(b.radial);
  for (double v : b.log_norm_sq) CHECK(std::isfinite(v));
  CHECK(std::isfinite(demailly_phi_m(b, {0.1, 0.05})));
}

TEST_CASE("a cut-off peak off the disc centre") {
  // the radial model is about the origin, not the disc centre
  const auto w = BergmanWeight::from_profile(profile(0, 0, 1.0, 1e-6));
  const Disc D{{0.05, 0.02}, 0.28};
  const auto b = build_basis(w, D, 8, 6);
  CHECK_FALSE(b.radial);
  CHECK(orthonormality_defect(b, w, 4) < 1e-6);
}

TEST_CASE("two poles on an off-centre disc") {
  BergmanWeight w;
  const Point2 p1{0.1, 0}, p2{-0.1, 0.1};
  w.phi = [=](Point2 z) { return 0.3 * std::log(distance(z, p1)) + 0.45 * std::log(distance(z, p2)); };
  w.poles = {{p1, 0.3}, {p2, 0.45}};
  const Disc D{{0.05, 0.02}, 0.28};
  const auto b = build_basis(w, D, 6, 6);
  // P vanishes to order 1 at p1 (6·0.3 = 1.8) and 2 at p2 (6·0.45 = 2.7)
  long total = 0;
  for (const auto& [u, k] : b.prefactor_roots) total += k;
  CHECK(total == 3);
  CHECK(orthonormality_defect(b, w, 4) < 1e-6);
  CHECK(std::isfinite(log_kernel(b, {0.0, -0.05}, 1)));
}

TEST_CASE("the upper sandwich constant respects the mean-value bound") {
  const auto w = BergmanWeight::from_profile(profile(0.35, 0.5));
  const std::vector<Point2> pts{{0.1, 0.0}, {-0.05, 0.12}, {0.0, -0.2}};
  const auto rep = sandwich_probe(w, kDisc, {8, 16}, pts, 0.05);
  CHECK(rep.log_C2 <= -0.5 * std::log(M_PI) + 1e-7);
  for (const auto& row : rep.rows) CHECK(row.worst_upper <= 1e-7);
}
