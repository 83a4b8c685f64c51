#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "potlab/errors.hpp"
#include "potlab/potential.hpp"
#include "potlab/quad.hpp"

using namespace potlab;

namespace {

// ∫_R |ζ − z|^{−2s} dA by polar integration about z: the radial part is closed
// form and the angular integrand is smooth between the directions of the corners.
double polar_oracle(const Rect& r, Point2 z, double s) {
  auto rho_max = [&](double th) {
    const double c = std::cos(th), sn = std::sin(th);
    double t = std::numeric_limits<double>::infinity();
    if (c > 0) t = std::min(t, (r.x_max - z.x) / c);
    if (c < 0) t = std::min(t, (r.x_min - z.x) / c);
    if (sn > 0) t = std::min(t, (r.y_max - z.y) / sn);
    if (sn < 0) t = std::min(t, (r.y_min - z.y) / sn);
    return std::max(t, 0.0);
  };
  std::vector<double> cuts{0, 2 * M_PI};
  for (double x : {r.x_min, r.x_max})
    for (double y : {r.y_min, r.y_max}) {
      double a = std::atan2(y - z.y, x - z.x);
      if (a < 0) a += 2 * M_PI;
      cuts.push_back(a);
    }
  for (double a : {0.0, M_PI / 2, M_PI, 1.5 * M_PI}) cuts.push_back(a);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i])
      sum += integrate_1d([&](double th) { return std::pow(rho_max(th), 2 - 2 * s) / (2 - 2 * s); }, cuts[i],
                          cuts[i + 1], {.tol = 1e-13})
                 .value;
  return sum;
}

SubharmonicWeight atom_weight(std::vector<Atom> atoms, Disc d) {
  return {PlanarMeasure(std::move(atoms), std::nullopt, d.bounding_square()), {}, d};
}

}  // namespace

TEST_CASE("weight evaluation") {
  auto w = atom_weight({{{0, 0}, 1.0}}, {{0, 0}, 0.4});
  CHECK(eval_weight(w, {0.3, 0}) == doctest::Approx(std::log(0.3)).epsilon(1e-15));
  CHECK(eval_weight(w, {0, -0.3}) == doctest::Approx(std::log(0.3)).epsilon(1e-15));
  CHECK(std::isinf(eval_weight(w, {0, 0})));

  SubharmonicWeight c{PlanarMeasure(), {{0.7, -2.0}}, {{0.1, 0.1}, 0.3}};
  CHECK(eval_weight(c, {0.2, 0.0}) == 0.7);
  SubharmonicWeight lin{PlanarMeasure(), {{0, 0}, {2.0, 1.0}}, {{0.1, 0.1}, 0.3}};
  // Re((2 + i)(z − x₀)) at z − x₀ = 0.1 + 0.2i  → 0.2 − 0.2
  CHECK(eval_weight(lin, {0.2, 0.3}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(SubharmonicWeight({PlanarMeasure(), {}, {{0, 0}, 0.5}}).validate(), DomainError);
}

TEST_CASE("power integral over rectangles against the polar oracle") {
  const Rect r{-0.1, 0.2, -0.15, 0.05};
  for (double s : {0.1, 0.5, 0.9})
  {
    for (Point2 z : {Point2{0, 0}, Point2{0.2, -0.1}, Point2{-0.1, -0.15}})
      CHECK(rect_power_integral(r, z, s) == doctest::Approx(polar_oracle(r, z, s)).epsilon(1e-10));
    // outside the rectangle the integrand is smooth
    const Point2 far{0.3, 0.2};
    auto q = integrate_rect([&](Point2 p) { return std::pow(distance(p, far), -2 * s); }, r, {.tol = 1e-12});
    CHECK(rect_power_integral(r, far, s) == doctest::Approx(q.value).epsilon(1e-10));
  }
}

TEST_CASE("Jensen equality for a point mass") {
  auto w = atom_weight({{{0, 0}, 1.0}}, {{0, 0}, 0.45});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  for (int t = 0; t < 20; ++t) {
    const Point2 z{U(rng), U(rng)};
    auto j = jensen_bound_check(w, z);
    CHECK(j.gamma == 1.0);
    CHECK(std::abs(j.lhs - j.rhs) <= 1e-8 * j.rhs);
    CHECK(j.pass);
  }
}

TEST_CASE("Jensen bound for two atoms") {
  auto w = atom_weight({{{-0.2, 0}, 0.4}, {{0.2, 0}, 0.4}}, {{0, 0}, 0.45});
  for (Point2 z : {Point2{0, 0}, Point2{0.05, 0.1}, Point2{-0.15, -0.02}}) {
    auto j = jensen_bound_check(w, z);
    const double da = std::hypot(z.x + 0.2, z.y), db = std::hypot(z.x - 0.2, z.y);
    CHECK(j.lhs == doctest::Approx(std::pow(da, -0.8) * std::pow(db, -0.8)).epsilon(1e-13));
    CHECK(j.rhs == doctest::Approx((0.4 * std::pow(da, -1.6) + 0.4 * std::pow(db, -1.6)) / 0.8).epsilon(1e-13));
    CHECK(j.pass);
  }
}

TEST_CASE("Jensen bound for a uniform density") {
  const Disc d{{0, 0}, 0.4};
  const double h = 0.4 / std::sqrt(2.0) * 0.999;
  const Rect sq{-h, h, -h, h};
  DensityGrid g{sq, 3, 3, std::vector<double>(9, 0.5 / 9)};
  SubharmonicWeight w{PlanarMeasure({}, g, d.bounding_square()), {}, d};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-0.25, 0.25);
  for (int t = 0; t < 10; ++t) {
    const Point2 z{U(rng), U(rng)};
    auto j = jensen_bound_check(w, z);
    CHECK(j.gamma == doctest::Approx(0.5).epsilon(1e-12));
    const double rhs = 0.5 / sq.area() * polar_oracle(sq, z, 0.5) / 0.5;
    CHECK(j.rhs == doctest::Approx(rhs).epsilon(1e-9));
    CHECK(j.pass);
  }
}

TEST_CASE("Jensen check preconditions") {
  SubharmonicWeight w{PlanarMeasure(), {}, {{0, 0}, 0.3}};
  CHECK_THROWS_AS(jensen_bound_check(w, {0.1, 0}), ZeroMass);
  SubharmonicWeight outside{PlanarMeasure({{{0.35, 0}, 0.5}, {{0, 0}, 0.5}}, std::nullopt), {}, {{0, 0}, 0.3}};
  CHECK_THROWS_AS(jensen_bound_check(outside, {0.1, 0}), DomainError);
}

TEST_CASE("sub-mean-value inequality") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0, 1);
  const Disc d{{0, 0}, 0.45};
  DensityGrid g{{-0.3, 0.3, -0.3, 0.3}, 4, 4, {}};
  for (int i = 0; i < 16; ++i) g.cells.push_back(0.1 * U(rng));
  SubharmonicWeight w{PlanarMeasure({{{0.05, -0.1}, 0.3}, {{-0.2, 0.15}, 0.6}}, g, d.bounding_square()),
                      {{0.2, 0}, {0.5, -0.3}},
                      d};
  for (int t = 0; t < 100; ++t) {
    const double a = 2 * M_PI * U(rng), rr = 0.3 * U(rng);
    const Point2 z{rr * std::cos(a), rr * std::sin(a)};
    const double rad = 0.01 + 0.1 * U(rng);
    auto mean = integrate_1d(
        [&](double th) { return eval_weight(w, {z.x + rad * std::cos(th), z.y + rad * std::sin(th)}); }, 0,
        2 * M_PI, {.tol = 1e-10});
    CHECK(eval_weight(w, z) <= mean.value / (2 * M_PI) + 1e-6);
  }
}
