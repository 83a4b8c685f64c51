#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "potlab/errors.hpp"
#include "potlab/measure.hpp"
#include "potlab/measure_io.hpp"
#include "potlab/quad.hpp"

using namespace potlab;

namespace {

DensityGrid uniform_grid(Rect r, int n, double total) {
  DensityGrid g{r, n, n, std::vector<double>(static_cast<std::size_t>(n) * n, total / (n * n))};
  return g;
}

DensityGrid random_grid(std::mt19937_64& rng, Rect r, int nx, int ny) {
  std::uniform_real_distribution<double> U(0, 1);
  DensityGrid g{r, nx, ny, {}};
  for (int i = 0; i < nx * ny; ++i) g.cells.push_back(U(rng) < 0.2 ? 0.0 : U(rng));
  return g;
}

}  // namespace

TEST_CASE("rectangle and disc masses") {
  PlanarMeasure u({}, uniform_grid({0, 1, 0, 1}, 8, 1.0));
  CHECK(u.mass_on(Rect{0, 0.5, 0, 0.5}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(u.mass_on(Rect{-1, 2, -1, 2}) == doctest::Approx(1.0).epsilon(1e-15));
  for (int n : {1, 3, 7, 16}) {
    PlanarMeasure m({}, uniform_grid({0, 1, 0, 1}, n, 1.0));
    CHECK(std::abs(m.mass_on(Disc{{0.5, 0.5}, 0.5}) - M_PI / 4) <= 1e-10 * M_PI / 4);
  }
  PlanarMeasure a({{{0.5, 0.5}, 2.0}}, std::nullopt, Rect{0, 1, 0, 1});
  CHECK(a.mass_on(Rect{0, 1, 0, 1}) == 2.0);
  CHECK(a.mass_on(Disc{{0.5, 0.6}, 0.05}) == 0.0);
}

TEST_CASE("disc area of a rectangle agrees with direct quadrature") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 50; ++t) {
    Rect r{U(rng), 0, U(rng), 0};
    r.x_max = r.x_min + 0.05 + std::abs(U(rng));
    r.y_max = r.y_min + 0.05 + std::abs(U(rng));
    Disc d{{0.3 * U(rng), 0.3 * U(rng)}, 0.2 + std::abs(U(rng))};
    // independent oracle: integrate the chord length of the disc over x
    auto chord = [&](double x) {
      const double h2 = d.radius * d.radius - (x - d.centre.x) * (x - d.centre.x);
      if (h2 <= 0) return 0.0;
      const double h = std::sqrt(h2);
      const double lo = std::max(r.y_min, d.centre.y - h), hi = std::min(r.y_max, d.centre.y + h);
      return std::max(0.0, hi - lo);
    };
    // breakpoints make the integrand smooth on each piece
    std::vector<double> cuts{std::max(r.x_min, d.centre.x - d.radius), std::min(r.x_max, d.centre.x + d.radius)};
    for (double y : {r.y_min, r.y_max}) {
      const double h2 = d.radius * d.radius - (y - d.centre.y) * (y - d.centre.y);
      if (h2 > 0)
        for (double x : {d.centre.x - std::sqrt(h2), d.centre.x + std::sqrt(h2)})
          if (x > cuts[0] && x < cuts[1]) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    double ref = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) ref += integrate_1d(chord, cuts[i], cuts[i + 1], {.tol = 1e-13}).value;
    CHECK(rect_disc_area(r, d) == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("mass is additive over random rectangle partitions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  const Rect sq{-1, 1, -1, 1};
  PlanarMeasure m({}, random_grid(rng, sq, 9, 13));
  for (int t = 0; t < 20; ++t) {
    std::vector<double> xs{-1, 1}, ys{-1, 1};
    for (int k = 0; k < 5; ++k) {
      xs.push_back(-1 + 2 * U(rng));
      ys.push_back(-1 + 2 * U(rng));
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      for (std::size_t j = 0; j + 1 < ys.size(); ++j) s += m.mass_on(Rect{xs[i], xs[i + 1], ys[j], ys[j + 1]});
    CHECK(std::abs(s - m.total_mass()) <= 1e-12 * m.total_mass());
  }
}

TEST_CASE("window restriction") {
  PlanarMeasure m({}, uniform_grid({0, 1, 0, 1}, 4, 4.0));
  auto left = m.with_window({0, 0.3, 0, 1});
  auto right = m.with_window({0.3, 1, 0, 1});
  CHECK(left.total_mass() == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(right.total_mass() == doctest::Approx(2.8).epsilon(1e-14));
  for (int iy = 0; iy < 4; ++iy)
    for (int ix = 0; ix < 4; ++ix)
      CHECK(left.cell_mass(ix, iy) + right.cell_mass(ix, iy) == doctest::Approx(0.25).epsilon(1e-14));
  auto bb = left.support_bbox();
  REQUIRE(bb);
  CHECK(*bb == Rect{0, 0.3, 0, 1});
}

TEST_CASE("Lelong spectrum") {
  PlanarMeasure a({{{0, 0}, 1.0}}, std::nullopt);
  CHECK(lelong_spectrum(a).at({0, 0}) == 1.0);
  PlanarMeasure d({}, uniform_grid({0, 1, 0, 1}, 2, 1.0));
  CHECK(lelong_spectrum(d).empty());
  PlanarMeasure b({{{0, 0}, 0.3}, {{1, 1}, 2.7}}, std::nullopt);
  auto s = lelong_spectrum(b);
  CHECK(s.size() == 2);
  CHECK(s.at({0, 0}) == 0.3);
  CHECK(s.at({1, 1}) == 2.7);
}

TEST_CASE("scaling") {
  std::mt19937_64 rng(5);
  PlanarMeasure m({{{0.2, 0.3}, 0.4}}, random_grid(rng, {0, 1, 0, 1}, 5, 5), Rect{0, 1, 0, 1});
  CHECK(scale(m, 1.0).total_mass() == m.total_mass());
  CHECK(scale(m, 2.0).atoms()[0].mass == 0.8);
  const double gamma = m.total_mass();
  CHECK(scale(m, 41 / gamma).total_mass() == doctest::Approx(41).epsilon(1e-14));
  auto ab = scale(m, 0.75 * 3.0), a_b = scale(scale(m, 3.0), 0.75);
  for (std::size_t i = 0; i < ab.grid().cells.size(); ++i) CHECK(ab.grid().cells[i] == doctest::Approx(a_b.grid().cells[i]).epsilon(1e-15));
  CHECK_THROWS_AS(scale(m, 0.0), DomainError);
}

TEST_CASE("integer parts of atoms") {
  PlanarMeasure m({{{0, 0}, 2.0}, {{1, 0}, 0.7}, {{0, 1}, 1.3}}, std::nullopt);
  auto s = split_atom_integer_parts(m);
  REQUIRE(s.carried.size() == 2);
  CHECK(s.carried[0].k == 2);
  CHECK(s.carried[1].k == 1);
  REQUIRE(s.stripped.atoms().size() == 2);
  CHECK(s.stripped.atoms()[0].mass == 0.7);
  CHECK(s.stripped.atoms()[1].mass == doctest::Approx(0.3).epsilon(1e-14));
  double carried = 0;
  for (auto& c : s.carried) carried += c.k;
  CHECK(std::abs(s.stripped.total_mass() + carried - m.total_mass()) <= 1e-12);
  for (auto& a : s.stripped.atoms()) CHECK(a.mass < 1.0);
}

TEST_CASE("corner primitive has the logarithmic kernel as mixed derivative") {
  for (auto [u, v] : {std::pair{0.3, 0.7}, {-1.2, 0.4}, {2.0, -2.5}, {-0.05, -0.9}}) {
    const double h = 1e-4;
    const double d = (log_kernel_primitive(u + h, v + h) - log_kernel_primitive(u - h, v + h) -
                      log_kernel_primitive(u + h, v - h) + log_kernel_primitive(u - h, v - h)) /
                     (4 * h * h);
    CHECK(d == doctest::Approx(std::log(u * u + v * v)).epsilon(1e-6));
  }
  CHECK(log_kernel_primitive(0.0, 1.0) == 0.0);
  CHECK(log_kernel_primitive(-0.4, 0.9) == doctest::Approx(-log_kernel_primitive(0.4, 0.9)));
}

TEST_CASE("rectangle log integral agrees with 2-D quadrature") {
  const Rect r{0.1, 0.6, -0.2, 0.3};
  for (Point2 z : {Point2{2, 1}, Point2{0.7, 0.0}, Point2{-0.3, -0.5}}) {
    auto q = integrate_rect([&](Point2 p) { return std::log(distance(p, z)); }, r, {.tol = 1e-12});
    CHECK(rect_log_integral(r, z) == doctest::Approx(q.value).epsilon(1e-11));
  }
  // point inside the rectangle: split so the log singularity sits at a corner
  const Point2 z{0.3, 0.05};
  double ref = 0;
  for (Rect part : {Rect{0.1, 0.3, -0.2, 0.05}, Rect{0.3, 0.6, -0.2, 0.05}, Rect{0.1, 0.3, 0.05, 0.3},
                    Rect{0.3, 0.6, 0.05, 0.3}})
    ref += integrate_rect([&](Point2 p) { return std::log(distance(p, z)); }, part, {.tol = 1e-11}).value;
  CHECK(rect_log_integral(r, z) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("density potential: node weights agree with per-cell sums") {
  std::mt19937_64 rng(9);
  PlanarMeasure m({}, random_grid(rng, {-0.5, 0.5, -0.5, 0.5}, 6, 5));
  auto windowed = m.with_window({-10, 10, -10, 10});  // forces the per-cell path
  for (Point2 z : {Point2{0, 0}, Point2{0.13, -0.41}, Point2{3, 2}, Point2{-0.5, 0.5}})
    CHECK(m.log_potential(z) == doctest::Approx(windowed.log_potential(z)).epsilon(1e-12));
}

TEST_CASE("far-field potential of a small square") {
  PlanarMeasure m({}, uniform_grid({-0.01, 0.01, -0.01, 0.01}, 2, 1.0));
  const Point2 z{0.4, 0.3};
  CHECK(std::abs(m.log_potential(z) - std::log(0.5)) < 1e-3);
  auto q = integrate_rect([&](Point2 p) { return std::log(distance(p, z)) / 4e-4; }, {-0.01, 0.01, -0.01, 0.01},
                          {.tol = 1e-13});
  CHECK(m.log_potential(z) == doctest::Approx(q.value).epsilon(1e-12));
}

TEST_CASE("atom potential is -inf exactly at atoms") {
  PlanarMeasure m({{{0, 0}, 1.0}}, std::nullopt);
  CHECK(std::isinf(m.log_potential({0, 0})));
  CHECK(m.log_potential({0.3, 0}) == doctest::Approx(std::log(0.3)));
}

TEST_CASE("JSON round trip and diagnostics") {
  std::mt19937_64 rng(2);
  PlanarMeasure m({{{0.2, 0.3}, 0.4}}, random_grid(rng, {0, 1, 0, 1}, 3, 2), Rect{0, 1, 0, 1});
  auto j = measure_to_json(m);
  auto back = measure_from_json(j);
  CHECK(back.atoms() == m.atoms());
  CHECK(back.grid().cells == m.grid().cells);
  CHECK(back.bounding() == m.bounding());

  auto bad = j;
  bad["density"]["cells"].push_back(1.0);
  try {
    measure_from_json(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.where() == "measure.density.cells");
  }
  bad = j;
  bad["atoms"][0][2] = -1;
  CHECK_THROWS_AS(measure_from_json(bad), ConfigError);
}
