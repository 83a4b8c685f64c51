#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "potlab/errors.hpp"
#include "potlab/quad.hpp"

using namespace potlab;

namespace {

// ∫_{D(0,1)} |z − a|^{−2s} by integrating the radial part in closed form around a
// and the angle with the periodic trapezoid rule.
double off_centre_oracle(Point2 a, double R, double s) {
  const int n = 8192;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = 2 * M_PI * k / n;
    const double d = a.x * std::cos(th) + a.y * std::sin(th);
    const double rho = -d + std::sqrt(d * d + R * R - (a.x * a.x + a.y * a.y));
    sum += std::pow(rho, 2 - 2 * s) / (2 - 2 * s);
  }
  return sum * 2 * M_PI / n;
}

}  // namespace

TEST_CASE("disc area") {
  for (double r : {0.1, 0.4, 1.0, 2.5}) {
    auto q = integrate_disc([](Point2) { return 1.0; }, {{0.3, -0.2}, r}, {});
    CHECK(q.value == doctest::Approx(M_PI * r * r).epsilon(1e-12));
  }
}

TEST_CASE("central power singularity reproduces pi/(1-s)") {
  for (double s : {0.25, 0.5, 0.75, 0.9, 0.99}) {
    auto f = [s](Point2 z) { return std::pow(z.x * z.x + z.y * z.y, -s); };
    auto q = integrate_disc(f, {{0, 0}, 1.0}, {{{0, 0}, s}});
    INFO("s = " << s);
    CHECK(std::abs(q.value - M_PI / (1 - s)) <= 1e-8 * M_PI / (1 - s));
  }
}

TEST_CASE("off-centre singularity against the radial oracle") {
  for (double s : {0.3, 0.6, 0.85}) {
    const Point2 a{0.35, -0.2};
    auto f = [&](Point2 z) { return std::pow(std::pow(z.x - a.x, 2) + std::pow(z.y - a.y, 2), -s); };
    auto q = integrate_disc(f, {{0, 0}, 1.0}, {{a, s}});
    const double ref = off_centre_oracle(a, 1.0, s);
    CHECK(std::abs(q.value - ref) <= 1e-8 * ref);
  }
}

TEST_CASE("model integral respects its closed-form bound") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 20; ++t) {
    const double r = 0.05 + 0.4 * U(rng);
    const double tau = 0.05 + 1.9 * U(rng);
    const double ang = 2 * M_PI * U(rng);
    const double rad = 1.5 * r * U(rng);
    const Point2 a{rad * std::cos(ang), rad * std::sin(ang)};
    auto f = [&](Point2 x) {
      const double num = x.x * x.x + x.y * x.y;
      return num * std::pow(std::hypot(x.x - a.x, x.y - a.y), -tau);
    };
    auto q = integrate_disc(f, {{0, 0}, r}, {{a, tau / 2}});
    const double A = rad + r;
    const double bound = 4 * M_PI * std::pow(A, 2 - tau) * (A * A / (4 - tau) + rad * rad / (2 - tau));
    CHECK(q.value <= bound);
    CHECK(q.value > 0);
  }
}

TEST_CASE("non-integrable singularities are detected") {
  for (double s : {1.0, 1.2}) {
    auto f = [s](Point2 z) { return std::pow(z.x * z.x + z.y * z.y, -s); };
    CHECK_THROWS_AS(integrate_disc(f, {{0, 0}, 1.0}, {{{0, 0}, s}}), DivergenceDetected);
  }
}

TEST_CASE("halving the tolerance stays within the previous error estimate") {
  auto f = [](Point2 z) { return std::exp(z.x) * std::pow(z.x * z.x + z.y * z.y, -0.3); };
  double tol = 1e-5;
  QuadOptions o;
  o.tol = tol;
  auto prev = integrate_disc(f, {{0, 0}, 0.8}, {{{0, 0}, 0.3}}, o);
  for (int k = 0; k < 4; ++k) {
    o.tol *= 0.5;
    auto cur = integrate_disc(f, {{0, 0}, 0.8}, {{{0, 0}, 0.3}}, o);
    CHECK(std::abs(cur.value - prev.value) <= prev.error);
    prev = cur;
  }
}

TEST_CASE("tensor rule is exact on low-degree polynomials") {
  auto q = integrate_rect([](Point2 z) { return std::pow(z.x, 10) * std::pow(z.y, 12); }, {0, 1, 0, 1});
  CHECK(q.value == doctest::Approx(1.0 / (11 * 13)).epsilon(1e-14));
  CHECK(q.evaluations == 225);
}

TEST_CASE("serial and parallel results are bitwise identical") {
  auto f = [](Point2 z) { return std::cos(7 * z.x) * std::exp(z.y) * std::pow(std::hypot(z.x - 0.1, z.y), -0.8); };
  QuadOptions o;
  o.exec = Exec::serial;
  auto a = integrate_disc(f, {{0, 0}, 0.5}, {{{0.1, 0}, 0.4}}, o);
  o.exec = Exec::parallel;
  auto b = integrate_disc(f, {{0, 0}, 0.5}, {{{0.1, 0}, 0.4}}, o);
  CHECK(a.value == b.value);
  CHECK(a.error == b.error);
}

TEST_CASE("one-dimensional adaptive rule") {
  auto q = integrate_1d([](double x) { return std::sqrt(x); }, 0, 1);
  CHECK(q.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  auto g = integrate_1d([](double x) { return std::exp(-x * x); }, -8, 8, {.tol = 1e-13});
  CHECK(g.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
}

TEST_CASE("vector integration matches componentwise scalar integration") {
  auto vf = [](Point2 z, double* o) {
    o[0] = 1.0;
    o[1] = z.x * z.x;
    o[2] = std::pow(z.x * z.x + z.y * z.y, -0.4);
  };
  auto v = integrate_disc_vec(vf, 3, {{0, 0}, 1.0}, {{{0, 0}, 0.4}}, {.tol = 1e-10});
  CHECK(v.value[0] == doctest::Approx(M_PI).epsilon(1e-9));
  CHECK(v.value[1] == doctest::Approx(M_PI / 4).epsilon(1e-9));
  CHECK(v.value[2] == doctest::Approx(M_PI / 0.6).epsilon(1e-9));
}

TEST_CASE("vector integration around an off-centre pole") {
  const Point2 a{0.35, -0.2};
  for (double s : {0.3, 0.6, 0.85}) {
    auto vf = [&](Point2 z, double* o) {
      o[0] = std::pow(std::pow(z.x - a.x, 2) + std::pow(z.y - a.y, 2), -s);
      o[1] = 0.0;  // identically zero components need the absolute floor
    };
    auto v = integrate_disc_vec(vf, 2, {{0, 0}, 1.0}, {{a, s}}, {.tol = 1e-9, .abs_tol = 1e-12});
    const double ref = off_centre_oracle(a, 1.0, s);
    CHECK(std::abs(v.value[0] - ref) <= 1e-8 * ref);
    CHECK(v.value[1] == 0.0);
  }
}

TEST_CASE("cutoff") {
  CHECK(bump(0.3) == 1.0);
  CHECK(bump(0.5) == 1.0);
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(0.75) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double t = 0.5; t <= 1.0; t += 0.01) {
    CHECK(bump(t) <= prev);
    prev = bump(t);
  }
}

TEST_CASE("budget exhaustion is reported") {
  auto f = [](Point2 z) { return std::sin(200 * z.x) * std::sin(200 * z.y); };
  QuadOptions o;
  o.budget = 2000;
  CHECK_THROWS_AS(integrate_rect(f, {0, 1, 0, 1}, o), QuadratureFailure);
  o.throw_on_failure = false;
  auto q = integrate_rect(f, {0, 1, 0, 1}, o);
  CHECK_FALSE(q.converged);
}
