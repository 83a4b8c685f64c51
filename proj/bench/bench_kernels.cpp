#include <omp.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "potlab/atomizer.hpp"
#include "potlab/bergman.hpp"
#include "potlab/neutralizer.hpp"
#include "potlab/quad.hpp"

using namespace potlab;

namespace {

// Best of `reps` wall-clock times; `run` returns a checksum.
double best_time(const std::function<double()>& run, int reps, double& checksum) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = omp_get_wtime();
    checksum = run();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best;
}

void compare(const char* name, const std::function<double(Exec)>& kernel, int reps) {
  double cs = 0, cp = 0;
  const double ts = best_time([&] { return kernel(Exec::serial); }, reps, cs);
  const double tp = best_time([&] { return kernel(Exec::parallel); }, reps, cp);
  const double diff = std::abs(cs - cp) / std::max(1.0, std::abs(cs));
  std::printf("%-22s %10.4f %10.4f %8.2fx   rel diff %.1e\n", name, ts, tp, ts / tp, diff);
}

PlanarMeasure random_measure(long N, const Rect& square, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Atom> atoms;
  for (int i = 0; i < 200; ++i)
    atoms.push_back({{square.x_min + square.width() * U(rng), square.y_min + square.height() * U(rng)}, U(rng)});
  DensityGrid g;
  g.rect = square;
  g.nx = g.ny = 32;
  for (int i = 0; i < 32 * 32; ++i) g.cells.push_back(U(rng));
  PlanarMeasure mu(atoms, g);
  return scale(mu, static_cast<double>(N) / mu.total_mass());
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-22s %10s %10s %9s\n", "kernel", "serial s", "parallel s", "speedup");

  const Disc disc{{0, 0}, 0.4};
  compare("disc quadrature",
          [&](Exec e) {
            QuadOptions o;
            o.exec = e;
            o.tol = 1e-10;
            return integrate_disc([](Point2 z) { return std::exp(std::sin(9 * z.x) * std::cos(7 * z.y)); }, disc, {}, o)
                .value;
          },
          3);

  const Rect square = Rect::square({0, 0}, 1.0);
  const auto mu = random_measure(256, square, 7);
  compare("atomise N=256",
          [&](Exec e) {
            AtomiseOptions o;
            o.exec = e;
            const auto r = atomise(mu, square, o);
            return r.certificates.f_ratio + static_cast<double>(r.pieces.size());
          },
          3);

  std::vector<Rect> rects;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 3000; ++i) rects.push_back(Rect::square({U(rng), U(rng)}, 0.02 + 0.05 * U(rng)));
  compare("overlap multiplicity", [&](Exec e) { return static_cast<double>(overlap_multiplicity(rects, e)); }, 3);

  SubharmonicWeight w;
  w.domain = disc;
  DensityGrid g;
  g.rect = Rect::square({0, 0}, 0.56);
  g.nx = g.ny = 16;
  g.cells.assign(256, 1.0 / 256);
  w.riesz = PlanarMeasure({{{0.05, 0.02}, 0.3}}, g);
  compare("neutralise m=128",
          [&](Exec e) {
            NeutraliseOptions o;
            o.exec = e;
            return neutralise(w, 128, 0.5, o).I_m;
          },
          1);
  return 0;
}
