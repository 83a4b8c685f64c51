#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potlab/bergman.hpp"
#include "potlab/measure_io.hpp"
#include "potlab/potential.hpp"

namespace potlab {

/// m = A..B, either doubling from A or stepping by one.
struct MGrid {
  enum class Kind { geometric, linear };
  long from = 16;
  long to = 1024;
  Kind kind = Kind::geometric;

  std::vector<long> values() const;
};

/// "A:B", "A:B:geometric" or "A:B:linear".
MGrid parse_m_grid(const std::string& text, const std::string& where = "m_grid");

struct JetConfig {
  int order = 1;
  Disc subdisc{{0, 0}, 0.15};  // B of the mass-growth probe
};

struct GridConfig {
  std::vector<long> bergman_m{8, 16, 32, 64};
  int sandwich_points = 100;
  double sandwich_r = 0.05;
  int kernel_grid = 20;
};

struct Scenario {
  std::string name;
  SubharmonicWeight weight;
  std::optional<RadialProfile> bergman_profile;  // replaces the weight in the Bergman probes
  bool zero_lelong = false;
  bool closed_form = false;  // I_m = πr² for every m
  double delta = 0.5;
  MGrid m_grid;
  JetConfig jet;
  GridConfig grids;
  std::uint64_t seed = 1;
};

/// Sections {name, weight, disc, delta, m_grid, jet, grids, seed}. The weight
/// is either {measure, g0} or {generator: {kind: "sqrt_log", n}} with an
/// optional {bergman: {nu, shift, a, b, cutoff}} radial model.
Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::string& path);

/// Sorted paths of the *.json files in a directory.
std::vector<std::string> list_scenarios(const std::string& dir);

/// Cell masses of dd^c(−√(−log|z − c|)) on the n×n grid of the square
/// inscribed in the disc; n even so the centre is a grid vertex.
DensityGrid sqrt_log_density(const Disc& d, int n);

/// The weight the Bergman probes run on.
BergmanWeight bergman_weight(const Scenario& s);

/// The sandwich sample points: uniform in D(c, 0.6R) from the scenario seed,
/// away from the poles.
std::vector<Point2> sandwich_points(const Scenario& s, const BergmanWeight& w);

}  // namespace potlab
