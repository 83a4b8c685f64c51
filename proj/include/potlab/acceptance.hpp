#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "potlab/neutralizer.hpp"
#include "potlab/scenario.hpp"

namespace potlab {

/// One neutralise run per m of a scenario's grid.
struct NeutraliseSweep {
  std::vector<NeutralisationReport> rows;
  double sep_constant = 0.0;   // min_sep · m² at the first m with two small-ν points
  std::vector<bool> sep_ok;    // min_sep · m² ≥ sep_constant, per row
  double fitted_C_r = 0.0;     // max I_m over the first half of the grid
  bool decay_applies = false;  // diffuse residual at every m
};

NeutraliseSweep neutralise_sweep(const Scenario& s, const std::vector<long>& m_grid, const NeutraliseOptions& opts = {});

/// min_sep · m² held above its value at the first eligible m.
void fit_separation(NeutraliseSweep& sweep);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::string scenario_dir;
  std::uint64_t seed = 20240917;
  std::set<int> only;  // empty: all ten
  std::optional<MGrid> m_grid;
  Exec exec = Exec::parallel;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// "[PASS]  3  title  (1.2 s)  detail"
std::string format_result(const CriterionResult& r);

}  // namespace potlab
