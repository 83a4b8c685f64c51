#pragma once

#include <vector>

namespace potlab {

/// Vanishing order generating the multiplier ideal of the model weight
/// mν log|z − x| near x: the least k ≥ 0 with 2k − 2mν > −2. The multiplier
/// m may be real (m₀(1 + ε) in the inclusion chain).
long ideal_order(double nu, double m);

struct InclusionCheck {
  long order_m0 = 0;      // ideal_order(ν, m₀)
  long order_m0q = 0;     // ideal_order(ν, m₀q)
  long order_m0eps = 0;   // ideal_order(ν, m₀(1 + ε))
  bool left_ok = false;   // q·order(m₀(1+ε)) ≥ order(m₀q)
  bool right_ok = false;  // order(m₀q) ≥ q·order(m₀)
  bool left_contractual = false;  // m₀ ≥ 3/ε
};

/// I(m₀(1+ε)φ)^q ⊂ I(m₀qφ) ⊂ I(m₀φ)^q in terms of vanishing orders.
InclusionCheck check_inclusions(double nu, long m0, long q, double eps);

struct SkodaResult {
  bool integrable_below_1 = false;  // the threshold statement: ν < 1
  double threshold = 1.0;
  bool quadrature_integrable = false;  // e^{−2ν log|z|} integrated on D(0, 1/2)
  double value = 0.0;                  // the integral when it converges
};

SkodaResult skoda_integrability(double nu);

/// Independent oracle: the least k for which ∫_{D(0,1/2)} |z|^{2k − 2mν} dλ
/// converges under the singular disc quadrature.
long ideal_order_by_quadrature(double nu, double m);

struct GridCounterexample {
  double nu = 0.0;
  long m0 = 0;
  long q = 0;
  double eps = 0.0;
  InclusionCheck check;
};

struct InclusionGridReport {
  long cases = 0;
  long right_failures = 0;
  long left_failures = 0;  // counted only where the left inclusion is contractual
  std::vector<GridCounterexample> first_failures;  // the first 40
};

/// ν ∈ {0.01, …, 3.00}, m₀ ∈ {1, …, 50}, q ∈ {1, …, 20}, ε = (3/m₀)·{1, 2, 5}.
InclusionGridReport exhaustive_inclusion_grid();

}  // namespace potlab
