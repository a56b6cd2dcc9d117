#pragma once

#include <vector>

#include "pcassoc/simulate.hpp"

namespace pcassoc {

// Closed-form bivariate theory: variance split across the two components of a
// pair of unit-variance traits with shared correlation c and genetic variance
// fractions v1, v2, and the resulting association power.

/// Fractions of total phenotypic variance carried by the sum and difference
/// components: s1 = (1 + c + sqrt(v1 v2)) / 2, s2 = 1 - s1. s1 + s2 = 1 holds
/// exactly.
std::pair<double, double> pc_variance_fractions(double c, double v1, double v2);

/// Fractions of each component's variance explained by the genotype. With
/// concordant effects the cross term enters the first component; with
/// opposite effects the cross terms swap between the numerators.
std::pair<double, double> pc_genetic_variance(double c, double v1, double v2,
                                              EffectSign sign2);

/// Power of the 1-df Wald test at sample size n when the tested variable has
/// variance fraction v: 1 - F(q_{1-alpha} | 1, n v).
double power_1df(int n, double v, double alpha);

/// Power of the 2-df combined-component test with per-component fractions
/// v_pc1, v_pc2: non-centrality n (v_pc1 + v_pc2) at 2 df.
double power_2df(int n, double v_pc1, double v_pc2, double alpha);

struct PowerCurveRow {
  double c = 0.0;
  int n = 0;
  double v1 = 0.0;
  double v2 = 0.0;
  EffectSign sign = EffectSign::concordant;
  double alpha = 0.0;
  double power_y1 = 0.0;
  double power_pc1 = 0.0;
  double power_pc2 = 0.0;
  double power_combined = 0.0;
};

struct PowerGrid {
  std::vector<double> c_values;
  std::vector<int> n_values;
  std::vector<double> v1_values;
  std::vector<double> v2_values;
  std::vector<EffectSign> signs;
  double alpha = 5e-8;

  /// c in 0..0.95 step 0.05; n in {2000, 5000}; v1 = 0.005; v2 in {0, 0.005};
  /// both effect directions; alpha = 5e-8.
  static PowerGrid default_grid();
};

/// Power of the trait test, each component test, and the combined test over a
/// parameter grid. Grid points where c + sqrt(v1 v2) >= 1 are skipped.
std::vector<PowerCurveRow> power_curves(const PowerGrid& grid);

}  // namespace pcassoc
