#include "pcassoc/power.hpp"

#include <cmath>
#include <stdexcept>

#include "pcassoc/chisq.hpp"

namespace pcassoc {

namespace {

void check_fractions(double c, double v1, double v2) {
  if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("power: c must be in [0, 1)");
  if (!(v1 >= 0.0 && v1 < 1.0) || !(v2 >= 0.0 && v2 < 1.0)) {
    throw std::domain_error("power: v1, v2 must be in [0, 1)");
  }
  if (c + std::max(v1, v2) > 1.0) {
    throw std::domain_error("power: c + max(v1, v2) must be <= 1");
  }
}

}  // namespace

// sqrt(v1 v2), exact when the fractions coincide
static double cross_term(double v1, double v2) {
  return v1 == v2 ? v1 : std::sqrt(v1 * v2);
}

std::pair<double, double> pc_variance_fractions(double c, double v1, double v2) {
  check_fractions(c, v1, v2);
  const double cross = cross_term(v1, v2);
  const double s1 = 0.5 * (1.0 + c + cross);
  return {s1, 1.0 - s1};
}

std::pair<double, double> pc_genetic_variance(double c, double v1, double v2,
                                              EffectSign sign2) {
  check_fractions(c, v1, v2);
  const double cross = cross_term(v1, v2);
  const double denom1 = 2.0 * (1.0 + c + cross);
  const double denom2 = 2.0 * (1.0 - c - cross);
  if (!(denom2 > 0.0)) {
    throw std::domain_error("power: c + sqrt(v1 v2) must be < 1");
  }
  double num1 = v1 + v2 + 2.0 * cross;
  double num2 = v1 + v2 - 2.0 * cross;
  if (sign2 == EffectSign::opposite) std::swap(num1, num2);
  return {num1 / denom1, num2 / denom2};
}

double power_1df(int n, double v, double alpha) {
  if (n < 1) throw std::domain_error("power: n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("power: alpha must be in (0, 1)");
  if (!(v >= 0.0 && v < 1.0)) throw std::domain_error("power: v must be in [0, 1)");
  const double threshold = chisq_quantile(1.0 - alpha, 1);
  return 1.0 - noncentral_chisq_cdf(threshold, 1, static_cast<double>(n) * v);
}

double power_2df(int n, double v_pc1, double v_pc2, double alpha) {
  if (n < 1) throw std::domain_error("power: n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("power: alpha must be in (0, 1)");
  if (!(v_pc1 >= 0.0 && v_pc1 < 1.0) || !(v_pc2 >= 0.0 && v_pc2 < 1.0)) {
    throw std::domain_error("power: component fractions must be in [0, 1)");
  }
  const double threshold = chisq_quantile(1.0 - alpha, 2);
  const double delta = static_cast<double>(n) * (v_pc1 + v_pc2);
  return 1.0 - noncentral_chisq_cdf(threshold, 2, delta);
}

PowerGrid PowerGrid::default_grid() {
  PowerGrid g;
  for (int i = 0; i <= 19; ++i) g.c_values.push_back(0.05 * i);
  g.n_values = {2000, 5000};
  g.v1_values = {0.005};
  g.v2_values = {0.0, 0.005};
  g.signs = {EffectSign::concordant, EffectSign::opposite};
  g.alpha = 5e-8;
  return g;
}

std::vector<PowerCurveRow> power_curves(const PowerGrid& grid) {
  std::vector<PowerCurveRow> rows;
  for (double c : grid.c_values) {
    for (int n : grid.n_values) {
      for (double v1 : grid.v1_values) {
        for (double v2 : grid.v2_values) {
          for (EffectSign sign : grid.signs) {
            if (c + std::sqrt(v1 * v2) >= 1.0 || c + std::max(v1, v2) > 1.0) continue;
            PowerCurveRow row;
            row.c = c;
            row.n = n;
            row.v1 = v1;
            row.v2 = v2;
            row.sign = sign;
            row.alpha = grid.alpha;
            const auto [vp1, vp2] = pc_genetic_variance(c, v1, v2, sign);
            row.power_y1 = power_1df(n, v1, grid.alpha);
            row.power_pc1 = power_1df(n, vp1, grid.alpha);
            row.power_pc2 = power_1df(n, vp2, grid.alpha);
            row.power_combined = power_2df(n, vp1, vp2, grid.alpha);
            rows.push_back(row);
          }
        }
      }
    }
  }
  return rows;
}

}  // namespace pcassoc
