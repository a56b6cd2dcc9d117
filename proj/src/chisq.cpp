#include "pcassoc/chisq.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pcassoc {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxGammaIter = 2000;

void check_chisq_args(double x, int df) {
  if (df < 1) throw std::domain_error("chisq: df must be >= 1, got " + std::to_string(df));
  if (!(x >= 0.0)) throw std::domain_error("chisq: statistic must be >= 0, got " + std::to_string(x));
}

// Regularized lower incomplete gamma P(a, x) by power series; converges for
// x < a + 1.
double lower_gamma_series(double a, double x) {
  if (x == 0.0) return 0.0;
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxGammaIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("chisq: incomplete gamma series did not converge");
}

// log of the regularized upper incomplete gamma Q(a, x), by continued
// fraction (modified Lentz); converges for x >= a + 1.
double log_upper_gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxGammaIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
    }
  }
  throw std::runtime_error("chisq: incomplete gamma continued fraction did not converge");
}

// P(a, x) valid on the whole domain.
double reg_lower_gamma(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return lower_gamma_series(a, x);
  return -std::expm1(log_upper_gamma_cf(a, x));
}

}  // namespace

double chisq_cdf(double x, int df) {
  check_chisq_args(x, df);
  if (x == 0.0) return 0.0;
  return reg_lower_gamma(0.5 * df, 0.5 * x);
}

double log_pvalue_from_chisq(double x, int df) {
  check_chisq_args(x, df);
  if (x == 0.0) return 0.0;
  const double a = 0.5 * df;
  const double y = 0.5 * x;
  if (y < a + 1.0) {
    return std::log1p(-lower_gamma_series(a, y));
  }
  return log_upper_gamma_cf(a, y);
}

double noncentral_chisq_cdf(double x, int df, double ncp) {
  check_chisq_args(x, df);
  if (!(ncp >= 0.0)) {
    throw std::domain_error("chisq: non-centrality must be >= 0, got " + std::to_string(ncp));
  }
  if (ncp == 0.0) return chisq_cdf(x, df);
  if (x == 0.0) return 0.0;

  const double half_ncp = 0.5 * ncp;
  const double y = 0.5 * x;
  const double a0 = 0.5 * df;
  constexpr double kTol = 1e-13;
  constexpr long kMaxTerms = 200000;

  // Start at the Poisson mode and sweep outward in both directions.
  const long k0 = static_cast<long>(half_ncp);
  const double w0 = std::exp(-half_ncp + (k0 > 0 ? k0 * std::log(half_ncp) : 0.0) -
                             std::lgamma(static_cast<double>(k0) + 1.0));
  const double a_mid = a0 + static_cast<double>(k0);
  const double p_mid = reg_lower_gamma(a_mid, y);
  // t(a) = y^a e^{-y} / Gamma(a+1), the step between consecutive central CDFs.
  const double t_mid = std::exp(a_mid * std::log(y) - y - std::lgamma(a_mid + 1.0));

  double sum = w0 * p_mid;
  double wsum = w0;

  // Upward sweep: P decreases with a, Poisson weights decay past the mode.
  {
    double w = w0, p = p_mid, t = t_mid;
    double a = a_mid;
    for (long k = k0 + 1; k <= k0 + kMaxTerms; ++k) {
      p -= t;
      if (p < 0.0) p = 0.0;
      a += 1.0;
      t *= y / a;
      w *= half_ncp / static_cast<double>(k);
      sum += w * p;
      wsum += w;
      const double ratio = half_ncp / static_cast<double>(k + 1);
      if (ratio < 1.0) {
        const double tail_weight = w * ratio / (1.0 - ratio);
        if (tail_weight * p < kTol) break;
      }
      if (k == k0 + kMaxTerms) {
        throw std::runtime_error("chisq: non-central series did not converge (upward)");
      }
    }
  }

  // Downward sweep to k = 0 (or until the weights are negligible; below the
  // mode the weights decrease monotonically as k decreases).
  {
    double w = w0, p = p_mid, t = t_mid;
    double a = a_mid;
    for (long k = k0; k >= 1; --k) {
      t *= a / y;
      a -= 1.0;
      p += t;
      if (p > 1.0) p = 1.0;
      w *= static_cast<double>(k) / half_ncp;
      sum += w * p;
      wsum += w;
      if (w * static_cast<double>(k) < kTol) break;
    }
  }
  (void)wsum;

  if (sum < 0.0) sum = 0.0;
  if (sum > 1.0) sum = 1.0;
  return sum;
}

namespace {

// Chi-square density, used by the Newton step of the quantile.
double chisq_pdf(double x, int df) {
  const double a = 0.5 * df;
  return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

}  // namespace

double chisq_quantile(double p, int df) {
  if (df < 1) throw std::domain_error("chisq: df must be >= 1, got " + std::to_string(df));
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("chisq: probability must be in (0, 1), got " + std::to_string(p));
  }

  // Wilson-Hilferty starting point.
  const double d = static_cast<double>(df);
  const double z = normal_quantile(p);
  const double wh = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  double x = d * wh * wh * wh;
  if (!(x > 0.0)) x = 1e-8;

  // Bracket the root.
  double lo = x, hi = x;
  while (chisq_cdf(lo, df) > p) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300) {
      lo = 0.0;
      break;
    }
  }
  while (chisq_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("chisq: quantile bracket overflow");
  }

  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double f = chisq_cdf(x, df) - p;
    if (f == 0.0) return x;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double dens = chisq_pdf(x, df);
    double next = (dens > 0.0) ? x - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 4e-16 * next) return next;
    x = next;
    if (hi - lo <= 4e-16 * hi) break;
  }
  return x;
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: probability must be in (0, 1)");
  }
  // Acklam's rational approximation, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  // Halley step against the exact CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace pcassoc
