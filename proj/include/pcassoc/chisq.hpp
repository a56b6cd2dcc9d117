#pragma once

namespace pcassoc {

// Chi-square probability kernels. All functions are pure and thread-safe.
// Domain violations throw std::domain_error; a series that fails to converge
// throws std::runtime_error rather than returning a silently wrong value.

/// Central chi-square CDF, F(x | df). Absolute error below 1e-12.
double chisq_cdf(double x, int df);

/// Non-central chi-square CDF, F(x | df, ncp). Computed as a Poisson-weighted
/// mixture of central CDFs with two-sided truncation; absolute error below
/// 1e-10. Reduces exactly to chisq_cdf at ncp = 0.
double noncentral_chisq_cdf(double x, int df, double ncp);

/// Inverse of the central CDF: x with chisq_cdf(x, df) = p, p in (0, 1).
/// Relative error below 1e-10.
double chisq_quantile(double p, int df);

/// Natural log of the survival function 1 - F(x | df). Stays accurate in
/// log space down to p ~ 1e-300.
double log_pvalue_from_chisq(double x, int df);

/// Standard normal CDF and quantile (helpers used by the kernels above and
/// by calibration code).
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace pcassoc
