#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pcassoc/scenario.hpp"

namespace pcassoc {

/// One statistic from one replicate.
struct TestOutcome {
  double statistic = 0.0;
  int df = 1;
  double log_p = 0.0;
};

struct ReplicateResult {
  std::vector<TestOutcome> outcomes;  // aligned with resolved_test_names()
};

/// Expanded, ordered test labels for a scenario (per-trait and per-component
/// specs become one entry per column).
std::vector<std::string> resolved_test_names(const Scenario& s);

/// Runs every replicate of the scenario (independent derived random streams,
/// parallel across threads) and returns per-replicate statistics in
/// replicate order. Results do not depend on the thread count.
std::vector<ReplicateResult> run_replicates(const Scenario& s, int threads);

struct PowerEstimate {
  std::string test;
  double power = 0.0;
  double se = 0.0;        // binomial standard error
  double power_adjusted = -1.0;  // Bonferroni-corrected variant, -1 when n/a
};

struct StudyReport {
  std::vector<PowerEstimate> tests;
  int replicates = 0;
  double alpha = 0.0;
  int bonferroni_factor = 0;  // factor applied to the *_adjusted columns
};

/// Rejection rate of every test at the scenario alpha. Per-trait and
/// per-component entries also carry a Bonferroni-adjusted rate (factor =
/// scenario.bonferroni_factor, or the component count when 0).
StudyReport run_power_study(const Scenario& s, int threads);

struct QqPoint {
  double expected = 0.0;  // -log10 expected uniform quantile
  double observed = 0.0;  // -log10 observed p
};

struct TestCalibration {
  std::string test;
  double lambda = 0.0;
  std::vector<QqPoint> qq;
};

struct NullCalibration {
  std::vector<TestCalibration> tests;
  int replicates = 0;
};

/// Genomic-inflation calibration under a null scenario (no genetic effect):
/// lambda is the median 1-df-equivalent statistic over the chi-square(1)
/// median. Multi-df statistics are mapped through their p-value.
NullCalibration calibrate_null(const Scenario& s, int threads);

/// Median of the chi-square(1) distribution, the lambda denominator.
double chisq1_median();

}  // namespace pcassoc
