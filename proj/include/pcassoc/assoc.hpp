#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace pcassoc {

/// One-degree-of-freedom association test result. The statistic is
/// n * r^2, the sample size times the squared sample correlation between
/// outcome and genotype; log_p is the natural-log chi-square(1) p-value.
struct AssocResult {
  double beta = 0.0;
  double chi2 = 0.0;
  double log_p = 0.0;
};

struct GroupTestResult {
  double statistic = 0.0;
  int df = 0;
  double log_p = 0.0;
  std::string grouping;
};

struct BestPcResult {
  AssocResult best;        // unadjusted result of the winning component
  int index = 0;           // 0-based component index
  double log_p_adjusted = 0.0;  // Bonferroni over the component count, capped at 1
};

/// Wald scan of one outcome on one genotype (both centered internally).
AssocResult univariate_wald(const Eigen::VectorXd& y, const Eigen::VectorXd& g);

/// Sum of per-component 1-df statistics, referred to chi-square with as many
/// degrees of freedom as there are components. With all components included
/// the statistic equals n * R^2 of the multiple regression of g on the
/// original traits.
GroupTestResult combined_pc_test(const Eigen::MatrixXd& scores, const Eigen::VectorXd& g);

BestPcResult best_pc_test(const Eigen::MatrixXd& scores, const Eigen::VectorXd& g);

/// Two-group Fisher combination of 1-df statistics ordered by descending
/// eigenvalue: group p-values at K and N-K df, combined as -2(log p1 + log p2)
/// and referred to chi-square with 4 df.
GroupTestResult fisher_group_test(const std::vector<double>& pc_chi2, int K);

/// Combined test of the 1-df statistics with ranks [lo, hi] (1-based,
/// inclusive) in eigenvalue order.
GroupTestResult group_test(const std::vector<double>& pc_chi2, int lo, int hi);

struct PartitionScanRow {
  int n = 0;               // split index
  GroupTestResult top;     // components 1..n (largest eigenvalues)
  GroupTestResult bottom;  // components n..N (smallest eigenvalues)
};

/// For every split point n = 1..N, the combined test of the top-n components
/// and of the bottom-(N-n+1) components.
std::vector<PartitionScanRow> eigen_partition_scan(const std::vector<double>& pc_chi2);

/// One-way MANOVA of the traits against a single continuous predictor via
/// Wilks' lambda and its exact F transform; returns the natural-log p-value.
double manova_wilks_log_p(const Eigen::MatrixXd& Y, const Eigen::VectorXd& g);

/// Same test when R^2 of the genotype-on-traits regression is already known
/// (e.g. from orthogonal component statistics).
double manova_wilks_log_p_from_r2(double r2, Eigen::Index n, Eigen::Index k);

/// Least-squares residuals of y on a covariate matrix (X must include the
/// intercept column and have full column rank).
Eigen::VectorXd residualize_covariates(const Eigen::VectorXd& y, const Eigen::MatrixXd& X);

}  // namespace pcassoc
