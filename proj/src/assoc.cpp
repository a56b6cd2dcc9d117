#include "pcassoc/assoc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcassoc/chisq.hpp"

namespace pcassoc {

namespace {

void check_pair(const Eigen::VectorXd& y, const Eigen::VectorXd& g) {
  if (y.size() != g.size()) throw std::domain_error("association: length mismatch");
  if (y.size() < 10) throw std::domain_error("association: need at least 10 observations");
}

// --- regularized incomplete beta, log scale, for the Wilks F transform ----

double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("association: incomplete beta did not converge");
}

// log I_x(a, b); requires the convergent side x < (a+1)/(a+b+2)
double log_reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  const double log_prefactor = a * std::log(x) + b * std::log1p(-x) - std::log(a) -
                               (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  return log_prefactor + std::log(betacf(a, b, x));
}

// log survival of an F(d1, d2) variate
double log_f_sf(double f, double d1, double d2) {
  if (f <= 0.0) return 0.0;
  const double a = 0.5 * d1, b = 0.5 * d2;
  const double y = d2 / (d2 + d1 * f);  // survival = I_y(b, a)
  if (y < (b + 1.0) / (a + b + 2.0)) {
    return log_reg_inc_beta(b, a, y);
  }
  const double cdf = std::exp(log_reg_inc_beta(a, b, 1.0 - y));
  return std::log1p(-cdf);
}

}  // namespace

AssocResult univariate_wald(const Eigen::VectorXd& y, const Eigen::VectorXd& g) {
  check_pair(y, g);
  const double n = static_cast<double>(y.size());
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd gc = g.array() - g.mean();
  const double sgg = gc.squaredNorm();
  const double syy = yc.squaredNorm();
  if (!(sgg > 0.0)) throw std::invalid_argument("association: genotype is constant");
  const double sgy = yc.dot(gc);

  AssocResult r;
  r.beta = sgy / sgg;
  const double r2 = syy > 0.0 ? (sgy * sgy) / (sgg * syy) : 0.0;
  r.chi2 = n * r2;
  r.log_p = log_pvalue_from_chisq(r.chi2, 1);
  return r;
}

GroupTestResult combined_pc_test(const Eigen::MatrixXd& scores, const Eigen::VectorXd& g) {
  const int k = static_cast<int>(scores.cols());
  if (k < 1) throw std::domain_error("combined_pc_test: no components");
  GroupTestResult out;
  out.df = k;
  for (int j = 0; j < k; ++j) {
    out.statistic += univariate_wald(scores.col(j), g).chi2;
  }
  out.log_p = log_pvalue_from_chisq(out.statistic, k);
  out.grouping = "PC1-" + std::to_string(k);
  return out;
}

BestPcResult best_pc_test(const Eigen::MatrixXd& scores, const Eigen::VectorXd& g) {
  const int k = static_cast<int>(scores.cols());
  if (k < 1) throw std::domain_error("best_pc_test: no components");
  BestPcResult out;
  out.best = univariate_wald(scores.col(0), g);
  out.index = 0;
  for (int j = 1; j < k; ++j) {
    AssocResult r = univariate_wald(scores.col(j), g);
    if (r.log_p < out.best.log_p) {
      out.best = r;
      out.index = j;
    }
  }
  out.log_p_adjusted = std::min(0.0, out.best.log_p + std::log(static_cast<double>(k)));
  return out;
}

GroupTestResult fisher_group_test(const std::vector<double>& pc_chi2, int K) {
  const int n = static_cast<int>(pc_chi2.size());
  if (K < 1 || K >= n) {
    throw std::domain_error("fisher_group_test: K must satisfy 1 <= K < " + std::to_string(n));
  }
  double top = 0.0, rest = 0.0;
  for (int i = 0; i < n; ++i) {
    (i < K ? top : rest) += pc_chi2[i];
  }
  const double log_p1 = log_pvalue_from_chisq(top, K);
  const double log_p2 = log_pvalue_from_chisq(rest, n - K);

  GroupTestResult out;
  out.statistic = -2.0 * (log_p1 + log_p2);
  out.df = 4;
  out.log_p = log_pvalue_from_chisq(out.statistic, 4);
  out.grouping = "PC1-" + std::to_string(K) + " | PC" + std::to_string(K + 1) + "-" +
                 std::to_string(n);
  return out;
}

GroupTestResult group_test(const std::vector<double>& pc_chi2, int lo, int hi) {
  const int n = static_cast<int>(pc_chi2.size());
  if (lo < 1 || hi > n || lo > hi) throw std::domain_error("group_test: bad rank range");
  GroupTestResult out;
  out.df = hi - lo + 1;
  for (int i = lo - 1; i < hi; ++i) out.statistic += pc_chi2[i];
  out.log_p = log_pvalue_from_chisq(out.statistic, out.df);
  out.grouping = "PC" + std::to_string(lo) + "-" + std::to_string(hi);
  return out;
}

std::vector<PartitionScanRow> eigen_partition_scan(const std::vector<double>& pc_chi2) {
  const int n = static_cast<int>(pc_chi2.size());
  if (n < 2) throw std::domain_error("eigen_partition_scan: need at least 2 statistics");
  std::vector<PartitionScanRow> rows(n);
  for (int split = 1; split <= n; ++split) {
    rows[split - 1].n = split;
    rows[split - 1].top = group_test(pc_chi2, 1, split);
    rows[split - 1].bottom = group_test(pc_chi2, split, n);
  }
  return rows;
}

double manova_wilks_log_p(const Eigen::MatrixXd& Y, const Eigen::VectorXd& g) {
  const Eigen::Index n = Y.rows();
  const Eigen::Index k = Y.cols();
  if (g.size() != n) throw std::domain_error("manova: length mismatch");
  if (n <= k + 1) throw std::domain_error("manova: need n > n_traits + 1");

  Eigen::MatrixXd yc = Y.rowwise() - Y.colwise().mean();
  Eigen::VectorXd gc = g.array() - g.mean();
  const double sgg = gc.squaredNorm();
  if (!(sgg > 0.0)) throw std::invalid_argument("manova: genotype is constant");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(yc);
  if (qr.rank() < k) throw std::invalid_argument("manova: trait matrix is rank deficient");
  const Eigen::VectorXd fitted = yc * qr.solve(gc);
  const double r2 = fitted.squaredNorm() / sgg;
  return manova_wilks_log_p_from_r2(r2, n, k);
}

double manova_wilks_log_p_from_r2(double r2, Eigen::Index n, Eigen::Index k) {
  if (n <= k + 1) throw std::domain_error("manova: need n > n_traits + 1");
  if (!(r2 >= 0.0 && r2 < 1.0)) {
    if (r2 >= 1.0) r2 = 1.0 - 1e-15;
    else throw std::domain_error("manova: R^2 must be in [0, 1)");
  }
  const double lambda = 1.0 - r2;  // Wilks
  const double d2 = static_cast<double>(n - k - 1);
  const double f = (1.0 - lambda) / lambda * d2 / static_cast<double>(k);
  return log_f_sf(f, static_cast<double>(k), d2);
}

Eigen::VectorXd residualize_covariates(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  if (X.rows() != y.size()) throw std::domain_error("residualize: length mismatch");
  if (X.rows() <= X.cols()) throw std::domain_error("residualize: need n > covariate count");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw std::invalid_argument("residualize: covariate matrix is rank deficient");
  }
  return y - X * qr.solve(y);
}

}  // namespace pcassoc
