#include "pcassoc/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcassoc {

namespace {

void column_moments(const Eigen::MatrixXd& y, Eigen::VectorXd& means, Eigen::VectorXd& sds) {
  const Eigen::Index n = y.rows();
  means = y.colwise().mean();
  sds.resize(y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const double ss = (y.col(j).array() - means[j]).square().sum();
    sds[j] = std::sqrt(ss / static_cast<double>(n - 1));
  }
}

// canonical sign: flip so the largest-magnitude entry (lowest index on ties)
// is positive
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> col) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double a = std::fabs(col[i]);
    if (a > best_abs + 1e-14) {
      best_abs = a;
      best = i;
    }
  }
  if (col[best] < 0.0) col = -col;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return false;
}

}  // namespace

Eigen::VectorXd PcaModel::variance_explained() const {
  return eigenvalues / eigenvalues.sum();
}

PcaModel fit_pca(const Eigen::MatrixXd& Y) {
  const Eigen::Index n = Y.rows();
  const Eigen::Index p = Y.cols();
  if (p < 2) throw std::domain_error("fit_pca: need at least 2 traits");
  if (n <= p) throw std::domain_error("fit_pca: need more subjects than traits");

  PcaModel model;
  column_moments(Y, model.means, model.sds);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(model.sds[j] > 0.0)) {
      throw std::invalid_argument("fit_pca: column " + std::to_string(j) + " is constant");
    }
  }

  Eigen::MatrixXd x = Y;
  for (Eigen::Index j = 0; j < p; ++j) {
    x.col(j) = (x.col(j).array() - model.means[j]) / model.sds[j];
  }
  Eigen::MatrixXd corr = (x.transpose() * x) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("fit_pca: eigendecomposition failed");
  }

  Eigen::MatrixXd vectors = es.eigenvectors();
  for (Eigen::Index j = 0; j < p; ++j) canonicalize_sign(vectors.col(j));

  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd& lam = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (lam[a] != lam[b]) return lam[a] > lam[b];
    return lex_less(vectors.col(a), vectors.col(b));
  });

  model.eigenvalues.resize(p);
  model.loadings.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    model.eigenvalues[j] = std::max(lam[order[j]], 0.0);
    model.loadings.col(j) = vectors.col(order[j]);
  }
  return model;
}

Eigen::MatrixXd project_scores(const PcaModel& model, const Eigen::MatrixXd& Y) {
  if (Y.cols() != model.n_traits()) {
    throw std::domain_error("project_scores: trait count mismatch");
  }
  Eigen::MatrixXd x = Y;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    x.col(j) = (x.col(j).array() - model.means[j]) / model.sds[j];
  }
  return x * model.loadings;
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& Y) {
  Eigen::VectorXd means, sds;
  column_moments(Y, means, sds);
  Eigen::MatrixXd x = Y;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (!(sds[j] > 0.0)) {
      throw std::invalid_argument("standardize_columns: column " + std::to_string(j) +
                                  " is constant");
    }
    x.col(j) = (x.col(j).array() - means[j]) / sds[j];
  }
  return x;
}

}  // namespace pcassoc
