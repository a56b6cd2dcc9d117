#pragma once

#include <Eigen/Dense>

namespace pcassoc {

/// Principal components of the sample correlation matrix of a trait matrix.
/// Immutable once fitted; safe to share across threads.
struct PcaModel {
  Eigen::VectorXd means;        // training column means
  Eigen::VectorXd sds;          // training column standard deviations (n-1)
  Eigen::MatrixXd loadings;     // p x p, columns are components
  Eigen::VectorXd eigenvalues;  // descending, sum = p

  Eigen::Index n_traits() const { return eigenvalues.size(); }
  Eigen::VectorXd variance_explained() const;
};

/// Eigendecomposition of the sample correlation matrix of Y (n x p,
/// n > p >= 2, no constant column). Loading columns are sign-fixed so the
/// largest-magnitude entry is positive; tied eigenvalues are ordered by the
/// lexicographic order of the canonicalized columns.
PcaModel fit_pca(const Eigen::MatrixXd& Y);

/// Component scores: standardize Y with the training means/sds, then project
/// onto the loadings. Sample covariance of the scores equals
/// diag(eigenvalues) when Y is the training data.
Eigen::MatrixXd project_scores(const PcaModel& model, const Eigen::MatrixXd& Y);

/// Standardize columns to mean 0, unit sample variance (helper shared with
/// the association tests).
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& Y);

}  // namespace pcassoc
