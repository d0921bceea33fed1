#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "gprop/uncertainty.hpp"

namespace gprop {

/// PCA projection fitted to a target explained-variance fraction.
struct PcaModel {
  Eigen::VectorXd center;           // D feature means
  Eigen::MatrixXd basis;            // D x k, orthonormal columns
  Eigen::VectorXd explained_ratio;  // k, non-increasing

  Eigen::Index k() const { return basis.cols(); }
  Eigen::Index input_dim() const { return basis.rows(); }
};

/// SVD-based PCA. k is the smallest component count whose cumulative
/// explained-variance ratio reaches variance_target; a target of 1 retains
/// the numerical rank. Column signs are fixed so each basis column's
/// largest-magnitude entry is positive.
inline PcaModel pca_fit(const Eigen::MatrixXd& x, double variance_target) {
  if (x.rows() < 2) {
    throw std::invalid_argument("pca_fit: need at least 2 rows");
  }
  if (!(variance_target > 0.0) || variance_target > 1.0) {
    throw std::invalid_argument("pca_fit: variance_target must be in (0, 1]");
  }
  PcaModel model;
  model.center = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - model.center.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const Eigen::VectorXd var = sv.array().square();
  const double total = var.sum();
  if (!(total > 0.0)) {
    throw std::invalid_argument("pca_fit: data has zero total variance");
  }

  const double rank_tol = static_cast<double>(std::max(x.rows(), x.cols())) *
                          std::numeric_limits<double>::epsilon() * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > rank_tol) ++rank;

  Eigen::Index k;
  if (variance_target >= 1.0 - 1e-12) {
    k = rank;
  } else {
    k = rank;
    double cum = 0.0;
    for (Eigen::Index i = 0; i < rank; ++i) {
      cum += var(i) / total;
      if (cum >= variance_target) {
        k = i + 1;
        break;
      }
    }
  }
  k = std::max<Eigen::Index>(k, 1);

  model.basis = svd.matrixV().leftCols(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index imax;
    model.basis.col(j).cwiseAbs().maxCoeff(&imax);
    if (model.basis(imax, j) < 0.0) model.basis.col(j) *= -1.0;
  }
  model.explained_ratio = var.head(k) / total;
  return model;
}

/// Projects rows of X into the PCA space: (X - center) * basis.
inline Eigen::MatrixXd pca_transform(const PcaModel& model,
                                     const Eigen::MatrixXd& x) {
  if (x.cols() != model.input_dim()) {
    throw std::invalid_argument("pca_transform: dimension mismatch");
  }
  return (x.rowwise() - model.center.transpose()) * model.basis;
}

/// Exact covariance of PCA-projected Gaussian noise: basis' Sigma_x basis.
inline Eigen::MatrixXd pca_project_noise(const PcaModel& model,
                                         const Eigen::MatrixXd& input_cov) {
  if (input_cov.rows() != model.input_dim() ||
      input_cov.cols() != model.input_dim()) {
    throw std::invalid_argument("pca_project_noise: dimension mismatch");
  }
  Eigen::MatrixXd projected =
      model.basis.transpose() * input_cov * model.basis;
  projected = 0.5 * (projected + projected.transpose()).eval();
  return projected;
}

/// NoiseModel-aware projection. Isotropic noise stays isotropic (the basis
/// is orthonormal); diagonal and full covariances become full k x k.
inline NoiseModel pca_project_noise(const PcaModel& model,
                                    const NoiseModel& noise) {
  switch (noise.kind) {
    case NoiseModel::Kind::Isotropic:
      return NoiseModel::isotropic(noise.iso_var, noise.output_noise_var);
    case NoiseModel::Kind::Diagonal: {
      if (noise.diag_var.size() != model.input_dim()) {
        throw std::invalid_argument("pca_project_noise: dimension mismatch");
      }
      Eigen::MatrixXd projected = model.basis.transpose() *
                                  noise.diag_var.asDiagonal() * model.basis;
      projected = 0.5 * (projected + projected.transpose()).eval();
      return NoiseModel::full(std::move(projected), noise.output_noise_var);
    }
    case NoiseModel::Kind::Full:
      return NoiseModel::full(pca_project_noise(model, noise.cov),
                              noise.output_noise_var);
  }
  throw std::logic_error("pca_project_noise: bad kind");
}

/// Column-wise affine map v -> (v - mean) / scale with its exact inverse.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // entries > 0

  Eigen::Index dim() const { return mean.size(); }
};

/// Fits per-column mean and sample-standard-deviation scale. Every column
/// must have nonzero variance.
inline Standardizer standardize_fit(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) {
    throw std::invalid_argument("standardize_fit: need at least 2 rows");
  }
  Standardizer s;
  s.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  s.scale = (centered.array().square().colwise().sum() /
             static_cast<double>(x.rows() - 1))
                .sqrt();
  if ((s.scale.array() <= 0.0).any() || !s.scale.allFinite()) {
    throw std::invalid_argument("standardize_fit: zero-variance column");
  }
  return s;
}

inline Standardizer standardize_fit(const Eigen::VectorXd& v) {
  return standardize_fit(Eigen::MatrixXd(v));
}

inline Eigen::MatrixXd standardize_apply(const Standardizer& s,
                                         const Eigen::MatrixXd& x) {
  if (x.cols() != s.dim()) {
    throw std::invalid_argument("standardize_apply: dimension mismatch");
  }
  return (x.rowwise() - s.mean.transpose()).array().rowwise() /
         s.scale.transpose().array();
}

inline Eigen::VectorXd standardize_apply(const Standardizer& s,
                                         const Eigen::VectorXd& v) {
  return standardize_apply(s, Eigen::MatrixXd(v)).col(0);
}

inline Eigen::MatrixXd standardize_invert(const Standardizer& s,
                                          const Eigen::MatrixXd& z) {
  if (z.cols() != s.dim()) {
    throw std::invalid_argument("standardize_invert: dimension mismatch");
  }
  return (z.array().rowwise() * s.scale.transpose().array()).matrix().rowwise() +
         s.mean.transpose();
}

inline Eigen::VectorXd standardize_invert(const Standardizer& s,
                                          const Eigen::VectorXd& z) {
  return standardize_invert(s, Eigen::MatrixXd(z)).col(0);
}

}  // namespace gprop
