#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace gprop {

/// Hyperparameters of the unit-amplitude isotropic RBF kernel
///   k(a, b) = exp(-||a - b||^2 / (2 * length_scale^2)).
struct KernelParams {
  double length_scale = 1.0;

  void validate() const {
    if (!std::isfinite(length_scale) || length_scale <= 0.0) {
      throw std::invalid_argument(
          "KernelParams: length_scale must be finite and > 0");
    }
  }
};

/// Pairwise squared Euclidean distances between the rows of A and B,
/// computed via ||a||^2 + ||b||^2 - 2 a.b and clamped at zero to absorb
/// negative round-off.
inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("squared_distances: dimension mismatch");
  }
  Eigen::MatrixXd d2 = -2.0 * (a * b.transpose());
  d2.colwise() += a.rowwise().squaredNorm();
  d2.rowwise() += b.rowwise().squaredNorm().transpose();
  return d2.cwiseMax(0.0);
}

/// RBF kernel value for a single pair of points; result in (0, 1].
inline double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          const KernelParams& params) {
  params.validate();
  if (a.size() != b.size() || a.size() < 1) {
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("kernel_eval: non-finite input");
  }
  const double s2 = params.length_scale * params.length_scale;
  return std::exp(-0.5 * (a - b).squaredNorm() / s2);
}

/// Kernel matrix with entry (i, j) = k(row_i(A), row_j(B)).
inline Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& b,
                                     const KernelParams& params) {
  params.validate();
  if (a.cols() != b.cols() || a.cols() < 1) {
    throw std::invalid_argument("kernel_matrix: dimension mismatch");
  }
  const double s2 = params.length_scale * params.length_scale;
  return (squared_distances(a, b) / (-2.0 * s2)).array().exp();
}

/// Derivative of k(test, x_i) with respect to the test point's
/// coordinates: entry (i, j) = -(test_j - x_ij) / sigma^2 * k(test, x_i).
inline Eigen::MatrixXd kernel_grad(const Eigen::VectorXd& test,
                                   const Eigen::MatrixXd& train,
                                   const KernelParams& params) {
  if (test.size() != train.cols()) {
    throw std::invalid_argument("kernel_grad: dimension mismatch");
  }
  const double s2 = params.length_scale * params.length_scale;
  const Eigen::VectorXd k =
      kernel_matrix(train, test.transpose(), params).col(0);
  Eigen::MatrixXd grad = train.rowwise() - test.transpose();
  grad.array().colwise() *= k.array() / s2;
  return grad;
}

}  // namespace gprop
