#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "gprop/gp.hpp"
#include "gprop/rng.hpp"

namespace gprop {

/// Output noise variance plus input-noise covariance Sigma_x, with tagged
/// special cases for diagonal and isotropic covariances.
struct NoiseModel {
  enum class Kind { Isotropic, Diagonal, Full };

  Kind kind = Kind::Isotropic;
  double output_noise_var = 0.0;
  double iso_var = 0.0;          // Kind::Isotropic
  Eigen::VectorXd diag_var;      // Kind::Diagonal
  Eigen::MatrixXd cov;           // Kind::Full

  static NoiseModel isotropic(double input_var, double output_var = 0.0) {
    NoiseModel m;
    m.kind = Kind::Isotropic;
    m.iso_var = input_var;
    m.output_noise_var = output_var;
    return m;
  }

  static NoiseModel diagonal(Eigen::VectorXd input_vars,
                             double output_var = 0.0) {
    NoiseModel m;
    m.kind = Kind::Diagonal;
    m.diag_var = std::move(input_vars);
    m.output_noise_var = output_var;
    return m;
  }

  static NoiseModel full(Eigen::MatrixXd input_cov, double output_var = 0.0) {
    NoiseModel m;
    m.kind = Kind::Full;
    m.cov = std::move(input_cov);
    m.output_noise_var = output_var;
    return m;
  }

  bool is_zero() const {
    switch (kind) {
      case Kind::Isotropic: return iso_var == 0.0;
      case Kind::Diagonal: return diag_var.isZero(0.0);
      case Kind::Full: return cov.isZero(0.0);
    }
    return true;
  }

  /// Materializes Sigma_x as a dense dim x dim matrix.
  Eigen::MatrixXd cov_matrix(Eigen::Index dim) const {
    switch (kind) {
      case Kind::Isotropic:
        return iso_var * Eigen::MatrixXd::Identity(dim, dim);
      case Kind::Diagonal:
        if (diag_var.size() != dim) {
          throw std::invalid_argument("NoiseModel: dimension mismatch");
        }
        return diag_var.asDiagonal();
      case Kind::Full:
        if (cov.rows() != dim || cov.cols() != dim) {
          throw std::invalid_argument("NoiseModel: dimension mismatch");
        }
        return cov;
    }
    throw std::logic_error("NoiseModel: bad kind");
  }

  /// Checks symmetry (1e-12 scale-relative) and positive semidefiniteness.
  void validate(Eigen::Index dim) const {
    if (!(output_noise_var >= 0.0)) {
      throw std::invalid_argument("NoiseModel: output_noise_var < 0");
    }
    switch (kind) {
      case Kind::Isotropic:
        if (!std::isfinite(iso_var) || iso_var < 0.0) {
          throw std::invalid_argument("NoiseModel: isotropic variance < 0");
        }
        return;
      case Kind::Diagonal:
        if (diag_var.size() != dim) {
          throw std::invalid_argument("NoiseModel: dimension mismatch");
        }
        if (!diag_var.allFinite() || (diag_var.array() < 0.0).any()) {
          throw std::invalid_argument("NoiseModel: negative diagonal variance");
        }
        return;
      case Kind::Full: {
        if (cov.rows() != dim || cov.cols() != dim) {
          throw std::invalid_argument("NoiseModel: dimension mismatch");
        }
        if (!cov.allFinite()) {
          throw std::invalid_argument("NoiseModel: non-finite covariance");
        }
        const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
        if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
          throw std::invalid_argument("NoiseModel: covariance not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
            cov, Eigen::EigenvaluesOnly);
        const double max_eig = std::max(0.0, eig.eigenvalues().maxCoeff());
        if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, max_eig)) {
          throw std::invalid_argument("NoiseModel: covariance not PSD");
        }
        return;
      }
    }
  }
};

/// Factor A with A A' = Sigma for a PSD matrix, via eigendecomposition with
/// small negative eigenvalues clamped to zero. Throws if Sigma is clearly
/// indefinite.
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("psd_factor: matrix must be square");
  }
  if (sigma.isZero(0.0)) {
    return Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  const double max_eig = std::max(0.0, eig.eigenvalues().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, max_eig)) {
    throw std::invalid_argument("psd_factor: matrix not PSD");
  }
  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal();
}

/// Gradient of the predictive mean at `test`: (d_j k_*)' alpha.
inline Eigen::VectorXd mean_gradient(const TrainedGp& model,
                                     const Eigen::VectorXd& test) {
  if (test.size() != model.dim()) {
    throw std::invalid_argument("mean_gradient: dimension mismatch");
  }
  return kernel_grad(test, model.train_inputs(), model.params()).transpose() *
         model.alpha();
}

/// First-order propagated input-noise variance: grad' Sigma_x grad.
inline double propagated_variance(const Eigen::VectorXd& gradient,
                                  const NoiseModel& noise) {
  switch (noise.kind) {
    case NoiseModel::Kind::Isotropic:
      if (noise.iso_var < 0.0) {
        throw std::invalid_argument("propagated_variance: negative variance");
      }
      return noise.iso_var * gradient.squaredNorm();
    case NoiseModel::Kind::Diagonal:
      if (noise.diag_var.size() != gradient.size()) {
        throw std::invalid_argument("propagated_variance: dimension mismatch");
      }
      if ((noise.diag_var.array() < 0.0).any()) {
        throw std::invalid_argument("propagated_variance: negative variance");
      }
      return (noise.diag_var.array() * gradient.array().square()).sum();
    case NoiseModel::Kind::Full: {
      if (noise.cov.rows() != gradient.size() ||
          noise.cov.cols() != gradient.size()) {
        throw std::invalid_argument("propagated_variance: dimension mismatch");
      }
      const double q = gradient.dot(noise.cov * gradient);
      const double scale =
          noise.cov.cwiseAbs().maxCoeff() * gradient.squaredNorm();
      if (q < -1e-10 * std::max(1.0, scale)) {
        throw std::invalid_argument("propagated_variance: input_cov not PSD");
      }
      return std::max(0.0, q);
    }
  }
  throw std::logic_error("propagated_variance: bad kind");
}

/// Full prediction with input-noise propagation: mean and predictive
/// variance from predict(), plus the mean gradient, the propagated variance
/// and their sum.
inline std::vector<PredictionResult> predict_with_noise(
    const TrainedGp& model, const Eigen::MatrixXd& test,
    const NoiseModel& noise) {
  noise.validate(model.dim());
  std::vector<PredictionResult> out = predict(model, test);
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    PredictionResult& r = out[static_cast<std::size_t>(i)];
    r.mean_gradient = mean_gradient(model, test.row(i));
    r.propagated_var = propagated_variance(r.mean_gradient, noise);
    r.combined_var = r.predictive_var + r.propagated_var;
  }
  return out;
}

/// Per-test-point noise variant: row i of `test` is propagated through
/// noise[i]. Used when the input-noise covariance varies across points
/// (region-dependent instrument noise).
inline std::vector<PredictionResult> predict_with_noise(
    const TrainedGp& model, const Eigen::MatrixXd& test,
    const std::vector<NoiseModel>& noise) {
  if (static_cast<Eigen::Index>(noise.size()) != test.rows()) {
    throw std::invalid_argument(
        "predict_with_noise: need one noise model per test row");
  }
  for (const NoiseModel& n : noise) n.validate(model.dim());
  std::vector<PredictionResult> out = predict(model, test);
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    PredictionResult& r = out[static_cast<std::size_t>(i)];
    r.mean_gradient = mean_gradient(model, test.row(i));
    r.propagated_var = propagated_variance(
        r.mean_gradient, noise[static_cast<std::size_t>(i)]);
    r.combined_var = r.predictive_var + r.propagated_var;
  }
  return out;
}

struct MonteCarloResult {
  double mean = 0.0;
  double variance = 0.0;
};

/// Monte-Carlo oracle for the Taylor propagation: perturbs the test input
/// with eps ~ N(0, Sigma_x) and returns the sample mean and unbiased sample
/// variance of the learned predictive mean. Deterministic for a fixed seed.
inline MonteCarloResult monte_carlo_propagation(const TrainedGp& model,
                                                const Eigen::VectorXd& test,
                                                const NoiseModel& noise,
                                                std::int64_t n_samples,
                                                std::uint64_t seed) {
  if (test.size() != model.dim()) {
    throw std::invalid_argument("monte_carlo_propagation: dimension mismatch");
  }
  if (n_samples < 2) {
    throw std::invalid_argument("monte_carlo_propagation: n_samples >= 2");
  }
  noise.validate(model.dim());
  const Eigen::Index d = model.dim();
  const Eigen::MatrixXd factor = psd_factor(noise.cov_matrix(d));
  if (factor.isZero(0.0)) {
    // All samples coincide with the test point; the variance is exactly 0.
    const double mu = predict_mean(model, test.transpose())(0);
    return {mu, 0.0};
  }

  RngEngine engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd values(n_samples);
  const Eigen::Index chunk = 4096;
  Eigen::MatrixXd z(chunk, d);
  for (Eigen::Index start = 0; start < n_samples; start += chunk) {
    const Eigen::Index len = std::min<Eigen::Index>(chunk, n_samples - start);
    for (Eigen::Index i = 0; i < len; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) z(i, j) = normal(engine);
    }
    Eigen::MatrixXd points =
        (z.topRows(len) * factor.transpose()).rowwise() + test.transpose();
    values.segment(start, len) = predict_mean(model, points);
  }
  MonteCarloResult out;
  out.mean = values.mean();
  out.variance = (values.array() - out.mean).square().sum() /
                 static_cast<double>(n_samples - 1);
  return out;
}

}  // namespace gprop
