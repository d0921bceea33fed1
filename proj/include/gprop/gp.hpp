#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "gprop/errors.hpp"
#include "gprop/kernel.hpp"
#include "gprop/rng.hpp"

namespace gprop {

struct Dataset {
  Eigen::MatrixXd inputs;   // N x D
  Eigen::VectorXd targets;  // N

  Eigen::Index n() const { return inputs.rows(); }
  Eigen::Index dim() const { return inputs.cols(); }

  void validate() const {
    if (inputs.rows() < 1 || inputs.cols() < 1) {
      throw std::invalid_argument("Dataset: need N >= 1 and D >= 1");
    }
    if (inputs.rows() != targets.size()) {
      throw std::invalid_argument(
          "Dataset: row count of inputs must equal length of targets");
    }
    if (!inputs.allFinite() || !targets.allFinite()) {
      throw std::invalid_argument("Dataset: non-finite entries");
    }
  }
};

/// One prediction. mean_gradient and propagated_var stay empty/zero until
/// filled by predict_with_noise (uncertainty.hpp); combined_var is always
/// predictive_var + propagated_var.
struct PredictionResult {
  double mean = 0.0;
  double predictive_var = 0.0;
  Eigen::VectorXd mean_gradient;
  double propagated_var = 0.0;
  double combined_var = 0.0;
};

/// Immutable fitted GP: training inputs, dual weights alpha, and the lower
/// Cholesky factor of K + output_noise_var*I + jitter*I.
class TrainedGp {
 public:
  TrainedGp(Eigen::MatrixXd train_inputs, Eigen::VectorXd alpha,
            Eigen::MatrixXd chol_factor, KernelParams params,
            double output_noise_var, double jitter)
      : train_inputs_(std::move(train_inputs)),
        alpha_(std::move(alpha)),
        chol_factor_(std::move(chol_factor)),
        params_(params),
        output_noise_var_(output_noise_var),
        jitter_(jitter) {
    params_.validate();
    const Eigen::Index n = train_inputs_.rows();
    if (alpha_.size() != n || chol_factor_.rows() != n ||
        chol_factor_.cols() != n) {
      throw std::invalid_argument("TrainedGp: inconsistent shapes");
    }
    if (!(output_noise_var_ >= 0.0) || !(jitter_ >= 0.0)) {
      throw std::invalid_argument(
          "TrainedGp: noise variance and jitter must be nonnegative");
    }
    if ((chol_factor_.diagonal().array() <= 0.0).any()) {
      throw std::invalid_argument(
          "TrainedGp: Cholesky factor needs a strictly positive diagonal");
    }
  }

  const Eigen::MatrixXd& train_inputs() const { return train_inputs_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::MatrixXd& chol_factor() const { return chol_factor_; }
  const KernelParams& params() const { return params_; }
  double output_noise_var() const { return output_noise_var_; }
  double jitter() const { return jitter_; }
  Eigen::Index n() const { return train_inputs_.rows(); }
  Eigen::Index dim() const { return train_inputs_.cols(); }

 private:
  Eigen::MatrixXd train_inputs_;
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd chol_factor_;
  KernelParams params_;
  double output_noise_var_;
  double jitter_;
};

namespace detail {

// Jitter policy: start at 1e-10 * max-diagonal, escalate by 10x per failed
// factorization, give up past 1e-4 * max-diagonal.
constexpr double kJitterStart = 1e-10;
constexpr double kJitterCap = 1e-4;

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

inline Factorization factorize_regularized(Eigen::MatrixXd ky) {
  const double max_diag = ky.diagonal().maxCoeff();
  double delta = kJitterStart * max_diag;
  const double cap = kJitterCap * max_diag;
  Factorization out;
  while (true) {
    Eigen::MatrixXd m = ky;
    m.diagonal().array() += delta;
    out.llt.compute(m);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = delta;
      return out;
    }
    delta *= 10.0;
    if (delta > cap * (1.0 + 1e-12)) {
      throw NumericalError(
          "fit: kernel matrix not factorizable at maximum jitter "
          "(degenerate inputs with too little output noise?)");
    }
  }
}

}  // namespace detail

/// Exact GP fit: K = kernel_matrix(X, X), factorize K + noise*I + jitter*I,
/// solve for the dual weights alpha.
inline TrainedGp fit(const Dataset& data, const KernelParams& params,
                     double output_noise_var) {
  data.validate();
  params.validate();
  if (!std::isfinite(output_noise_var) || output_noise_var < 0.0) {
    throw std::invalid_argument(
        "fit: output_noise_var must be finite and >= 0");
  }
  Eigen::MatrixXd ky = kernel_matrix(data.inputs, data.inputs, params);
  ky.diagonal().array() += output_noise_var;
  detail::Factorization fac = detail::factorize_regularized(std::move(ky));
  Eigen::VectorXd alpha = fac.llt.solve(data.targets);
  return TrainedGp(data.inputs, std::move(alpha),
                   Eigen::MatrixXd(fac.llt.matrixL()), params,
                   output_noise_var, fac.jitter);
}

/// Predictive mean only (k_* alpha), cheap path used by the Monte-Carlo
/// propagation oracle.
inline Eigen::VectorXd predict_mean(const TrainedGp& model,
                                    const Eigen::MatrixXd& test) {
  if (test.cols() != model.dim()) {
    throw std::invalid_argument("predict_mean: dimension mismatch");
  }
  return kernel_matrix(test, model.train_inputs(), model.params()) *
         model.alpha();
}

/// Predictive mean and variance per test row. The variance is computed via
/// a triangular solve, v = L^-1 k_*, sigma*^2 = noise + max(0, 1 - v.v); it
/// never forms an explicit inverse.
inline std::vector<PredictionResult> predict(const TrainedGp& model,
                                             const Eigen::MatrixXd& test) {
  if (test.cols() != model.dim()) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  const Eigen::Index m = test.rows();
  std::vector<PredictionResult> out(static_cast<std::size_t>(m));
  const Eigen::Index chunk = 1024;
  for (Eigen::Index start = 0; start < m; start += chunk) {
    const Eigen::Index len = std::min(chunk, m - start);
    Eigen::MatrixXd ks = kernel_matrix(
        model.train_inputs(), test.middleRows(start, len), model.params());
    const Eigen::VectorXd means = ks.transpose() * model.alpha();
    model.chol_factor().triangularView<Eigen::Lower>().solveInPlace(ks);
    for (Eigen::Index j = 0; j < len; ++j) {
      PredictionResult& r = out[static_cast<std::size_t>(start + j)];
      r.mean = means(j);
      const double reduction = ks.col(j).squaredNorm();
      r.predictive_var =
          model.output_noise_var() + std::max(0.0, 1.0 - reduction);
      r.propagated_var = 0.0;
      r.combined_var = r.predictive_var;
    }
  }
  return out;
}

/// Log marginal likelihood of `targets` under the stored factorization:
/// -1/2 y'K_y^-1 y - sum(log L_ii) - N/2 log(2 pi).
inline double log_marginal_likelihood(const TrainedGp& model,
                                      const Eigen::VectorXd& targets) {
  if (targets.size() != model.n()) {
    throw std::invalid_argument("log_marginal_likelihood: length mismatch");
  }
  Eigen::VectorXd z = targets;
  model.chol_factor().triangularView<Eigen::Lower>().solveInPlace(z);
  const double data_term = 0.5 * z.squaredNorm();
  const double log_det_half =
      model.chol_factor().diagonal().array().log().sum();
  const double n = static_cast<double>(model.n());
  return -data_term - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

struct LmlGradient {
  double value = 0.0;
  double d_log_length_scale = 0.0;
  double d_log_noise_var = 0.0;
};

/// LML and its analytic gradient with respect to (log sigma, log sigma_y^2):
/// dLML/dtheta = 1/2 tr((alpha alpha' - K_y^-1) dK_y/dtheta).
inline LmlGradient lml_with_gradient(const Dataset& data,
                                     const KernelParams& params,
                                     double output_noise_var) {
  data.validate();
  params.validate();
  const Eigen::Index n = data.n();
  const double s2 = params.length_scale * params.length_scale;
  const Eigen::MatrixXd d2 = squared_distances(data.inputs, data.inputs);
  const Eigen::MatrixXd k = (d2 / (-2.0 * s2)).array().exp();
  Eigen::MatrixXd ky = k;
  ky.diagonal().array() += output_noise_var;
  detail::Factorization fac = detail::factorize_regularized(std::move(ky));
  const Eigen::VectorXd alpha = fac.llt.solve(data.targets);

  LmlGradient out;
  out.value = -0.5 * data.targets.dot(alpha) -
              Eigen::MatrixXd(fac.llt.matrixL()).diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  const Eigen::MatrixXd ky_inv =
      fac.llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd a = alpha * alpha.transpose() - ky_inv;
  // dK/dlog(sigma) = K .* d^2 / sigma^2; dK_y/dlog(sigma_y^2) = sigma_y^2 I.
  out.d_log_length_scale = 0.5 * (a.array() * k.array() * d2.array()).sum() / s2;
  out.d_log_noise_var = 0.5 * output_noise_var * a.trace();
  return out;
}

struct OptimizerConfig {
  int restarts = 5;
  int max_iterations = 200;
  double lml_tolerance = 1e-6;    // stop when the LML improvement drops below
  double grad_tolerance = 1e-5;   // ... or the gradient inf-norm does
  int max_backtracks = 30;
  std::uint64_t seed = 0;
};

struct RestartTrace {
  double initial_length_scale = 0.0;
  double initial_noise_var = 0.0;
  double initial_lml = -std::numeric_limits<double>::infinity();
  double final_lml = -std::numeric_limits<double>::infinity();
};

struct OptimizeResult {
  KernelParams params;
  double output_noise_var = 0.0;
  double lml = -std::numeric_limits<double>::infinity();
  std::vector<RestartTrace> trace;  // one entry per restart
};

namespace detail {

inline double lml_value(const Dataset& data, double log_ls,
                        double log_noise_var) {
  try {
    KernelParams p{std::exp(log_ls)};
    Eigen::MatrixXd ky = kernel_matrix(data.inputs, data.inputs, p);
    ky.diagonal().array() += std::exp(log_noise_var);
    Factorization fac = factorize_regularized(std::move(ky));
    Eigen::VectorXd z = data.targets;
    Eigen::MatrixXd l = fac.llt.matrixL();
    l.triangularView<Eigen::Lower>().solveInPlace(z);
    return -0.5 * z.squaredNorm() - l.diagonal().array().log().sum() -
           0.5 * static_cast<double>(data.n()) *
               std::log(2.0 * std::numbers::pi);
  } catch (const NumericalError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

// Median pairwise distance between training rows; large sets are strided
// down to keep the pair count bounded. Falls back to 1 for degenerate sets.
inline double median_pairwise_distance(const Eigen::MatrixXd& x) {
  const Eigen::Index cap = 1024;
  Eigen::MatrixXd sub;
  if (x.rows() > cap) {
    sub.resize(cap, x.cols());
    const double stride = static_cast<double>(x.rows()) / static_cast<double>(cap);
    for (Eigen::Index i = 0; i < cap; ++i) {
      sub.row(i) = x.row(static_cast<Eigen::Index>(i * stride));
    }
  } else {
    sub = x;
  }
  const Eigen::Index n = sub.rows();
  if (n < 2) return 1.0;
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist.push_back((sub.row(i) - sub.row(j)).norm());
    }
  }
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  const double med = *mid;
  return med > 0.0 ? med : 1.0;
}

// Keeps exp() of the log-parameters finite.
inline double clamp_log(double v) { return std::clamp(v, -46.0, 46.0); }

}  // namespace detail

/// Maximizes the LML over (log sigma, log sigma_y^2) by gradient ascent with
/// backtracking line search and log-uniform multi-start. Deterministic for a
/// fixed config.seed.
inline OptimizeResult optimize_hyperparameters(
    const Dataset& data, const OptimizerConfig& config = {}) {
  data.validate();
  if (config.restarts < 1) {
    throw std::invalid_argument("optimize_hyperparameters: restarts >= 1");
  }
  const double med = detail::median_pairwise_distance(data.inputs);
  const double mean_y = data.targets.mean();
  double var_y = (data.targets.array() - mean_y).square().sum() /
                 std::max<double>(1.0, static_cast<double>(data.n() - 1));
  if (!(var_y > 0.0)) var_y = 1.0;

  RngEngine engine = make_engine(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  OptimizeResult best;
  for (int r = 0; r < config.restarts; ++r) {
    // Draw log-uniformly: sigma in [0.1, 10] * median distance,
    // sigma_y^2 in [1e-4, 1] * var(y).
    double u = std::log(0.1 * med) + unit(engine) * std::log(100.0);
    double v = std::log(1e-4 * var_y) + unit(engine) * std::log(1e4);

    RestartTrace trace;
    trace.initial_length_scale = std::exp(u);
    trace.initial_noise_var = std::exp(v);

    double lml = detail::lml_value(data, u, v);
    trace.initial_lml = lml;
    if (!std::isfinite(lml)) {
      best.trace.push_back(trace);
      continue;
    }
    for (int iter = 0; iter < config.max_iterations; ++iter) {
      LmlGradient g;
      try {
        g = lml_with_gradient(data, KernelParams{std::exp(u)}, std::exp(v));
      } catch (const NumericalError&) {
        break;
      }
      if (std::max(std::abs(g.d_log_length_scale),
                   std::abs(g.d_log_noise_var)) < config.grad_tolerance) {
        break;
      }
      double step = 1.0;
      double next_u = u, next_v = v, next_lml = lml;
      bool improved = false;
      for (int bt = 0; bt <= config.max_backtracks; ++bt) {
        const double cu = detail::clamp_log(u + step * g.d_log_length_scale);
        const double cv = detail::clamp_log(v + step * g.d_log_noise_var);
        const double cand = detail::lml_value(data, cu, cv);
        if (std::isfinite(cand) && cand > lml) {
          next_u = cu;
          next_v = cv;
          next_lml = cand;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
      const double gain = next_lml - lml;
      u = next_u;
      v = next_v;
      lml = next_lml;
      if (gain < config.lml_tolerance) break;
    }
    trace.final_lml = lml;
    best.trace.push_back(trace);
    if (lml > best.lml) {
      best.params.length_scale = std::exp(u);
      best.output_noise_var = std::exp(v);
      best.lml = lml;
    }
  }
  if (!std::isfinite(best.lml)) {
    throw NumericalError(
        "optimize_hyperparameters: no restart produced a finite LML");
  }
  return best;
}

}  // namespace gprop
