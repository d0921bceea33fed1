#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gprop/gp.hpp"

namespace gprop {

/// Mean absolute error.
inline double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size() || pred.size() < 1) {
    throw std::invalid_argument("mae: length mismatch or empty");
  }
  return (pred - truth).cwiseAbs().mean();
}

/// Coefficient of determination 1 - SS_res / SS_tot.
inline double r_squared(const Eigen::VectorXd& pred,
                        const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size() || pred.size() < 2) {
    throw std::invalid_argument("r_squared: need matched lengths >= 2");
  }
  const double mean = truth.mean();
  const double ss_tot = (truth.array() - mean).square().sum();
  if (!(ss_tot > 0.0)) {
    throw std::invalid_argument("r_squared: constant truth");
  }
  const double ss_res = (truth - pred).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

namespace detail {

// 0-based ranks; ties share the mean rank of their tie group.
inline Eigen::VectorXd average_ranks(const Eigen::VectorXd& values) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return values(a) < values(b);
  });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && values(order[static_cast<std::size_t>(j + 1)]) ==
                            values(order[static_cast<std::size_t>(i)])) {
      ++j;
    }
    const double mean_rank = 0.5 * static_cast<double>(i + j);
    for (Eigen::Index t = i; t <= j; ++t) {
      ranks(order[static_cast<std::size_t>(t)]) = mean_rank;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

/// Rank-based remap of a value set onto [0, 1] (mean rank / (n - 1)); the
/// display transform the diagnostic maps use. Order-preserving; a single
/// value maps to 0.5.
inline Eigen::VectorXd histogram_equalize(const Eigen::VectorXd& values) {
  if (values.size() < 1) {
    throw std::invalid_argument("histogram_equalize: empty input");
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("histogram_equalize: non-finite input");
  }
  if (values.size() == 1) {
    return Eigen::VectorXd::Constant(1, 0.5);
  }
  return detail::average_ranks(values) /
         static_cast<double>(values.size() - 1);
}

/// Pearson correlation; absent when either argument has zero variance.
inline std::optional<double> pearson(const Eigen::VectorXd& a,
                                     const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("pearson: need matched lengths >= 2");
  }
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double va = da.square().sum();
  const double vb = db.square().sum();
  if (!(va > 0.0) || !(vb > 0.0)) return std::nullopt;
  return (da * db).sum() / std::sqrt(va * vb);
}

/// Spearman rank correlation (tie-averaged ranks).
inline std::optional<double> spearman(const Eigen::VectorXd& a,
                                      const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman: need matched lengths >= 2");
  }
  return pearson(detail::average_ranks(a), detail::average_ranks(b));
}

/// Accuracy metrics plus the correlation of each uncertainty channel
/// against the absolute prediction error. Undefined correlations (a
/// zero-variance channel) are reported as absent, never as 0.
struct EvalReport {
  Eigen::Index n_points = 0;
  double mae = 0.0;
  double r_squared = 0.0;
  std::optional<double> corr_predvar_abserr;
  std::optional<double> corr_propvar_abserr;
  std::optional<double> corr_combined_abserr;
  std::optional<double> spearman_predvar_abserr;
  std::optional<double> spearman_propvar_abserr;
  std::optional<double> spearman_combined_abserr;
};

inline EvalReport error_map_report(const std::vector<PredictionResult>& results,
                                   const Eigen::VectorXd& truth) {
  const Eigen::Index n = static_cast<Eigen::Index>(results.size());
  if (n != truth.size() || n < 2) {
    throw std::invalid_argument("error_map_report: need matched lengths >= 2");
  }
  Eigen::VectorXd means(n), pred_var(n), prop_var(n), comb_var(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PredictionResult& r = results[static_cast<std::size_t>(i)];
    means(i) = r.mean;
    pred_var(i) = r.predictive_var;
    prop_var(i) = r.propagated_var;
    comb_var(i) = r.combined_var;
  }
  const Eigen::VectorXd abs_err = (means - truth).cwiseAbs();

  EvalReport report;
  report.n_points = n;
  report.mae = mae(means, truth);
  report.r_squared = r_squared(means, truth);
  report.corr_predvar_abserr = pearson(pred_var, abs_err);
  report.corr_propvar_abserr = pearson(prop_var, abs_err);
  report.corr_combined_abserr = pearson(comb_var, abs_err);
  report.spearman_predvar_abserr = spearman(pred_var, abs_err);
  report.spearman_propvar_abserr = spearman(prop_var, abs_err);
  report.spearman_combined_abserr = spearman(comb_var, abs_err);
  return report;
}

}  // namespace gprop
