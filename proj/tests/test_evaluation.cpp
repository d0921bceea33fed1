#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gprop/evaluation.hpp"
#include "oracles.hpp"

using Eigen::VectorXd;
using gprop::PredictionResult;

TEST(Mae, HandValuesAndShiftInvariance) {
  VectorXd pred(2), truth(2);
  pred << 1.0, 3.0;
  truth << 2.0, 1.0;
  EXPECT_DOUBLE_EQ(gprop::mae(pred, pred), 0.0);
  EXPECT_DOUBLE_EQ(gprop::mae(pred, truth), 1.5);
  const VectorXd shift = VectorXd::Constant(2, 12.75);
  EXPECT_DOUBLE_EQ(gprop::mae(pred + shift, truth + shift),
                   gprop::mae(pred, truth));
  EXPECT_THROW(gprop::mae(pred, VectorXd::Zero(3)), std::invalid_argument);
  EXPECT_THROW(gprop::mae(VectorXd(), VectorXd()), std::invalid_argument);
}

TEST(RSquared, HandValues) {
  VectorXd truth(3);
  truth << 0.0, 1.0, 2.0;
  EXPECT_DOUBLE_EQ(gprop::r_squared(truth, truth), 1.0);
  EXPECT_DOUBLE_EQ(gprop::r_squared(VectorXd::Constant(3, truth.mean()), truth),
                   0.0);
  VectorXd pred(3);
  pred << 0.0, 0.0, 3.0;
  EXPECT_DOUBLE_EQ(gprop::r_squared(pred, truth), 0.0);
  EXPECT_THROW(gprop::r_squared(pred, VectorXd::Constant(3, 1.0)),
               std::invalid_argument);
}

TEST(RSquared, NeverExceedsOne) {
  std::mt19937_64 engine(80);
  for (int trial = 0; trial < 30; ++trial) {
    const VectorXd truth = oracles::random_matrix(engine, 20, 1).col(0);
    const VectorXd pred = oracles::random_matrix(engine, 20, 1).col(0);
    EXPECT_LE(gprop::r_squared(pred, truth), 1.0);
  }
}

TEST(HistogramEqualize, HandValues) {
  VectorXd v(3);
  v << 5.0, 1.0, 3.0;
  const VectorXd eq = gprop::histogram_equalize(v);
  EXPECT_DOUBLE_EQ(eq(0), 1.0);
  EXPECT_DOUBLE_EQ(eq(1), 0.0);
  EXPECT_DOUBLE_EQ(eq(2), 0.5);
}

TEST(HistogramEqualize, FixedPointAndTies) {
  VectorXd already(3);
  already << 0.0, 0.5, 1.0;
  const VectorXd eq = gprop::histogram_equalize(already);
  EXPECT_DOUBLE_EQ(eq(0), 0.0);
  EXPECT_DOUBLE_EQ(eq(1), 0.5);
  EXPECT_DOUBLE_EQ(eq(2), 1.0);

  const VectorXd all_equal = gprop::histogram_equalize(VectorXd::Constant(4, 3.3));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(all_equal(i), 0.5);

  EXPECT_DOUBLE_EQ(gprop::histogram_equalize(VectorXd::Constant(1, 9.0))(0), 0.5);
}

TEST(HistogramEqualize, MonotoneAndIdempotent) {
  std::mt19937_64 engine(82);
  const VectorXd v = oracles::random_matrix(engine, 50, 1).col(0);
  const VectorXd eq = gprop::histogram_equalize(v);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (v(i) < v(j)) EXPECT_LT(eq(i), eq(j));
    }
  }
  const VectorXd eq2 = gprop::histogram_equalize(eq);
  EXPECT_LT((eq2 - eq).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(eq.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(eq.maxCoeff(), 1.0);

  VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::infinity();
  EXPECT_THROW(gprop::histogram_equalize(bad), std::invalid_argument);
}

TEST(Pearson, AffineInvarianceAndDegeneracy) {
  std::mt19937_64 engine(84);
  const VectorXd a = oracles::random_matrix(engine, 30, 1).col(0);
  const VectorXd b = oracles::random_matrix(engine, 30, 1).col(0);
  const auto base = gprop::pearson(a, b);
  ASSERT_TRUE(base.has_value());
  const VectorXd a2 = (3.0 * a.array() + 5.0).matrix();
  const VectorXd b2 = (b.array() * 0.2 - 1.0).matrix();
  const auto scaled = gprop::pearson(a2, b2);
  ASSERT_TRUE(scaled.has_value());
  EXPECT_NEAR(*base, *scaled, 1e-12);
  EXPECT_FALSE(gprop::pearson(VectorXd::Constant(30, 1.0), b).has_value());
}

TEST(Spearman, RankBased) {
  VectorXd a(4), b(4);
  a << 1.0, 2.0, 3.0, 4.0;
  b << 10.0, 100.0, 1000.0, 10000.0;  // monotone, nonlinear
  const auto rho = gprop::spearman(a, b);
  ASSERT_TRUE(rho.has_value());
  EXPECT_DOUBLE_EQ(*rho, 1.0);
}

namespace {

std::vector<PredictionResult> make_results(const VectorXd& means,
                                           const VectorXd& pred_var,
                                           const VectorXd& prop_var) {
  std::vector<PredictionResult> out(static_cast<std::size_t>(means.size()));
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    auto& r = out[static_cast<std::size_t>(i)];
    r.mean = means(i);
    r.predictive_var = pred_var(i);
    r.propagated_var = prop_var(i);
    r.combined_var = r.predictive_var + r.propagated_var;
  }
  return out;
}

}  // namespace

TEST(ErrorMapReport, PerfectFitHasUndefinedCorrelations) {
  VectorXd truth(3);
  truth << 0.0, 1.0, 2.0;
  const auto results = make_results(truth, VectorXd::Constant(3, 0.2),
                                    VectorXd::Constant(3, 0.1));
  const auto report = gprop::error_map_report(results, truth);
  EXPECT_DOUBLE_EQ(report.mae, 0.0);
  EXPECT_DOUBLE_EQ(report.r_squared, 1.0);
  EXPECT_FALSE(report.corr_predvar_abserr.has_value());
  EXPECT_FALSE(report.corr_propvar_abserr.has_value());
  EXPECT_FALSE(report.corr_combined_abserr.has_value());
}

TEST(ErrorMapReport, PerfectlyInformativeChannel) {
  VectorXd truth(3), means(3);
  truth << 0.0, 1.0, 2.0;
  means << 0.5, 2.0, 2.1;  // abs errors 0.5, 1.0, 0.1
  VectorXd abs_err(3);
  abs_err << 0.5, 1.0, 0.1;
  const auto results = make_results(means, abs_err, VectorXd::Zero(3));
  const auto report = gprop::error_map_report(results, truth);
  ASSERT_TRUE(report.corr_predvar_abserr.has_value());
  EXPECT_NEAR(*report.corr_predvar_abserr, 1.0, 1e-12);
  EXPECT_FALSE(report.corr_propvar_abserr.has_value());  // zero-variance channel
  ASSERT_TRUE(report.corr_combined_abserr.has_value());
  EXPECT_NEAR(*report.corr_combined_abserr, 1.0, 1e-12);
  EXPECT_EQ(report.n_points, 3);
}

TEST(ErrorMapReport, LengthMismatchThrows) {
  VectorXd truth(3);
  truth << 0.0, 1.0, 2.0;
  const auto results = make_results(truth, VectorXd::Ones(3), VectorXd::Zero(3));
  EXPECT_THROW(gprop::error_map_report(results, VectorXd::Zero(4)),
               std::invalid_argument);
}
