// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 8 and 11 drive the CLI binary end to end; the
// rest exercise the library against independent oracles.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gprop/csv.hpp"
#include "gprop/evaluation.hpp"
#include "gprop/gp.hpp"
#include "gprop/model_io.hpp"
#include "gprop/preprocessing.hpp"
#include "gprop/synthdata.hpp"
#include "gprop/uncertainty.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Check {
  std::string name;
  double runtime_limit_s = 0.0;  // 0 = no limit
  std::function<bool(std::ostream&)> fn;
};

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(GPROP_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

gprop::Dataset random_dataset(std::mt19937_64& engine, Eigen::Index n,
                              Eigen::Index d, double lo = -2.0,
                              double hi = 2.0) {
  gprop::Dataset data;
  data.inputs = oracles::random_matrix(engine, n, d, lo, hi);
  std::normal_distribution<double> normal(0.0, 1.0);
  data.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) data.targets(i) = normal(engine);
  return data;
}

// --------------------------------------------------------------------------
// 1. Analytic kernel gradient vs central finite differences.

bool check_kernel_gradient(std::ostream& log) {
  std::mt19937_64 engine(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 1 + engine() % 10;
    const Eigen::Index n = 1 + engine() % 6;
    const double sigma =
        std::exp(std::log(0.1) + unit(engine) * std::log(100.0));
    const gprop::KernelParams p{sigma};
    VectorXd test(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      test(j) = sigma * (2.0 * unit(engine) - 1.0);
    }
    MatrixXd train(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double mag = sigma * (0.05 + 1.45 * unit(engine));
        train(i, j) = test(j) + (unit(engine) < 0.5 ? -mag : mag);
      }
    }
    const MatrixXd analytic = gprop::kernel_grad(test, train, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorXd row = train.row(i);
      const VectorXd fd = oracles::central_diff_gradient(
          [&](const VectorXd& x) { return gprop::kernel_eval(x, row, p); },
          test, h);
      for (Eigen::Index j = 0; j < d; ++j) {
        const double denom =
            std::max(std::abs(fd(j)), std::abs(analytic(i, j)));
        const double rel = std::abs(analytic(i, j) - fd(j)) / denom;
        worst = std::max(worst, rel);
      }
    }
  }
  log << "max relative error " << worst;
  return worst < 1e-6;
}

// --------------------------------------------------------------------------
// 2. Predictive-mean gradient vs finite differences of the mean.

bool check_mean_gradient(std::ostream& log) {
  std::mt19937_64 engine(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + engine() % 49;
    const Eigen::Index d = 1 + engine() % 5;
    const gprop::Dataset data = random_dataset(engine, n, d);
    const gprop::KernelParams p{0.5 + 1.5 * unit(engine)};
    const auto model = gprop::fit(data, p, 0.01 + 0.2 * unit(engine));
    const VectorXd test = oracles::random_matrix(engine, d, 1).col(0);
    const VectorXd analytic = gprop::mean_gradient(model, test);
    const VectorXd fd = oracles::central_diff_gradient(
        [&](const VectorXd& x) {
          return gprop::predict_mean(model, x.transpose())(0);
        },
        test, 1e-5);
    const double rel = (analytic - fd).norm() / std::max(fd.norm(), 1e-12);
    worst = std::max(worst, rel);
  }
  log << "max relative error " << worst;
  return worst < 1e-5;
}

// --------------------------------------------------------------------------
// 3. Cholesky inference vs explicit-inverse brute force.

bool check_exact_inference(std::ostream& log) {
  std::mt19937_64 engine(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + engine() % 8;
    const Eigen::Index d = 1 + engine() % 3;
    const gprop::Dataset data = random_dataset(engine, n, d);
    const gprop::KernelParams p{0.4 + 2.0 * unit(engine)};
    const double noise = 0.01 + 0.5 * unit(engine);
    const auto model = gprop::fit(data, p, noise);
    const VectorXd test = oracles::random_matrix(engine, d, 1).col(0);

    const auto dense = oracles::dense_predict(data.inputs, data.targets, test,
                                              p, noise, model.jitter());
    const auto res = gprop::predict(model, test.transpose());
    worst = std::max(worst, std::abs(res[0].mean - dense.mean));
    worst = std::max(worst, std::abs(res[0].predictive_var - dense.variance));
    const double lml_dense = oracles::dense_lml(data.inputs, data.targets, p,
                                                noise, model.jitter());
    worst = std::max(
        worst,
        std::abs(gprop::log_marginal_likelihood(model, data.targets) -
                 lml_dense));
  }
  log << "max absolute deviation " << worst;
  return worst < 1e-8;
}

// --------------------------------------------------------------------------
// 4. Posterior-variance bounds 0 <= sigma*^2 - sigma_y^2 <= 1.

bool check_variance_bounds(std::ostream& log) {
  std::mt19937_64 engine(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long checked = 0;
  double lo = 1e300, hi = -1e300;
  for (int m = 0; m < 40; ++m) {
    const Eigen::Index n = 2 + engine() % 40;
    const Eigen::Index d = 1 + engine() % 5;
    const gprop::Dataset data = random_dataset(engine, n, d);
    const double noise = 0.3 * unit(engine);
    const auto model =
        gprop::fit(data, gprop::KernelParams{0.3 + 2.0 * unit(engine)}, noise);
    const MatrixXd test = oracles::random_matrix(engine, 250, d, -5.0, 5.0);
    for (const auto& r : gprop::predict(model, test)) {
      const double centered = r.predictive_var - noise;
      lo = std::min(lo, centered);
      hi = std::max(hi, centered);
      ++checked;
      if (centered < 0.0 || centered > 1.0 + 1e-12) {
        log << "violation: sigma*^2 - sigma_y^2 = " << centered;
        return false;
      }
    }
  }
  log << checked << " points, range [" << lo << ", " << hi << "]";
  return checked == 10000;
}

// --------------------------------------------------------------------------
// 5. First-order propagation vs Monte-Carlo on a near-linear fit.

bool check_taylor_vs_monte_carlo(std::ostream& log) {
  gprop::SyntheticSpec spec;
  spec.n_train = 500;
  spec.n_test = 1;
  spec.dim = 2;
  spec.latent = gprop::Latent::Linear;
  spec.output_noise_var = 0.01;
  spec.seed = 515;
  spec.domain = gprop::Box::cube(2, -2.0, 2.0);
  const gprop::SyntheticData data = gprop::generate(spec);

  gprop::OptimizerConfig config;
  config.restarts = 2;
  config.max_iterations = 40;
  config.seed = 7;
  const auto opt = gprop::optimize_hyperparameters(data.train, config);
  const auto model = gprop::fit(data.train, opt.params, opt.output_noise_var);
  const double sigma = opt.params.length_scale;

  VectorXd test(2);
  test << 1.4, -1.2;  // near the data boundary, where the mean has curvature
  const VectorXd grad = gprop::mean_gradient(model, test);

  // The sweep reuses one seed, so the scale ladder sees common random
  // numbers and the sampling error largely cancels across scales.
  const auto rel_gap = [&](double scale, std::int64_t n_samples) {
    const auto noise = gprop::NoiseModel::isotropic(scale * scale);
    const double taylor = gprop::propagated_variance(grad, noise);
    const auto mc =
        gprop::monte_carlo_propagation(model, test, noise, n_samples, 909);
    return std::abs(mc.variance - taylor) / taylor;
  };

  const double gap_at_half = rel_gap(0.05 * sigma, 100000);
  const double g1 = rel_gap(0.10 * sigma, 1000000);
  const double g2 = rel_gap(0.05 * sigma, 1000000);
  const double g3 = rel_gap(0.025 * sigma, 1000000);
  log << "length_scale " << sigma << ", gap@0.05s (n=1e5) " << gap_at_half
      << ", sweep " << g1 << " > " << g2 << " > " << g3;
  return gap_at_half < 0.10 && g1 > g2 && g2 > g3;
}

// --------------------------------------------------------------------------
// 6. Analytic LML gradient vs finite differences.

bool check_lml_gradient(std::ostream& log) {
  std::mt19937_64 engine(606);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 4 + engine() % 20;
    const Eigen::Index d = 1 + engine() % 3;
    const gprop::Dataset data = random_dataset(engine, n, d);
    const double log_ls = std::log(0.3) + unit(engine) * std::log(10.0);
    const double log_nv = std::log(0.01) + unit(engine) * std::log(30.0);
    const auto g = gprop::lml_with_gradient(
        data, gprop::KernelParams{std::exp(log_ls)}, std::exp(log_nv));
    const auto value = [&](double u, double v) {
      return gprop::lml_with_gradient(data, gprop::KernelParams{std::exp(u)},
                                      std::exp(v))
          .value;
    };
    const double h = 1e-6;
    Eigen::Vector2d analytic(g.d_log_length_scale, g.d_log_noise_var);
    Eigen::Vector2d fd(
        (value(log_ls + h, log_nv) - value(log_ls - h, log_nv)) / (2.0 * h),
        (value(log_ls, log_nv + h) - value(log_ls, log_nv - h)) / (2.0 * h));
    worst = std::max(worst,
                     (analytic - fd).norm() / std::max(fd.norm(), 1e-12));
  }
  log << "max relative error " << worst;
  return worst < 1e-5;
}

// --------------------------------------------------------------------------
// 7. Hyperparameter recovery from a GP prior sample.

bool check_hyperparameter_recovery(std::ostream& log) {
  std::mt19937_64 engine(707);
  const Eigen::Index n = 200;
  const MatrixXd x = oracles::random_matrix(engine, n, 1, -5.0, 5.0);
  const double true_ls = 1.0;
  const VectorXd y =
      oracles::sample_gp_prior(x, gprop::KernelParams{true_ls}, 0.01, engine);
  gprop::OptimizerConfig config;
  config.seed = 11;
  const auto result = gprop::optimize_hyperparameters({x, y}, config);
  log << "recovered length_scale " << result.params.length_scale
      << " (true 1.0), noise_var " << result.output_noise_var;
  return result.params.length_scale > true_ls / 1.5 &&
         result.params.length_scale < true_ls * 1.5;
}

// --------------------------------------------------------------------------
// 8. End-to-end pipeline analogue with heteroskedastic input noise and a
//    training-density gap, via the CLI.

bool check_pipeline_analogue(std::ostream& log) {
  const fs::path dir = fs::temp_directory_path() / "gprop_acceptance_pipeline";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };

  // Input noise 0.2^2 I in the x0 > 0 half; training gap in a quarter of the
  // clean half; frozen seed.
  const std::string synth_flags =
      "synth --n-train 2000 --n-test 4000 --dim 4 --latent sinmix "
      "--output-noise-var 0.01 --box -2:2 "
      "--noise-region 0:2,-2:2,-2:2,-2:2=0.04 "
      "--train-gap -2:-0.7,0.7:2,-2:2,-2:2 --seed 4242";
  if (run_cli(synth_flags + " --out-train " + p("train.csv") + " --out-test " +
              p("test.csv") + " --out-truth " + p("truth.csv") +
              " --out-noise " + p("noise.csv")) != 0) {
    log << "synth failed";
    return false;
  }
  if (run_cli("fit --train " + p("train.csv") + " --out " + p("model.json") +
              " --length-scale 0.55 --noise-var 0.01") != 0) {
    log << "fit failed";
    return false;
  }
  if (run_cli("predict --model " + p("model.json") + " --test " +
              p("test.csv") + " --noise-per-point " + p("noise.csv") +
              " --out " + p("pred.csv")) != 0) {
    log << "predict failed";
    return false;
  }
  if (run_cli("eval --pred " + p("pred.csv") + " --truth " + p("truth.csv") +
              " --out-report " + p("report.json") + " --out-maps " +
              p("maps.csv")) != 0) {
    log << "eval failed";
    return false;
  }

  nlohmann::json report;
  std::ifstream(p("report.json")) >> report;
  const double r2 = report.at("r_squared").get<double>();
  const double corr_pred = report.at("corr_predvar_abserr").get<double>();
  const double corr_prop = report.at("corr_propvar_abserr").get<double>();
  const double corr_comb = report.at("corr_combined_abserr").get<double>();

  // Regional correlations: the noisy region is identified from the per-point
  // true covariance, the gap region from the (uncorrupted there) inputs.
  const gprop::io::CsvTable pred = gprop::io::read_csv(p("pred.csv"));
  const gprop::io::CsvTable noise = gprop::io::read_csv(p("noise.csv"));
  const MatrixXd test_x = gprop::io::read_inputs_csv(p("test.csv"));
  const VectorXd truth = gprop::io::read_targets_csv(p("truth.csv"));
  const VectorXd means = pred.data.col(pred.column("mean"));
  const VectorXd pred_var = pred.data.col(pred.column("predictive_var"));
  const VectorXd prop_var = pred.data.col(pred.column("propagated_var"));
  const VectorXd abs_err = (means - truth).cwiseAbs();

  std::vector<Eigen::Index> noisy, gap;
  for (Eigen::Index i = 0; i < test_x.rows(); ++i) {
    if (noise.data.row(i).cwiseAbs().maxCoeff() > 0.0) noisy.push_back(i);
    const bool in_gap = test_x(i, 0) >= -2.0 && test_x(i, 0) <= -0.7 &&
                        test_x(i, 1) >= 0.7 && test_x(i, 1) <= 2.0;
    if (in_gap) gap.push_back(i);
  }
  const auto subset = [](const VectorXd& v,
                         const std::vector<Eigen::Index>& idx) {
    VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
    return out;
  };
  // A channel that is constant inside a region has an undefined correlation
  // there; it cannot outrank a defined one.
  const auto corr = [](const VectorXd& a, const VectorXd& b) {
    const auto c = gprop::pearson(a, b);
    return c.has_value() ? *c : -2.0;
  };
  const double noisy_prop = corr(subset(prop_var, noisy), subset(abs_err, noisy));
  const double noisy_pred = corr(subset(pred_var, noisy), subset(abs_err, noisy));
  const double gap_prop = corr(subset(prop_var, gap), subset(abs_err, gap));
  const double gap_pred = corr(subset(pred_var, gap), subset(abs_err, gap));

  log << "r2 " << r2 << "; noisy region (n=" << noisy.size() << ") prop "
      << noisy_prop << " vs pred " << noisy_pred << "; gap region (n="
      << gap.size() << ") pred " << gap_pred << " vs prop " << gap_prop
      << "; global comb " << corr_comb << " vs max(" << corr_pred << ", "
      << corr_prop << ")";

  const bool a = r2 >= 0.8;
  const bool b = noisy_prop > noisy_pred;
  const bool c = gap_pred > gap_prop && gap_pred > 0.0;
  const bool d = corr_comb >= std::max(corr_pred, corr_prop);
  if (!a) log << " [R2 FAILED]";
  if (!b) log << " [noisy-region ordering FAILED]";
  if (!c) log << " [gap-region ordering FAILED]";
  if (!d) log << " [combined-channel ordering FAILED]";
  return a && b && c && d;
}

// --------------------------------------------------------------------------
// 9. PCA on data with three informative directions.

bool check_pca(std::ostream& log) {
  std::mt19937_64 engine(909);
  const Eigen::Index n = 300, d = 20;
  const MatrixXd factors = oracles::random_matrix(engine, n, 3, -1.0, 1.0);
  MatrixXd mix = oracles::random_matrix(engine, 3, d, -1.0, 1.0);
  mix.row(0) *= 10.0;
  mix.row(1) *= 5.0;
  mix.row(2) *= 2.0;
  const MatrixXd x =
      factors * mix + 0.001 * oracles::random_matrix(engine, n, d, -1.0, 1.0);

  const auto model = gprop::pca_fit(x, 0.99);
  const MatrixXd gram = model.basis.transpose() * model.basis;
  const double ortho =
      (gram - MatrixXd::Identity(model.k(), model.k())).cwiseAbs().maxCoeff();
  const double s = 0.37;
  const MatrixXd projected =
      gprop::pca_project_noise(model, s * MatrixXd::Identity(d, d));
  const double iso_err =
      (projected - s * MatrixXd::Identity(model.k(), model.k()))
          .cwiseAbs()
          .maxCoeff();
  log << "k " << model.k() << ", orthonormality " << ortho
      << ", iso projection error " << iso_err;
  return model.k() <= 4 && ortho <= 1e-10 && iso_err <= 1e-12;
}

// --------------------------------------------------------------------------
// 10. Model serialization round trip.

bool check_serialization(std::ostream& log) {
  std::mt19937_64 engine(1010);
  const Eigen::Index n = 60, d_raw = 8;
  const MatrixXd x_raw = oracles::random_matrix(engine, n, d_raw);
  VectorXd y(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = 5.0 + 3.0 * std::sin(x_raw.row(i).sum()) + 0.1 * normal(engine);
  }
  const gprop::Standardizer in_std = gprop::standardize_fit(x_raw);
  const MatrixXd x_std = gprop::standardize_apply(in_std, x_raw);
  const gprop::PcaModel pca = gprop::pca_fit(x_std, 0.999);
  const MatrixXd z = gprop::pca_transform(pca, x_std);
  const gprop::Standardizer t_std = gprop::standardize_fit(y);
  const VectorXd y_std = gprop::standardize_apply(t_std, y);

  gprop::io::ModelBundle bundle{
      gprop::fit(gprop::Dataset{z, y_std}, gprop::KernelParams{1.1}, 0.02),
      {},
      in_std,
      pca,
      t_std};
  const fs::path dir = fs::temp_directory_path() / "gprop_acceptance_ser";
  fs::create_directories(dir);
  const std::string file = (dir / "model.json").string();
  gprop::io::save_model(file, bundle);
  const gprop::io::ModelBundle loaded = gprop::io::load_model(file);

  const MatrixXd test_raw = oracles::random_matrix(engine, 30, d_raw);
  const MatrixXd zt = gprop::pca_transform(
      pca, gprop::standardize_apply(in_std, test_raw));
  const auto noise = gprop::NoiseModel::isotropic(0.01);
  const auto a = gprop::predict_with_noise(bundle.gp, zt, noise);
  const auto b = gprop::predict_with_noise(loaded.gp, zt, noise);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i].mean - b[i].mean));
    worst = std::max(worst, std::abs(a[i].predictive_var - b[i].predictive_var));
    worst = std::max(worst, std::abs(a[i].propagated_var - b[i].propagated_var));
    worst = std::max(worst, std::abs(a[i].combined_var - b[i].combined_var));
  }
  fs::remove_all(dir);
  log << "max prediction deviation " << worst;
  return worst <= 1e-12;
}

// --------------------------------------------------------------------------
// 11. Byte-identical CLI outputs for fixed flags and seed.

bool check_cli_determinism(std::ostream& log) {
  const fs::path dir = fs::temp_directory_path() / "gprop_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const std::string& name) { return (dir / name).string(); };

  for (const std::string tag : {"a", "b"}) {
    const std::string synth_flags =
        "synth --n-train 120 --n-test 80 --dim 2 --latent sinmix "
        "--output-noise-var 0.02 --noise-region 0:2,0:2=0.01 --seed 77 ";
    if (run_cli(synth_flags + "--out-train " + p("train_" + tag + ".csv") +
                " --out-test " + p("test_" + tag + ".csv") + " --out-truth " +
                p("truth_" + tag + ".csv") + " --out-noise " +
                p("noise_" + tag + ".csv")) != 0) {
      log << "synth failed";
      return false;
    }
    if (run_cli("fit --train " + p("train_" + tag + ".csv") + " --out " +
                p("model_" + tag + ".json") + " --restarts 3 --seed 5") != 0) {
      log << "fit failed";
      return false;
    }
    if (run_cli("predict --model " + p("model_" + tag + ".json") + " --test " +
                p("test_" + tag + ".csv") + " --noise-iso 0.01 --out " +
                p("pred_" + tag + ".csv")) != 0) {
      log << "predict failed";
      return false;
    }
    if (run_cli("eval --pred " + p("pred_" + tag + ".csv") + " --truth " +
                p("truth_" + tag + ".csv") + " --out-report " +
                p("report_" + tag + ".json") + " --out-maps " +
                p("maps_" + tag + ".csv")) != 0) {
      log << "eval failed";
      return false;
    }
  }
  for (const std::string name :
       {"train_@.csv", "test_@.csv", "truth_@.csv", "noise_@.csv",
        "model_@.json", "pred_@.csv", "report_@.json", "maps_@.csv"}) {
    std::string a = name, b = name;
    a.replace(a.find('@'), 1, "a");
    b.replace(b.find('@'), 1, "b");
    if (slurp(p(a)) != slurp(p(b))) {
      log << a << " differs between runs";
      return false;
    }
  }
  log << "all eight artifacts byte-identical";
  return true;
}

}  // namespace

int main() {
  const std::vector<Check> checks = {
      {"1 kernel gradient vs finite differences (rel < 1e-6)", 1.0,
       check_kernel_gradient},
      {"2 mean gradient vs finite differences (rel < 1e-5)", 10.0,
       check_mean_gradient},
      {"3 Cholesky inference vs explicit inverse (tol 1e-8)", 0.0,
       check_exact_inference},
      {"4 posterior variance bounds on 10000 points", 0.0,
       check_variance_bounds},
      {"5 Taylor propagation vs Monte Carlo (10%, monotone)", 120.0,
       check_taylor_vs_monte_carlo},
      {"6 LML gradient vs finite differences (rel < 1e-5)", 0.0,
       check_lml_gradient},
      {"7 length-scale recovery within factor 1.5", 0.0,
       check_hyperparameter_recovery},
      {"8 pipeline analogue: R2 and error-map correlations", 300.0,
       check_pipeline_analogue},
      {"9 PCA: k <= 4, orthonormal basis, isotropic projection", 0.0,
       check_pca},
      {"10 model round trip changes no prediction by > 1e-12", 0.0,
       check_serialization},
      {"11 CLI determinism: byte-identical artifacts", 0.0,
       check_cli_determinism},
  };

  int failed = 0;
  for (const Check& check : checks) {
    std::ostringstream detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = check.fn(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (check.runtime_limit_s > 0.0 && seconds > check.runtime_limit_s) {
      ok = false;
      detail << " [over runtime limit of " << check.runtime_limit_s << "s]";
    }
    std::cout << (ok ? "PASS" : "FAIL") << "  " << check.name << "  ["
              << detail.str() << "]  (" << seconds << "s)\n";
    if (!ok) ++failed;
  }
  if (failed == 0) {
    std::cout << "ALL " << checks.size() << " CRITERIA PASSED\n";
  } else {
    std::cout << failed << " CRITERIA FAILED\n";
  }
  return failed;
}
