// gprop: GP regression with first-order input-noise error propagation.
// Subcommands: synth, fit, predict, eval. Exit codes: 0 success, 1 usage
// error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gprop/csv.hpp"
#include "gprop/errors.hpp"
#include "gprop/evaluation.hpp"
#include "gprop/gp.hpp"
#include "gprop/model_io.hpp"
#include "gprop/preprocessing.hpp"
#include "gprop/synthdata.hpp"
#include "gprop/uncertainty.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + what + ": '" + text + "'");
  }
}

// "lo:hi" applied to every dimension, or a comma-separated per-dimension
// list "lo:hi,lo:hi,...".
gprop::Box parse_box(const std::string& text, Eigen::Index dim,
                     const std::string& what) {
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() == 1 && dim > 1) {
    parts.assign(static_cast<std::size_t>(dim), parts[0]);
  }
  if (static_cast<Eigen::Index>(parts.size()) != dim) {
    throw UsageError(what + ": expected 1 or " + std::to_string(dim) +
                     " lo:hi ranges, got " + std::to_string(parts.size()));
  }
  gprop::Box box;
  box.lo.resize(dim);
  box.hi.resize(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const std::vector<std::string> bounds =
        split(parts[static_cast<std::size_t>(j)], ':');
    if (bounds.size() != 2) {
      throw UsageError(what + ": range must look like lo:hi");
    }
    box.lo(j) = parse_real(bounds[0], what);
    box.hi(j) = parse_real(bounds[1], what);
    if (!(box.lo(j) < box.hi(j))) {
      throw UsageError(what + ": need lo < hi per dimension");
    }
  }
  return box;
}

// "boxspec=VAR": isotropic input-noise variance VAR inside the box.
gprop::NoiseRegion parse_noise_region(const std::string& text,
                                      Eigen::Index dim) {
  const std::size_t eq = text.rfind('=');
  if (eq == std::string::npos) {
    throw UsageError("--noise-region: expected boxspec=variance");
  }
  gprop::NoiseRegion region;
  region.box = parse_box(text.substr(0, eq), dim, "--noise-region");
  const double var = parse_real(text.substr(eq + 1), "--noise-region variance");
  if (var < 0.0) throw UsageError("--noise-region: variance must be >= 0");
  region.noise = gprop::NoiseModel::isotropic(var);
  return region;
}

// "0,1,5-8" -> {0, 1, 5, 6, 7, 8}
std::vector<Eigen::Index> parse_keep_cols(const std::string& text) {
  std::vector<Eigen::Index> cols;
  for (const std::string& part : split(text, ',')) {
    const std::size_t dash = part.find('-');
    if (dash == std::string::npos) {
      const double v = parse_real(part, "--keep-cols");
      if (v < 0 || v != std::floor(v)) {
        throw UsageError("--keep-cols: invalid index '" + part + "'");
      }
      cols.push_back(static_cast<Eigen::Index>(v));
    } else {
      const double lo = parse_real(part.substr(0, dash), "--keep-cols");
      const double hi = parse_real(part.substr(dash + 1), "--keep-cols");
      if (lo < 0 || hi < lo || lo != std::floor(lo) || hi != std::floor(hi)) {
        throw UsageError("--keep-cols: invalid range '" + part + "'");
      }
      for (Eigen::Index c = static_cast<Eigen::Index>(lo);
           c <= static_cast<Eigen::Index>(hi); ++c) {
        cols.push_back(c);
      }
    }
  }
  if (cols.empty()) throw UsageError("--keep-cols: empty list");
  return cols;
}

MatrixXd select_columns(const MatrixXd& x,
                        const std::vector<Eigen::Index>& cols) {
  MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= x.cols()) {
      throw gprop::DataError("column index " + std::to_string(cols[j]) +
                             " out of range for " + std::to_string(x.cols()) +
                             " columns");
    }
    out.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  std::int64_t n_train = 5000;  // the reference experiment's training size
  std::int64_t n_test = 1000;
  std::int64_t dim = 2;
  std::string latent = "sinmix";
  double output_noise_var = 0.0;
  double input_noise_iso = 0.0;
  std::vector<std::string> noise_regions;
  std::vector<std::string> train_gaps;
  std::string box = "-2:2";
  std::uint64_t seed = 0;
  std::string out_train = "train.csv";
  std::string out_test = "test.csv";
  std::string out_truth = "truth.csv";
  std::string out_noise = "noise.csv";
};

int run_synth(const SynthOptions& opt) {
  gprop::SyntheticSpec spec;
  spec.n_train = opt.n_train;
  spec.n_test = opt.n_test;
  spec.dim = opt.dim;
  spec.latent = gprop::latent_from_name(opt.latent);
  spec.output_noise_var = opt.output_noise_var;
  spec.input_noise = gprop::NoiseModel::isotropic(opt.input_noise_iso);
  spec.seed = opt.seed;
  spec.domain = parse_box(opt.box, spec.dim, "--box");
  for (const std::string& r : opt.noise_regions) {
    spec.noise_regions.push_back(parse_noise_region(r, spec.dim));
  }
  for (const std::string& g : opt.train_gaps) {
    spec.train_gaps.push_back(parse_box(g, spec.dim, "--train-gap"));
  }

  const gprop::SyntheticData data = gprop::generate(spec);
  gprop::io::write_dataset_csv(opt.out_train, data.train);
  gprop::io::write_dataset_csv(opt.out_test, data.test);
  gprop::io::write_targets_csv(opt.out_truth, data.clean_test_targets);

  // Per-test-point Sigma_x, flattened row-major.
  std::vector<std::string> header;
  for (Eigen::Index i = 0; i < spec.dim; ++i) {
    for (Eigen::Index j = 0; j < spec.dim; ++j) {
      header.push_back("s" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  MatrixXd flat(spec.n_test, spec.dim * spec.dim);
  for (Eigen::Index p = 0; p < spec.n_test; ++p) {
    const MatrixXd& cov = data.test_input_cov[static_cast<std::size_t>(p)];
    for (Eigen::Index i = 0; i < spec.dim; ++i) {
      for (Eigen::Index j = 0; j < spec.dim; ++j) {
        flat(p, i * spec.dim + j) = cov(i, j);
      }
    }
  }
  gprop::io::write_csv(opt.out_noise, header, flat);

  std::cout << "wrote " << opt.out_train << " (" << spec.n_train << " rows), "
            << opt.out_test << " (" << spec.n_test << " rows), "
            << opt.out_truth << ", " << opt.out_noise << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::string train_path;
  std::string out_model = "model.json";
  double pca_var = 0.0;  // 0 disables PCA; typical enabled value 0.99
  std::string keep_cols;
  bool standardize_inputs = false;
  bool no_standardize_targets = false;
  double length_scale = 0.0;  // 0 means "not given"
  double noise_var = -1.0;    // negative means "not given"
  int restarts = 5;
  int max_iters = 200;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

int run_fit(const FitOptions& opt) {
  gprop::Dataset data = gprop::io::read_dataset_csv(opt.train_path);

  gprop::io::ModelBundle bundle{
      // placeholder; replaced below once preprocessing is settled
      gprop::TrainedGp(MatrixXd::Zero(1, 1), VectorXd::Zero(1),
                       MatrixXd::Identity(1, 1), gprop::KernelParams{1.0}, 0.0,
                       0.0),
      {},
      std::nullopt,
      std::nullopt,
      std::nullopt};

  MatrixXd x = data.inputs;
  if (!opt.keep_cols.empty()) {
    bundle.keep_columns = parse_keep_cols(opt.keep_cols);
    x = select_columns(x, bundle.keep_columns);
  }
  if (opt.standardize_inputs) {
    bundle.input_standardizer = gprop::standardize_fit(x);
    x = gprop::standardize_apply(*bundle.input_standardizer, x);
  }
  if (opt.pca_var != 0.0) {
    bundle.pca = gprop::pca_fit(x, opt.pca_var);
    x = gprop::pca_transform(*bundle.pca, x);
  }

  VectorXd y = data.targets;
  if (!opt.no_standardize_targets) {
    const double var =
        data.n() > 1
            ? (y.array() - y.mean()).square().sum() / double(data.n() - 1)
            : 0.0;
    if (data.n() >= 2 && var > 0.0) {
      bundle.target_standardizer = gprop::standardize_fit(y);
      y = gprop::standardize_apply(*bundle.target_standardizer, y);
    } else {
      std::cerr << "note: skipping target standardization (fewer than 2 rows "
                   "or zero variance)\n";
    }
  }

  const gprop::Dataset prepared{x, y};
  gprop::KernelParams params;
  double noise_var = 0.0;
  const bool ls_given = opt.length_scale != 0.0;
  const bool nv_given = opt.noise_var >= 0.0;
  if (ls_given != nv_given) {
    throw UsageError(
        "provide both --length-scale and --noise-var, or neither");
  }
  if (ls_given) {
    params.length_scale = opt.length_scale;
    noise_var = opt.noise_var;
    std::cout << "fixed hyperparameters: length_scale="
              << gprop::io::format_double(params.length_scale)
              << " noise_var=" << gprop::io::format_double(noise_var) << "\n";
  } else {
    gprop::OptimizerConfig config;
    config.restarts = opt.restarts;
    config.max_iterations = opt.max_iters;
    config.lml_tolerance = opt.tol;
    config.seed = opt.seed;
    const gprop::OptimizeResult result =
        gprop::optimize_hyperparameters(prepared, config);
    params = result.params;
    noise_var = result.output_noise_var;
    std::cout << "optimized hyperparameters: length_scale="
              << gprop::io::format_double(params.length_scale)
              << " noise_var=" << gprop::io::format_double(noise_var)
              << " lml=" << gprop::io::format_double(result.lml) << "\n";
  }

  bundle.gp = gprop::fit(prepared, params, noise_var);
  gprop::io::save_model(opt.out_model, bundle);
  std::cout << "wrote " << opt.out_model << " (n=" << prepared.n()
            << ", input_dim=" << prepared.dim()
            << ", jitter=" << gprop::io::format_double(bundle.gp.jitter());
  if (bundle.pca) std::cout << ", pca_k=" << bundle.pca->k();
  std::cout << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict

struct PredictOptions {
  std::string model_path;
  std::string test_path;
  std::string out_pred = "predictions.csv";
  double noise_iso = -1.0;  // negative = not given
  std::string noise_diag_path;
  std::string noise_cov_path;
  std::string noise_per_point_path;
};

// Builds the noise model in original feature space, then pushes it through
// the stored preprocessing chain (column keep-list, input standardizer,
// PCA) into model input space.
gprop::NoiseModel noise_to_model_space(const gprop::io::ModelBundle& bundle,
                                       gprop::NoiseModel noise) {
  if (!bundle.keep_columns.empty() &&
      noise.kind != gprop::NoiseModel::Kind::Isotropic) {
    if (noise.kind == gprop::NoiseModel::Kind::Diagonal) {
      VectorXd sub(static_cast<Eigen::Index>(bundle.keep_columns.size()));
      for (std::size_t j = 0; j < bundle.keep_columns.size(); ++j) {
        if (bundle.keep_columns[j] >= noise.diag_var.size()) {
          throw gprop::DataError(
              "noise covariance is smaller than the kept column range");
        }
        sub(static_cast<Eigen::Index>(j)) = noise.diag_var(bundle.keep_columns[j]);
      }
      noise = gprop::NoiseModel::diagonal(sub, noise.output_noise_var);
    } else {
      const Eigen::Index k = static_cast<Eigen::Index>(bundle.keep_columns.size());
      MatrixXd sub(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
          const Eigen::Index ci = bundle.keep_columns[static_cast<std::size_t>(i)];
          const Eigen::Index cj = bundle.keep_columns[static_cast<std::size_t>(j)];
          if (ci >= noise.cov.rows() || cj >= noise.cov.cols()) {
            throw gprop::DataError(
                "noise covariance is smaller than the kept column range");
          }
          sub(i, j) = noise.cov(ci, cj);
        }
      }
      noise = gprop::NoiseModel::full(sub, noise.output_noise_var);
    }
  }
  if (bundle.input_standardizer) {
    const VectorXd& scale = bundle.input_standardizer->scale;
    switch (noise.kind) {
      case gprop::NoiseModel::Kind::Isotropic:
        noise = gprop::NoiseModel::diagonal(
            noise.iso_var * scale.array().square().inverse().matrix(),
            noise.output_noise_var);
        break;
      case gprop::NoiseModel::Kind::Diagonal:
        if (noise.diag_var.size() != scale.size()) {
          throw gprop::DataError("noise covariance dimension mismatch");
        }
        noise = gprop::NoiseModel::diagonal(
            (noise.diag_var.array() / scale.array().square()).matrix(),
            noise.output_noise_var);
        break;
      case gprop::NoiseModel::Kind::Full: {
        if (noise.cov.rows() != scale.size()) {
          throw gprop::DataError("noise covariance dimension mismatch");
        }
        const VectorXd inv = scale.array().inverse().matrix();
        noise = gprop::NoiseModel::full(
            inv.asDiagonal() * noise.cov * inv.asDiagonal(),
            noise.output_noise_var);
        break;
      }
    }
  }
  if (bundle.pca) {
    noise = gprop::pca_project_noise(*bundle.pca, noise);
  }
  return noise;
}

// Reads a per-point covariance file: one row per test point, D*D columns
// holding Sigma_x flattened row-major (the layout synth writes).
std::vector<gprop::NoiseModel> read_per_point_noise(const std::string& path) {
  const gprop::io::CsvTable t = gprop::io::read_csv(path);
  const double width = std::sqrt(static_cast<double>(t.data.cols()));
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(width));
  if (d * d != t.data.cols()) {
    throw gprop::DataError(path +
                           ": per-point noise needs D*D columns per row");
  }
  std::vector<gprop::NoiseModel> noise;
  noise.reserve(static_cast<std::size_t>(t.data.rows()));
  for (Eigen::Index r = 0; r < t.data.rows(); ++r) {
    MatrixXd cov(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        cov(i, j) = t.data(r, i * d + j);
      }
    }
    noise.push_back(gprop::NoiseModel::full(std::move(cov)));
  }
  return noise;
}

int run_predict(const PredictOptions& opt) {
  int noise_flags = 0;
  if (opt.noise_iso >= 0.0) ++noise_flags;
  if (!opt.noise_diag_path.empty()) ++noise_flags;
  if (!opt.noise_cov_path.empty()) ++noise_flags;
  if (!opt.noise_per_point_path.empty()) ++noise_flags;
  if (noise_flags > 1) {
    throw UsageError(
        "give at most one of --noise-iso, --noise-diag, --noise-cov, "
        "--noise-per-point");
  }

  const gprop::io::ModelBundle bundle = gprop::io::load_model(opt.model_path);
  MatrixXd x = gprop::io::read_inputs_csv(opt.test_path);

  gprop::NoiseModel noise = gprop::NoiseModel::isotropic(0.0);
  if (opt.noise_iso >= 0.0) {
    noise = gprop::NoiseModel::isotropic(opt.noise_iso);
  } else if (!opt.noise_diag_path.empty()) {
    const gprop::io::CsvTable t = gprop::io::read_csv(opt.noise_diag_path);
    if (t.data.rows() != 1) {
      throw gprop::DataError(opt.noise_diag_path +
                             ": expected exactly one row of variances");
    }
    noise = gprop::NoiseModel::diagonal(t.data.row(0).transpose());
  } else if (!opt.noise_cov_path.empty()) {
    const gprop::io::CsvTable t = gprop::io::read_csv(opt.noise_cov_path);
    if (t.data.rows() != t.data.cols()) {
      throw gprop::DataError(opt.noise_cov_path +
                             ": covariance matrix must be square");
    }
    noise = gprop::NoiseModel::full(t.data);
  }

  if (!bundle.keep_columns.empty()) {
    x = select_columns(x, bundle.keep_columns);
  }
  if (bundle.input_standardizer) {
    if (x.cols() != bundle.input_standardizer->dim()) {
      throw gprop::DataError("test inputs do not match the model's feature "
                             "count after the keep-column step");
    }
    x = gprop::standardize_apply(*bundle.input_standardizer, x);
  }
  if (bundle.pca) {
    if (x.cols() != bundle.pca->input_dim()) {
      throw gprop::DataError("test inputs do not match the PCA input width");
    }
    x = gprop::pca_transform(*bundle.pca, x);
  }
  if (x.cols() != bundle.gp.dim()) {
    throw gprop::DataError("test inputs do not match the model input space");
  }

  std::vector<gprop::PredictionResult> results;
  if (!opt.noise_per_point_path.empty()) {
    std::vector<gprop::NoiseModel> per_point =
        read_per_point_noise(opt.noise_per_point_path);
    if (static_cast<Eigen::Index>(per_point.size()) != x.rows()) {
      throw gprop::DataError(opt.noise_per_point_path +
                             ": row count does not match the test inputs");
    }
    for (gprop::NoiseModel& n : per_point) {
      n = noise_to_model_space(bundle, std::move(n));
    }
    results = gprop::predict_with_noise(bundle.gp, x, per_point);
  } else {
    const gprop::NoiseModel model_noise = noise_to_model_space(bundle, noise);
    results = gprop::predict_with_noise(bundle.gp, x, model_noise);
  }

  double scale = 1.0, offset = 0.0;
  if (bundle.target_standardizer) {
    scale = bundle.target_standardizer->scale(0);
    offset = bundle.target_standardizer->mean(0);
  }
  const Eigen::Index k = bundle.gp.dim();
  std::vector<std::string> header = {"mean", "predictive_var",
                                     "propagated_var", "combined_var"};
  for (Eigen::Index j = 0; j < k; ++j) {
    header.push_back("grad_" + std::to_string(j));
  }
  MatrixXd table(x.rows(), 4 + k);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const gprop::PredictionResult& r = results[static_cast<std::size_t>(i)];
    table(i, 0) = r.mean * scale + offset;
    table(i, 1) = r.predictive_var * scale * scale;
    table(i, 2) = r.propagated_var * scale * scale;
    table(i, 3) = r.combined_var * scale * scale;
    for (Eigen::Index j = 0; j < k; ++j) {
      table(i, 4 + j) = r.mean_gradient(j) * scale;
    }
  }
  gprop::io::write_csv(opt.out_pred, header, table);
  std::cout << "wrote " << opt.out_pred << " (" << x.rows() << " rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string pred_path;
  std::string truth_path;
  std::string out_report = "report.json";
  std::string out_maps = "maps.csv";
};

nlohmann::json optional_to_json(const std::optional<double>& v) {
  if (v.has_value()) return *v;
  return nullptr;
}

int run_eval(const EvalOptions& opt) {
  const gprop::io::CsvTable pred = gprop::io::read_csv(opt.pred_path);
  const VectorXd truth = gprop::io::read_targets_csv(opt.truth_path);
  if (pred.data.rows() != truth.size()) {
    throw gprop::DataError("row count mismatch: " + opt.pred_path + " has " +
                           std::to_string(pred.data.rows()) + ", " +
                           opt.truth_path + " has " +
                           std::to_string(truth.size()));
  }
  const VectorXd means = pred.data.col(pred.column("mean"));
  const VectorXd pred_var = pred.data.col(pred.column("predictive_var"));
  const VectorXd prop_var = pred.data.col(pred.column("propagated_var"));
  const VectorXd comb_var = pred.data.col(pred.column("combined_var"));

  std::vector<gprop::PredictionResult> results(
      static_cast<std::size_t>(means.size()));
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    auto& r = results[static_cast<std::size_t>(i)];
    r.mean = means(i);
    r.predictive_var = pred_var(i);
    r.propagated_var = prop_var(i);
    r.combined_var = comb_var(i);
  }
  const gprop::EvalReport report = gprop::error_map_report(results, truth);

  nlohmann::json j;
  j["n_points"] = report.n_points;
  j["mae"] = report.mae;
  j["r_squared"] = report.r_squared;
  j["corr_predvar_abserr"] = optional_to_json(report.corr_predvar_abserr);
  j["corr_propvar_abserr"] = optional_to_json(report.corr_propvar_abserr);
  j["corr_combined_abserr"] = optional_to_json(report.corr_combined_abserr);
  j["spearman_predvar_abserr"] =
      optional_to_json(report.spearman_predvar_abserr);
  j["spearman_propvar_abserr"] =
      optional_to_json(report.spearman_propvar_abserr);
  j["spearman_combined_abserr"] =
      optional_to_json(report.spearman_combined_abserr);
  std::ofstream out(opt.out_report, std::ios::trunc);
  if (!out) throw gprop::DataError("cannot write file: " + opt.out_report);
  out << j.dump(2) << '\n';
  if (!out) throw gprop::DataError("write failed: " + opt.out_report);

  const VectorXd abs_err = (means - truth).cwiseAbs();
  MatrixXd maps(means.size(), 4);
  maps.col(0) = gprop::histogram_equalize(pred_var);
  maps.col(1) = gprop::histogram_equalize(prop_var);
  maps.col(2) = gprop::histogram_equalize(comb_var);
  maps.col(3) = gprop::histogram_equalize(abs_err);
  gprop::io::write_csv(opt.out_maps,
                       {"eq_predictive_var", "eq_propagated_var",
                        "eq_combined_var", "eq_abs_error"},
                       maps);

  auto show = [](const std::optional<double>& v) {
    return v.has_value() ? gprop::io::format_double(*v) : std::string("n/a");
  };
  std::cout << "n_points              " << report.n_points << "\n"
            << "mae                   " << gprop::io::format_double(report.mae)
            << "\n"
            << "r_squared             "
            << gprop::io::format_double(report.r_squared) << "\n"
            << "pearson  pred_var     " << show(report.corr_predvar_abserr)
            << "\n"
            << "pearson  prop_var     " << show(report.corr_propvar_abserr)
            << "\n"
            << "pearson  combined     " << show(report.corr_combined_abserr)
            << "\n"
            << "spearman pred_var     " << show(report.spearman_predvar_abserr)
            << "\n"
            << "spearman prop_var     " << show(report.spearman_propvar_abserr)
            << "\n"
            << "spearman combined     "
            << show(report.spearman_combined_abserr) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Gaussian process regression with analytic kernel derivatives and "
      "first-order propagation of input noise"};
  app.require_subcommand(1);

  SynthOptions synth_opt;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic train/test/truth/noise CSV quartet");
  synth->add_option("--n-train", synth_opt.n_train, "training points")
      ->capture_default_str();
  synth->add_option("--n-test", synth_opt.n_test, "test points")
      ->capture_default_str();
  synth->add_option("--dim", synth_opt.dim, "input dimension")
      ->capture_default_str();
  synth->add_option("--latent", synth_opt.latent,
                    "latent function: sinmix | linear | constant")
      ->capture_default_str();
  synth->add_option("--output-noise-var", synth_opt.output_noise_var,
                    "variance of additive output noise")
      ->capture_default_str();
  synth->add_option("--input-noise-iso", synth_opt.input_noise_iso,
                    "isotropic input-noise variance outside all regions")
      ->capture_default_str();
  synth->add_option("--noise-region", synth_opt.noise_regions,
                    "boxspec=VAR: isotropic input noise inside a box "
                    "(repeatable, first match wins)");
  synth->add_option("--train-gap", synth_opt.train_gaps,
                    "boxspec: exclude training points from a box (repeatable)");
  synth->add_option("--box", synth_opt.box,
                    "domain box, lo:hi or per-dimension lo:hi,lo:hi,...")
      ->capture_default_str();
  synth->add_option("--seed", synth_opt.seed, "master seed")
      ->capture_default_str();
  synth->add_option("--out-train", synth_opt.out_train, "output path")
      ->capture_default_str();
  synth->add_option("--out-test", synth_opt.out_test, "output path")
      ->capture_default_str();
  synth->add_option("--out-truth", synth_opt.out_truth, "output path")
      ->capture_default_str();
  synth->add_option("--out-noise", synth_opt.out_noise, "output path")
      ->capture_default_str();

  FitOptions fit_opt;
  CLI::App* fit = app.add_subcommand("fit", "Fit a GP to a training CSV");
  fit->add_option("--train", fit_opt.train_path, "training CSV (x0..,y)")
      ->required();
  fit->add_option("--out", fit_opt.out_model, "output model JSON")
      ->capture_default_str();
  fit->add_option("--pca-var", fit_opt.pca_var,
                  "enable PCA with this explained-variance target, e.g. 0.99");
  fit->add_option("--keep-cols", fit_opt.keep_cols,
                  "explicit input-column keep list, e.g. 0,1,5-8");
  fit->add_flag("--standardize-inputs", fit_opt.standardize_inputs,
                "standardize input columns before PCA");
  fit->add_flag("--no-standardize-targets", fit_opt.no_standardize_targets,
                "fit in raw target units");
  fit->add_option("--length-scale", fit_opt.length_scale,
                  "fix the RBF length-scale (model space; skips optimization)");
  fit->add_option("--noise-var", fit_opt.noise_var,
                  "fix the output-noise variance (model space)");
  fit->add_option("--restarts", fit_opt.restarts, "optimizer restarts")
      ->capture_default_str();
  fit->add_option("--max-iters", fit_opt.max_iters, "optimizer iteration cap")
      ->capture_default_str();
  fit->add_option("--tol", fit_opt.tol, "optimizer LML tolerance")
      ->capture_default_str();
  fit->add_option("--seed", fit_opt.seed, "optimizer restart seed")
      ->capture_default_str();

  PredictOptions pred_opt;
  CLI::App* predict = app.add_subcommand(
      "predict", "Predict with uncertainty for a test CSV");
  predict->add_option("--model", pred_opt.model_path, "model JSON")->required();
  predict->add_option("--test", pred_opt.test_path, "test CSV (x0.., [y])")
      ->required();
  predict->add_option("--out", pred_opt.out_pred, "output predictions CSV")
      ->capture_default_str();
  predict->add_option("--noise-iso", pred_opt.noise_iso,
                      "isotropic input-noise variance (original features)");
  predict->add_option("--noise-diag", pred_opt.noise_diag_path,
                      "CSV with one row of per-feature variances");
  predict->add_option("--noise-cov", pred_opt.noise_cov_path,
                      "CSV with a full DxD covariance matrix");
  predict->add_option("--noise-per-point", pred_opt.noise_per_point_path,
                      "CSV with one row-major flattened DxD covariance per "
                      "test point (the synth noise output)");

  EvalOptions eval_opt;
  CLI::App* eval = app.add_subcommand(
      "eval", "Compare predictions against clean truth values");
  eval->add_option("--pred", eval_opt.pred_path, "predictions CSV")->required();
  eval->add_option("--truth", eval_opt.truth_path, "truth CSV (y column)")
      ->required();
  eval->add_option("--out-report", eval_opt.out_report, "output report JSON")
      ->capture_default_str();
  eval->add_option("--out-maps", eval_opt.out_maps,
                   "output histogram-equalized map CSV")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return run_synth(synth_opt);
    if (fit->parsed()) return run_fit(fit_opt);
    if (predict->parsed()) return run_predict(pred_opt);
    if (eval->parsed()) return run_eval(eval_opt);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const gprop::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const gprop::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
