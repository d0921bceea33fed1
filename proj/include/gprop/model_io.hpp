#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gprop/errors.hpp"
#include "gprop/gp.hpp"
#include "gprop/preprocessing.hpp"

namespace gprop::io {

constexpr int kModelFormatVersion = 1;

/// Everything cmd_fit learns: the GP itself plus the optional preprocessing
/// stages (column keep-list, input standardizer, PCA, target standardizer)
/// that predictions must replay.
struct ModelBundle {
  TrainedGp gp;
  std::vector<Eigen::Index> keep_columns;  // empty = keep all
  std::optional<Standardizer> input_standardizer;
  std::optional<PcaModel> pca;
  std::optional<Standardizer> target_standardizer;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j,
                                        const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw DataError("model JSON: " + what + " must be a non-empty array");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const nlohmann::json& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw DataError("model JSON: ragged rows in " + what);
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
  }
  return m;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j,
                                        const std::string& what) {
  if (!j.is_array()) {
    throw DataError("model JSON: " + what + " must be an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  }
  return v;
}

}  // namespace detail

inline nlohmann::json bundle_to_json(const ModelBundle& bundle) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["length_scale"] = bundle.gp.params().length_scale;
  j["output_noise_var"] = bundle.gp.output_noise_var();
  j["jitter"] = bundle.gp.jitter();
  j["train_inputs"] = detail::matrix_to_json(bundle.gp.train_inputs());
  j["alpha"] = detail::vector_to_json(bundle.gp.alpha());
  j["chol_factor"] = detail::matrix_to_json(bundle.gp.chol_factor());

  if (bundle.keep_columns.empty()) {
    j["keep_columns"] = nullptr;
  } else {
    j["keep_columns"] = bundle.keep_columns;
  }
  if (bundle.input_standardizer) {
    j["input_standardizer"] = {
        {"mean", detail::vector_to_json(bundle.input_standardizer->mean)},
        {"scale", detail::vector_to_json(bundle.input_standardizer->scale)}};
  } else {
    j["input_standardizer"] = nullptr;
  }
  if (bundle.pca) {
    j["pca"] = {{"center", detail::vector_to_json(bundle.pca->center)},
                {"basis", detail::matrix_to_json(bundle.pca->basis)},
                {"explained_ratio",
                 detail::vector_to_json(bundle.pca->explained_ratio)},
                {"k", bundle.pca->k()}};
  } else {
    j["pca"] = nullptr;
  }
  if (bundle.target_standardizer) {
    j["target_standardizer"] = {
        {"mean", detail::vector_to_json(bundle.target_standardizer->mean)},
        {"scale", detail::vector_to_json(bundle.target_standardizer->scale)}};
  } else {
    j["target_standardizer"] = nullptr;
  }
  return j;
}

inline ModelBundle bundle_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("model JSON: unsupported format_version " +
                      std::to_string(version));
    }
    KernelParams params{j.at("length_scale").get<double>()};
    Eigen::MatrixXd train =
        detail::matrix_from_json(j.at("train_inputs"), "train_inputs");
    Eigen::VectorXd alpha = detail::vector_from_json(j.at("alpha"), "alpha");
    Eigen::MatrixXd chol =
        detail::matrix_from_json(j.at("chol_factor"), "chol_factor");
    // Trust only the lower triangle; the upper one is zero by contract.
    chol = chol.triangularView<Eigen::Lower>();

    ModelBundle bundle{
        TrainedGp(std::move(train), std::move(alpha), std::move(chol), params,
                  j.at("output_noise_var").get<double>(),
                  j.at("jitter").get<double>()),
        {},
        std::nullopt,
        std::nullopt,
        std::nullopt};

    if (j.contains("keep_columns") && !j.at("keep_columns").is_null()) {
      bundle.keep_columns =
          j.at("keep_columns").get<std::vector<Eigen::Index>>();
    }
    if (j.contains("input_standardizer") &&
        !j.at("input_standardizer").is_null()) {
      const nlohmann::json& s = j.at("input_standardizer");
      bundle.input_standardizer =
          Standardizer{detail::vector_from_json(s.at("mean"), "mean"),
                       detail::vector_from_json(s.at("scale"), "scale")};
    }
    if (j.contains("pca") && !j.at("pca").is_null()) {
      const nlohmann::json& p = j.at("pca");
      PcaModel pca{detail::vector_from_json(p.at("center"), "center"),
                   detail::matrix_from_json(p.at("basis"), "basis"),
                   detail::vector_from_json(p.at("explained_ratio"),
                                            "explained_ratio")};
      if (p.at("k").get<Eigen::Index>() != pca.k()) {
        throw DataError("model JSON: pca.k does not match basis width");
      }
      bundle.pca = std::move(pca);
    }
    if (j.contains("target_standardizer") &&
        !j.at("target_standardizer").is_null()) {
      const nlohmann::json& s = j.at("target_standardizer");
      bundle.target_standardizer =
          Standardizer{detail::vector_from_json(s.at("mean"), "mean"),
                       detail::vector_from_json(s.at("scale"), "scale")};
    }
    return bundle;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  }
}

inline void save_model(const std::string& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out << bundle_to_json(bundle).dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

inline ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return bundle_from_json(j);
}

}  // namespace gprop::io
