#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gprop/errors.hpp"
#include "gprop/gp.hpp"
#include "gprop/rng.hpp"
#include "gprop/uncertainty.hpp"

namespace gprop {

/// Axis-aligned box, used for sampling domains, heteroskedastic noise
/// regions and training-density gaps.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box cube(Eigen::Index dim, double lo, double hi) {
    return Box{Eigen::VectorXd::Constant(dim, lo),
               Eigen::VectorXd::Constant(dim, hi)};
  }

  void validate(Eigen::Index dim) const {
    if (lo.size() != dim || hi.size() != dim) {
      throw std::invalid_argument("Box: dimension mismatch");
    }
    if (((hi - lo).array() <= 0.0).any()) {
      throw std::invalid_argument("Box: need lo < hi per dimension");
    }
  }

  bool contains(const Eigen::VectorXd& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
};

enum class Latent { SinMix, Linear, Constant };

inline Latent latent_from_name(const std::string& name) {
  if (name == "sinmix") return Latent::SinMix;
  if (name == "linear") return Latent::Linear;
  if (name == "constant") return Latent::Constant;
  throw std::invalid_argument("unknown latent function: " + name);
}

inline std::string latent_name(Latent latent) {
  switch (latent) {
    case Latent::SinMix: return "sinmix";
    case Latent::Linear: return "linear";
    case Latent::Constant: return "constant";
  }
  return "?";
}

inline double latent_eval(Latent latent, const Eigen::VectorXd& x) {
  switch (latent) {
    case Latent::SinMix:
      return (3.0 * x.array()).sin().sum() + 0.5 * x(0) * x(0);
    case Latent::Linear:
      return x.sum();
    case Latent::Constant:
      return 0.0;
  }
  throw std::logic_error("latent_eval: bad latent");
}

struct NoiseRegion {
  Box box;
  NoiseModel noise;
};

/// Desk-scale synthetic problem: seeded uniform inputs over a box, a known
/// smooth latent, Gaussian output noise, and per-region input-noise
/// covariance applied to the test inputs.
struct SyntheticSpec {
  Eigen::Index n_train = 5000;
  Eigen::Index n_test = 1000;
  Eigen::Index dim = 2;
  Latent latent = Latent::SinMix;
  double output_noise_var = 0.0;
  NoiseModel input_noise = NoiseModel::isotropic(0.0);  // outside all regions
  std::vector<NoiseRegion> noise_regions;               // first match wins
  std::vector<Box> train_gaps;  // training inputs are resampled out of these
  std::uint64_t seed = 0;
  Box domain = Box::cube(2, -2.0, 2.0);

  void validate() const {
    if (n_train < 1 || n_test < 1 || dim < 1) {
      throw std::invalid_argument("SyntheticSpec: counts and dim must be >= 1");
    }
    if (!std::isfinite(output_noise_var) || output_noise_var < 0.0) {
      throw std::invalid_argument("SyntheticSpec: output_noise_var >= 0");
    }
    domain.validate(dim);
    input_noise.validate(dim);
    for (const NoiseRegion& r : noise_regions) {
      r.box.validate(dim);
      r.noise.validate(dim);
    }
    for (const Box& g : train_gaps) g.validate(dim);
  }
};

struct SyntheticData {
  Dataset train;
  Dataset test;                          // inputs already corrupted
  Eigen::VectorXd clean_test_targets;    // latent at the uncorrupted inputs
  std::vector<Eigen::MatrixXd> test_input_cov;  // per-point Sigma_x
};

namespace detail {

inline Eigen::VectorXd draw_uniform(const Box& box, Eigen::Index dim,
                                    RngEngine& engine) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    x(j) = box.lo(j) + unit(engine) * (box.hi(j) - box.lo(j));
  }
  return x;
}

}  // namespace detail

/// Deterministic generator. Train and test points come from two sub-streams
/// derived from the master seed, so changing one set's size leaves the
/// other untouched.
inline SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  const Eigen::Index d = spec.dim;

  // Pre-factor every region covariance once.
  const Eigen::MatrixXd default_factor =
      psd_factor(spec.input_noise.cov_matrix(d));
  const Eigen::MatrixXd default_cov = spec.input_noise.cov_matrix(d);
  std::vector<Eigen::MatrixXd> region_factor;
  std::vector<Eigen::MatrixXd> region_cov;
  region_factor.reserve(spec.noise_regions.size());
  for (const NoiseRegion& r : spec.noise_regions) {
    region_cov.push_back(r.noise.cov_matrix(d));
    region_factor.push_back(psd_factor(region_cov.back()));
  }

  SyntheticData out;
  const double out_std = std::sqrt(spec.output_noise_var);

  // Training stream. Each stream gets its own normal distribution: the
  // distribution object caches state, and sharing one would couple the
  // streams.
  {
    RngEngine engine = make_engine(derive_seed(spec.seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    out.train.inputs.resize(spec.n_train, d);
    out.train.targets.resize(spec.n_train);
    for (Eigen::Index i = 0; i < spec.n_train; ++i) {
      Eigen::VectorXd x;
      int attempts = 0;
      do {
        x = detail::draw_uniform(spec.domain, d, engine);
        if (++attempts > 100000) {
          throw DataError("generate: training gaps cover the whole domain");
        }
      } while (std::any_of(spec.train_gaps.begin(), spec.train_gaps.end(),
                           [&](const Box& g) { return g.contains(x); }));
      out.train.inputs.row(i) = x;
      out.train.targets(i) =
          latent_eval(spec.latent, x) + out_std * normal(engine);
    }
  }

  // Test stream: corrupt the inputs, keep the clean targets on the side.
  {
    RngEngine engine = make_engine(derive_seed(spec.seed, 1));
    std::normal_distribution<double> normal(0.0, 1.0);
    out.test.inputs.resize(spec.n_test, d);
    out.test.targets.resize(spec.n_test);
    out.clean_test_targets.resize(spec.n_test);
    out.test_input_cov.reserve(spec.n_test);
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < spec.n_test; ++i) {
      const Eigen::VectorXd x = detail::draw_uniform(spec.domain, d, engine);
      const Eigen::MatrixXd* factor = &default_factor;
      const Eigen::MatrixXd* cov = &default_cov;
      for (std::size_t r = 0; r < spec.noise_regions.size(); ++r) {
        if (spec.noise_regions[r].box.contains(x)) {
          factor = &region_factor[r];
          cov = &region_cov[r];
          break;
        }
      }
      for (Eigen::Index j = 0; j < d; ++j) z(j) = normal(engine);
      const double clean = latent_eval(spec.latent, x);
      out.test.inputs.row(i) = x + (*factor) * z;
      out.test.targets(i) = clean + out_std * normal(engine);
      out.clean_test_targets(i) = clean;
      out.test_input_cov.push_back(*cov);
    }
  }
  return out;
}

}  // namespace gprop
