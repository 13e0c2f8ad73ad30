#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gibbsam/risk.hpp"
#include "gibbsam/rng.hpp"

namespace gibbsam {

struct SimSpec {
  int model_id = 1;  // 1, 2, or 3
  int n = 200;
  int p = 50;
  std::uint64_t seed = 0;

  void validate() const {
    if (model_id < 1 || model_id > 3)
      throw std::invalid_argument("model_id must be 1, 2, or 3");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (p < 4) throw std::invalid_argument("p must be >= 4");
  }
};

/// Component function of the regression truth for 0-based covariate j
/// (covariate 0 corresponds to data column x1). Covariates beyond the first
/// four contribute zero.
inline double truth_fn(int model_id, int covariate, double x) {
  if (model_id < 1 || model_id > 3)
    throw std::invalid_argument("model_id must be 1, 2, or 3");
  if (covariate < 0) throw std::invalid_argument("covariate must be >= 0");
  if (covariate > 3) return 0.0;
  if (model_id == 1 || model_id == 2) {
    switch (covariate) {
      case 0: return -std::sin(2.0 * x);
      case 1: return x * x * x;
      case 2: return x;
      default: return std::exp(-x) - std::numbers::e / 2.0;
    }
  }
  const double s = std::sin(2.0 * std::numbers::pi * x);
  const double c = std::cos(2.0 * std::numbers::pi * x);
  switch (covariate) {
    case 0: return 5.0 * x;
    case 1: return 3.0 * 4.0 * (x * x - x - 1.0);
    case 2: return 4.0 * s / (2.0 - s);
    default:
      return 6.0 * (0.1 * s + 0.2 * c + 0.3 * s * s + 0.4 * c * c * c +
                    0.5 * s * s * s);
  }
}

inline double noise_variance(int model_id) {
  if (model_id < 1 || model_id > 3)
    throw std::invalid_argument("model_id must be 1, 2, or 3");
  return model_id == 3 ? 0.5 : 0.1;
}

/// Covariance of the correlated Gaussian design: Sigma_ij = 2^{-|i-j|-2}.
inline Eigen::MatrixXd model2_covariance(int p) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  Eigen::MatrixXd sigma(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      sigma(i, j) = std::pow(2.0, -std::abs(i - j) - 2.0);
  return sigma;
}

/// Covariate matrix: iid Uniform(-1, 1) entries for models 1 and 3, rows
/// drawn from N(0, Sigma) through a Cholesky factor for model 2. Rows are
/// filled in order, row-major.
inline Eigen::MatrixXd gen_covariates(const SimSpec& spec, rng::Engine& eng) {
  spec.validate();
  Eigen::MatrixXd x(spec.n, spec.p);
  if (spec.model_id == 2) {
    const Eigen::MatrixXd chol = model2_covariance(spec.p).llt().matrixL();
    Eigen::VectorXd z(spec.p);
    for (int i = 0; i < spec.n; ++i) {
      for (int j = 0; j < spec.p; ++j) z(j) = rng::std_normal(eng);
      x.row(i) = (chol * z).transpose();
    }
    return x;
  }
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.p; ++j) x(i, j) = unif(eng);
  return x;
}

struct SimOutput {
  Dataset data;
  Eigen::VectorXd truth;  // noise-free regression function at the design rows
  double noise_var = 0.0;
};

/// Draws a dataset: covariates, then truth over the first four covariates,
/// then Gaussian noise on a separate substream.
inline SimOutput simulate(const SimSpec& spec) {
  spec.validate();
  SimOutput out;
  rng::Engine eng_x = rng::make_engine(rng::derive_seed(spec.seed, 0x636f76));
  rng::Engine eng_e = rng::make_engine(rng::derive_seed(spec.seed, 0x6e6f69));
  out.data.x = gen_covariates(spec, eng_x);
  out.truth.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 4; ++j)
      acc += truth_fn(spec.model_id, j, out.data.x(i, j));
    out.truth(i) = acc;
  }
  out.noise_var = noise_variance(spec.model_id);
  const double sd = std::sqrt(out.noise_var);
  out.data.y.resize(spec.n);
  for (int i = 0; i < spec.n; ++i)
    out.data.y(i) = out.truth(i) + sd * rng::std_normal(eng_e);
  return out;
}

}  // namespace gibbsam
