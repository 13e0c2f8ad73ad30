#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gibbsam/model_space.hpp"
#include "gibbsam/risk.hpp"
#include "gibbsam/rng.hpp"

namespace gibbsam {

struct ProposalParams {
  double sigma2_prop = 1.0;   // proposal variance
  double ridge_lambda = 0.0;  // ridge strength, >= 0

  void validate() const {
    if (!(sigma2_prop > 0.0))
      throw std::invalid_argument("sigma2_prop must be > 0");
    if (!(ridge_lambda >= 0.0))
      throw std::invalid_argument("ridge_lambda must be >= 0");
  }
};

/// Default ridge strength used by the fitting front ends.
inline double default_ridge(int n) { return 1e-8 * n; }

/// Design matrix of model m: one column per coefficient slot, ordered
/// covariate-major, entries basis_k(x[i, j]).
inline Eigen::MatrixXd build_design(const ModelIndex& m, const Dataset& data) {
  data.validate();
  if (static_cast<int>(m.size()) != data.p())
    throw std::invalid_argument("model length does not match dataset p");
  const int d = coeff_dim(m);
  if (d == 0) throw std::invalid_argument("empty model has no design");
  Eigen::MatrixXd design(data.n(), d);
  int col = 0;
  for (int j = 0; j < data.p(); ++j) {
    for (int k = 1; k <= m[j]; ++k) {
      for (int i = 0; i < data.n(); ++i)
        design(i, col) = eval_basis(k, basis_arg(data.x(i, j)));
      ++col;
    }
  }
  return design;
}

struct LseResult {
  Eigen::VectorXd beta;
  bool used_fallback = false;  // set when lambda == 0 met a rank-deficient system
};

/// Ridge-regularized least squares center (G + lambda I) beta = D' y with
/// G = D'D. With lambda == 0 a rank-deficient system falls back to the
/// minimum-norm least squares solution and reports it.
inline LseResult solve_ridge(const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& y, double ridge_lambda) {
  LseResult out;
  if (ridge_lambda > 0.0) {
    Eigen::MatrixXd g = design.transpose() * design;
    g.diagonal().array() += ridge_lambda;
    out.beta = g.ldlt().solve(design.transpose() * y);
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  out.used_fallback = cod.rank() < design.cols();
  out.beta = cod.solve(y);
  return out;
}

inline LseResult lse(const ModelIndex& m, const Dataset& data,
                     const ProposalParams& params) {
  params.validate();
  return solve_ridge(build_design(m, data), data.y, params.ridge_lambda);
}

/// Log density of N(mean, sigma2 I) at theta.
inline double gaussian_log_density(const Eigen::VectorXd& theta,
                                   const Eigen::VectorXd& mean, double sigma2) {
  if (theta.size() != mean.size())
    throw std::invalid_argument("theta and mean dimensions differ");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
  const double d = static_cast<double>(theta.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi * sigma2) -
         (theta - mean).squaredNorm() / (2.0 * sigma2);
}

inline Eigen::VectorXd sample_proposal(const Eigen::VectorXd& mean,
                                       double sigma2, rng::Engine& eng) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
  const double sd = std::sqrt(sigma2);
  Eigen::VectorXd out(mean.size());
  for (int i = 0; i < mean.size(); ++i)
    out(i) = mean(i) + sd * rng::std_normal(eng);
  return out;
}

}  // namespace gibbsam
