#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gibbsam/basis.hpp"
#include "gibbsam/model_space.hpp"

namespace gibbsam {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

struct PriorParams {
  double alpha = 0.25;  // sparsity level, in (0, 1/2)
  double c_radius = 1e6;  // l1 ball radius
  int p = 0;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 0.5))
      throw std::invalid_argument("alpha must lie in (0, 1/2)");
    if (!(c_radius > 0.0)) throw std::invalid_argument("c_radius must be > 0");
    if (p < 1) throw std::invalid_argument("p must be >= 1");
  }
};

inline double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Log mass of the model weight
///   eta(m) = norm * C(p, |S(m)|)^{-1} * alpha^{sum_j m_j},
///   norm   = (1 - alpha/(1-alpha)) / (1 - (alpha/(1-alpha))^{p+1}).
/// Computed through lgamma so p in the hundreds stays finite.
inline double log_eta(const ModelIndex& m, const PriorParams& params) {
  params.validate();
  if (static_cast<int>(m.size()) != params.p)
    throw std::invalid_argument("model index length does not match p");
  const double q = params.alpha / (1.0 - params.alpha);
  const double log_norm =
      std::log1p(-q) - std::log1p(-std::pow(q, params.p + 1.0));
  const int s = support_size(m);
  const int total = total_expansion(m);
  return log_norm - log_choose(params.p, s) + total * std::log(params.alpha);
}

/// Log volume of the l1 ball of radius c in dimension M = sum_j m_j:
/// (2c)^M / M!. The empty model has M = 0 and volume 1.
inline double log_ball_volume(const ModelIndex& m, double c_radius) {
  if (!(c_radius > 0.0)) throw std::invalid_argument("c_radius must be > 0");
  const int total = total_expansion(m);
  if (total == 0) return 0.0;
  return total * std::log(2.0 * c_radius) - std::lgamma(total + 1.0);
}

/// Log density of the prior at (m, theta): log eta(m) - log V_m(c) inside the
/// l1 ball, log-zero outside. Throws if theta does not conform to m.
inline double log_prior_density(const ModelIndex& m, const Eigen::VectorXd& theta,
                                const PriorParams& params) {
  if (theta.size() != coeff_dim(m))
    throw std::invalid_argument("coefficient vector does not conform to model");
  if (theta.lpNorm<1>() > params.c_radius) return kLogZero;
  return log_eta(m, params) - log_ball_volume(m, params.c_radius);
}

}  // namespace gibbsam
