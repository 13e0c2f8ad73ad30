#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "gibbsam/basis.hpp"
#include "gibbsam/prior.hpp"
#include "gibbsam/rng.hpp"

namespace gibbsam {

struct Dataset {
  Eigen::MatrixXd x;  // n rows, p columns
  Eigen::VectorXd y;  // n responses

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }

  void validate() const {
    if (x.rows() < 1) throw std::invalid_argument("dataset must have n >= 1");
    if (x.cols() < 1) throw std::invalid_argument("dataset must have p >= 1");
    if (y.size() != x.rows())
      throw std::invalid_argument("response length does not match design rows");
    if (!y.allFinite() || !x.allFinite())
      throw std::invalid_argument("dataset contains non-finite values");
  }
};

enum class DeltaMode { Practical, Theoretical, Explicit };

/// Inverse temperature selection.
/// Practical:   delta = n / (4 sigma^2)
/// Theoretical: delta = n ell / (w + 4 (sigma^2 + C^2)), w = 8 C max(L, C)
/// Explicit:    delta = explicit_value
struct TemperatureSpec {
  DeltaMode mode = DeltaMode::Practical;
  double noise_var = 0.0;     // sigma^2
  double bernstein_l = 1.0;   // L
  double ell = 1.0;           // slack in (0, 1)
  double c_radius = 1e6;      // C
  double explicit_value = 0.0;
};

inline double resolve_delta(const TemperatureSpec& spec, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  switch (spec.mode) {
    case DeltaMode::Practical:
      if (!(spec.noise_var > 0.0))
        throw std::invalid_argument("practical delta requires noise_var > 0");
      return n / (4.0 * spec.noise_var);
    case DeltaMode::Theoretical: {
      if (!(spec.noise_var > 0.0))
        throw std::invalid_argument("theoretical delta requires noise_var > 0");
      if (!(spec.ell > 0.0 && spec.ell < 1.0))
        throw std::invalid_argument("ell must lie in (0, 1)");
      if (!(spec.c_radius > 0.0) || !(spec.bernstein_l > 0.0))
        throw std::invalid_argument("c_radius and bernstein_l must be > 0");
      const double w =
          8.0 * spec.c_radius * std::max(spec.bernstein_l, spec.c_radius);
      return n * spec.ell /
             (w + 4.0 * (spec.noise_var + spec.c_radius * spec.c_radius));
    }
    default:
      if (!(spec.explicit_value > 0.0))
        throw std::invalid_argument("explicit delta must be > 0");
      return spec.explicit_value;
  }
}

/// Mean squared residual r_n(f) = (1/n) sum_i (y_i - f(x_i))^2.
inline double empirical_risk(const AdditiveFunction& f, const Dataset& data) {
  data.validate();
  if (static_cast<int>(f.model.size()) != data.p())
    throw std::invalid_argument("model length does not match dataset p");
  double acc = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double r = data.y(i) - eval_additive(f, data.x.row(i));
    acc += r * r;
  }
  return acc / data.n();
}

/// Log of the unnormalized posterior density at (m, theta):
/// log prior + (-delta * r_n). Log-zero outside the coefficient ball.
inline double log_gibbs_score(const ModelIndex& m, const Eigen::VectorXd& theta,
                              const Dataset& data, double delta,
                              const PriorParams& params) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const double lp = log_prior_density(m, theta, params);
  if (lp == kLogZero) return kLogZero;
  return lp - delta * empirical_risk(AdditiveFunction{m, theta}, data);
}

struct ExcessRiskEstimate {
  double lhs = 0.0;  // Monte Carlo estimate of R(f) - R(truth)
  double rhs = 0.0;  // Monte Carlo estimate of E (truth(X) - f(X))^2
  double se_lhs = 0.0;
  double se_rhs = 0.0;
};

/// Estimates both sides of the excess risk identity
///   R(f) - R(truth) = E[(truth(X) - f(X))^2]
/// with a shared stream of design draws and fresh noise on the left side.
inline ExcessRiskEstimate excess_risk_mc(
    const AdditiveFunction& f,
    const std::function<double(const Eigen::RowVectorXd&)>& truth,
    const std::function<Eigen::RowVectorXd(rng::Engine&)>& design_sampler,
    double noise_sd, long n_mc, std::uint64_t seed) {
  if (n_mc < 2) throw std::invalid_argument("n_mc must be >= 2");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be >= 0");
  rng::Engine eng = rng::make_engine(rng::derive_seed(seed, 0x7261));
  double sl = 0.0, sl2 = 0.0, sr = 0.0, sr2 = 0.0;
  for (long i = 0; i < n_mc; ++i) {
    const Eigen::RowVectorXd x = design_sampler(eng);
    const double t = truth(x);
    const double fx = eval_additive(f, x);
    const double y = t + noise_sd * rng::std_normal(eng);
    const double dl = (y - fx) * (y - fx) - (y - t) * (y - t);
    const double dr = (t - fx) * (t - fx);
    sl += dl;
    sl2 += dl * dl;
    sr += dr;
    sr2 += dr * dr;
  }
  ExcessRiskEstimate est;
  const double n = static_cast<double>(n_mc);
  est.lhs = sl / n;
  est.rhs = sr / n;
  est.se_lhs = std::sqrt(std::max(0.0, sl2 / n - est.lhs * est.lhs) / n);
  est.se_rhs = std::sqrt(std::max(0.0, sr2 / n - est.rhs * est.rhs) / n);
  return est;
}

}  // namespace gibbsam
