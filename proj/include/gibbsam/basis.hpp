#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gibbsam/model_space.hpp"

namespace gibbsam {

/// Trigonometric dictionary, 1-based index k:
///   k = 1      -> 1
///   k = 2j     -> cos(pi j t)
///   k = 2j + 1 -> sin(pi j t)
/// The system is not normalized.
inline double eval_basis(int k, double t) {
  if (k < 1) throw std::invalid_argument("basis index must be >= 1");
  if (k == 1) return 1.0;
  const int j = k / 2;
  const double a = std::numbers::pi * static_cast<double>(j) * t;
  return (k % 2 == 0) ? std::cos(a) : std::sin(a);
}

/// Dictionary argument for a covariate value. Data on [-1, 1] is mapped
/// affinely onto [0, 1], so the dictionary acts as a half-range system on
/// the data domain. Smooth non-periodic component functions then have
/// rapidly decaying expansions; feeding raw [-1, 1] values would impose a
/// periodic boundary matching that the benchmark signals do not satisfy.
inline double basis_arg(double x) { return 0.5 * (x + 1.0); }

/// Additive expansion: a model index paired with its coefficient vector,
/// flattened covariate-major (ascending covariate, then k = 1..m[j]).
struct AdditiveFunction {
  ModelIndex model;
  Eigen::VectorXd coeffs;
};

inline int coeff_dim(const ModelIndex& m) { return total_expansion(m); }

/// Sum over active covariates j of sum_{k=1..m[j]} coeffs[j,k] * basis_k(x[j]).
template <class Derived>
double eval_additive(const AdditiveFunction& f,
                     const Eigen::MatrixBase<Derived>& x) {
  const int p = static_cast<int>(f.model.size());
  if (x.size() != p)
    throw std::invalid_argument("covariate vector length does not match model");
  if (f.coeffs.size() != coeff_dim(f.model))
    throw std::invalid_argument("coefficient vector does not conform to model");
  double acc = 0.0;
  int off = 0;
  for (int j = 0; j < p; ++j) {
    const int mj = f.model[j];
    if (mj == 0) continue;
    const double t = basis_arg(x(j));
    for (int k = 1; k <= mj; ++k) acc += f.coeffs(off + k - 1) * eval_basis(k, t);
    off += mj;
  }
  return acc;
}

/// One (covariate, basis index, value) entry of a flattened coefficient
/// vector. Covariate and basis index are 1-based in this exchange form,
/// matching the x1..xp column naming of the data files.
struct CoeffTriple {
  int j;
  int k;
  double value;
};

inline std::vector<CoeffTriple> to_triples(const AdditiveFunction& f) {
  if (f.coeffs.size() != coeff_dim(f.model))
    throw std::invalid_argument("coefficient vector does not conform to model");
  std::vector<CoeffTriple> out;
  int off = 0;
  for (int j = 0; j < static_cast<int>(f.model.size()); ++j) {
    for (int k = 1; k <= f.model[j]; ++k)
      out.push_back({j + 1, k, f.coeffs(off + k - 1)});
    off += f.model[j];
  }
  return out;
}

inline AdditiveFunction from_triples(int p, const std::vector<CoeffTriple>& ts) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  ModelIndex m(p, 0);
  for (const auto& t : ts) {
    if (t.j < 1 || t.j > p) throw std::invalid_argument("triple covariate out of range");
    if (t.k < 1) throw std::invalid_argument("triple basis index out of range");
    if (t.k > m[t.j - 1]) m[t.j - 1] = t.k;
  }
  AdditiveFunction f{std::move(m), Eigen::VectorXd::Zero(0)};
  f.coeffs = Eigen::VectorXd::Zero(coeff_dim(f.model));
  std::vector<int> offsets(p, 0);
  int off = 0;
  for (int j = 0; j < p; ++j) {
    offsets[j] = off;
    off += f.model[j];
  }
  for (const auto& t : ts) f.coeffs(offsets[t.j - 1] + t.k - 1) = t.value;
  return f;
}

}  // namespace gibbsam
