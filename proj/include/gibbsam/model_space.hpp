#pragma once

#include <stdexcept>
#include <vector>

namespace gibbsam {

/// Per-covariate expansion sizes. m[j] == 0 means covariate j is inactive,
/// m[j] == d means covariate j contributes the first d dictionary functions.
using ModelIndex = std::vector<int>;

enum class MoveKind { Addition, Deletion, Adjustment };

inline MoveKind reverse_move(MoveKind kind) {
  switch (kind) {
    case MoveKind::Addition: return MoveKind::Deletion;
    case MoveKind::Deletion: return MoveKind::Addition;
    default: return MoveKind::Adjustment;
  }
}

/// Indices of active covariates, ascending.
inline std::vector<int> support(const ModelIndex& m) {
  std::vector<int> s;
  for (int j = 0; j < static_cast<int>(m.size()); ++j) {
    if (m[j] < 0) throw std::invalid_argument("model index entries must be >= 0");
    if (m[j] > 0) s.push_back(j);
  }
  return s;
}

inline int support_size(const ModelIndex& m) {
  int s = 0;
  for (int v : m) {
    if (v < 0) throw std::invalid_argument("model index entries must be >= 0");
    if (v > 0) ++s;
  }
  return s;
}

/// Total number of coefficients, sum of m[j].
inline int total_expansion(const ModelIndex& m) {
  int d = 0;
  for (int v : m) {
    if (v < 0) throw std::invalid_argument("model index entries must be >= 0");
    d += v;
  }
  return d;
}

/// Candidate models reachable from m by one move of the given kind.
///
/// Addition activates an inactive covariate at any size in 1..k_max,
/// enumerated covariate-major then size. Deletion deactivates one active
/// covariate. Adjustment changes a single active covariate's size to any
/// other value in 1..k_max. Enumeration order is deterministic.
inline std::vector<ModelIndex> neighborhood(const ModelIndex& m, MoveKind kind,
                                            int k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  const int p = static_cast<int>(m.size());
  for (int v : m) {
    if (v < 0 || v > k_max)
      throw std::invalid_argument("model index entry outside [0, k_max]");
  }
  std::vector<ModelIndex> out;
  switch (kind) {
    case MoveKind::Addition:
      for (int j = 0; j < p; ++j) {
        if (m[j] != 0) continue;
        for (int x = 1; x <= k_max; ++x) {
          ModelIndex next = m;
          next[j] = x;
          out.push_back(std::move(next));
        }
      }
      break;
    case MoveKind::Deletion:
      if (support_size(m) <= 1) return out;
      for (int j = 0; j < p; ++j) {
        if (m[j] == 0) continue;
        ModelIndex next = m;
        next[j] = 0;
        out.push_back(std::move(next));
      }
      break;
    case MoveKind::Adjustment:
      for (int j = 0; j < p; ++j) {
        if (m[j] == 0) continue;
        for (int x = 1; x <= k_max; ++x) {
          if (x == m[j]) continue;
          ModelIndex next = m;
          next[j] = x;
          out.push_back(std::move(next));
        }
      }
      break;
  }
  return out;
}

}  // namespace gibbsam
