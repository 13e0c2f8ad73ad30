#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gibbsam/model_space.hpp"
#include "gibbsam/prior.hpp"
#include "gibbsam/proposal.hpp"
#include "gibbsam/risk.hpp"
#include "gibbsam/rng.hpp"

namespace gibbsam {

/// What the chain keeps when a proposed move is rejected. HoldCurrent keeps
/// the current coefficients and is the default; AdoptFreshDraw takes the
/// fresh reverse-phase draw for the current model instead.
enum class RejectionStyle { HoldCurrent, AdoptFreshDraw };

struct MoveProbs {
  double add = 1.0 / 3.0;
  double del = 1.0 / 3.0;
  double adjust = 1.0 / 3.0;

  double get(MoveKind kind) const {
    switch (kind) {
      case MoveKind::Addition: return add;
      case MoveKind::Deletion: return del;
      default: return adjust;
    }
  }
};

struct SamplerConfig {
  PriorParams prior;
  TemperatureSpec temperature;
  ProposalParams proposal;
  int k_max = 8;
  MoveProbs move_probs;
  long iterations = 0;
  long burn_in = 0;
  std::uint64_t seed = 0;
  RejectionStyle rejection = RejectionStyle::HoldCurrent;

  void validate(const Dataset& data) const {
    data.validate();
    if (prior.p != data.p())
      throw std::invalid_argument("prior p does not match dataset");
    prior.validate();
    proposal.validate();
    resolve_delta(temperature, data.n());
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    const double qs = move_probs.add + move_probs.del + move_probs.adjust;
    if (move_probs.add < 0 || move_probs.del < 0 || move_probs.adjust < 0 ||
        std::abs(qs - 1.0) > 1e-12)
      throw std::invalid_argument("move probabilities must be >= 0 and sum to 1");
    if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
    if (iterations == 0 ? burn_in != 0
                        : (burn_in < 0 || burn_in >= iterations))
      throw std::invalid_argument("burn_in must satisfy 0 <= burn_in < iterations");
    const bool can_add = prior.p > 1 && move_probs.add > 0;
    const bool can_adjust = k_max > 1 && move_probs.adjust > 0;
    if (!can_add && !can_adjust)
      throw std::invalid_argument("no feasible move from a single-covariate model");
  }
};

/// Compressed model representation used in traces: (covariate, size) pairs
/// for the active covariates, ascending.
struct SparseModel {
  std::vector<std::pair<int, int>> active;
};

inline SparseModel compress(const ModelIndex& m) {
  SparseModel s;
  for (int j = 0; j < static_cast<int>(m.size()); ++j)
    if (m[j] > 0) s.active.emplace_back(j, m[j]);
  return s;
}

inline ModelIndex expand(const SparseModel& s, int p) {
  ModelIndex m(p, 0);
  for (const auto& [j, v] : s.active) {
    if (j < 0 || j >= p) throw std::invalid_argument("sparse model entry out of range");
    m[j] = v;
  }
  return m;
}

struct ChainState {
  ModelIndex model;
  Eigen::VectorXd coeffs;
  double log_score = kLogZero;
};

struct CandidateScore {
  ModelIndex model;
  Eigen::VectorXd theta;
  Eigen::VectorXd center;  // least squares proposal mean
  double log_score = kLogZero;     // unnormalized posterior log density
  double log_proposal = 0.0;
  double log_weight = kLogZero;    // log_score - log_proposal
};

struct StepDiagnostics {
  MoveKind kind = MoveKind::Adjustment;
  SparseModel proposed;
  double acceptance_prob = 0.0;
  bool accepted = false;
  double empirical_risk = 0.0;
};

struct TraceState {
  long t = 0;
  SparseModel model;
  Eigen::VectorXd coeffs;
};

struct ChainTrace {
  int p = 0;
  std::vector<TraceState> states;        // length iterations + 1
  std::vector<StepDiagnostics> diagnostics;  // length iterations
  long lse_fallbacks = 0;
};

inline double log_sum_exp(const std::vector<double>& v) {
  double mx = kLogZero;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kLogZero) return kLogZero;
  double acc = 0.0;
  for (double x : v) {
    if (x != kLogZero) acc += std::exp(x - mx);
  }
  return mx + std::log(acc);
}

/// Selection probabilities proportional to exp(log_weights). Entries at
/// log-zero get probability zero; if every entry is log-zero the result is
/// all zeros.
inline std::vector<double> selection_probabilities(
    const std::vector<double>& log_weights) {
  std::vector<double> probs(log_weights.size(), 0.0);
  const double lse_total = log_sum_exp(log_weights);
  if (lse_total == kLogZero) return probs;
  for (std::size_t i = 0; i < log_weights.size(); ++i)
    if (log_weights[i] != kLogZero)
      probs[i] = std::exp(log_weights[i] - lse_total);
  return probs;
}

/// Draws an index with probability proportional to exp(log_weights).
/// Returns -1 when every weight is log-zero.
inline int draw_from_log_weights(const std::vector<double>& log_weights,
                                 rng::Engine& eng) {
  const std::vector<double> probs = selection_probabilities(log_weights);
  double total = 0.0;
  for (double p : probs) total += p;
  if (total <= 0.0) return -1;
  const double u = rng::uniform01(eng) * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += probs[i];
    if (u < acc) return last_positive;
  }
  return last_positive;
}

/// Position of `previous` inside neighborhood(current, kind, k_max), where
/// `previous` differs from `current` only at covariate j. Mirrors the
/// enumeration order of neighborhood() without materializing it.
inline int locate_reverse_index(const ModelIndex& current, MoveKind kind,
                                int j, int previous_size, int k_max) {
  const int p = static_cast<int>(current.size());
  int idx = 0;
  switch (kind) {
    case MoveKind::Deletion:
      // previous = current with covariate j removed; find rank of j among
      // active covariates of current.
      for (int a = 0; a < j; ++a)
        if (current[a] > 0) ++idx;
      return idx;
    case MoveKind::Addition:
      // previous = current with covariate j active at previous_size.
      for (int a = 0; a < j; ++a)
        if (current[a] == 0) ++idx;
      return idx * k_max + (previous_size - 1);
    default: {
      int rank = 0;
      for (int a = 0; a < j; ++a)
        if (current[a] > 0) ++rank;
      int within = previous_size - 1;
      if (previous_size > current[j]) --within;
      (void)p;
      return rank * (k_max - 1) + within;
    }
  }
}

/// Subspace stochastic-search sampler over (model, coefficients) states.
/// Basis columns and Gram blocks are cached per covariate pair, so scoring a
/// candidate costs O(d^3) in its coefficient dimension, independent of n.
class SccSampler {
 public:
  SccSampler(const Dataset& data, const SamplerConfig& config)
      : data_(data), cfg_(config) {
    cfg_.validate(data_);
    delta_ = resolve_delta(cfg_.temperature, data_.n());
    n_ = data_.n();
    p_ = data_.p();
    k_ = cfg_.k_max;
    cols_.resize(n_, static_cast<Eigen::Index>(p_) * k_);
    for (int j = 0; j < p_; ++j)
      for (int k = 1; k <= k_; ++k) {
        const Eigen::Index col = static_cast<Eigen::Index>(j) * k_ + (k - 1);
        for (int i = 0; i < n_; ++i)
          cols_(i, col) = eval_basis(k, basis_arg(data_.x(i, j)));
      }
    bty_ = cols_.transpose() * data_.y;
    y2_ = data_.y.squaredNorm();
  }

  double delta() const { return delta_; }
  const SamplerConfig& config() const { return cfg_; }

  MoveProbs effective_move_probs(const ModelIndex& m) const {
    const int s = support_size(m);
    if (s < 1) throw std::invalid_argument("model must have nonempty support");
    MoveProbs q = cfg_.move_probs;
    if (s >= p_) q.add = 0.0;
    if (s <= 1) q.del = 0.0;
    if (k_ < 2) q.adjust = 0.0;
    const double total = q.add + q.del + q.adjust;
    if (total <= 0.0) throw std::runtime_error("no feasible move from current model");
    q.add /= total;
    q.del /= total;
    q.adjust /= total;
    return q;
  }

  /// Scores every candidate with its own rng substream keyed by
  /// (iteration, phase, list position), so results do not depend on
  /// evaluation order.
  std::vector<CandidateScore> score_candidates(
      const std::vector<ModelIndex>& models, long iteration, int phase) {
    std::vector<CandidateScore> out(models.size());
    for (std::size_t i = 0; i < models.size(); ++i)
      score_one(models[i], iteration, phase, static_cast<std::uint64_t>(i), out[i]);
    return out;
  }

  ChainState init_chain() {
    int best_j = 0;
    double best = -1.0;
    const Eigen::VectorXd yc =
        (data_.y.array() - data_.y.mean()).matrix();
    const double sy = yc.norm();
    for (int j = 0; j < p_; ++j) {
      const Eigen::VectorXd xc =
          (data_.x.col(j).array() - data_.x.col(j).mean()).matrix();
      const double sx = xc.norm();
      const double c = (sx > 0.0 && sy > 0.0) ? std::abs(xc.dot(yc) / (sx * sy)) : 0.0;
      if (c > best) {
        best = c;
        best_j = j;
      }
    }
    ModelIndex m0(p_, 0);
    m0[best_j] = 1;
    CandidateScore cand;
    rng::Engine eng = rng::make_engine(rng::derive_seed(cfg_.seed, 0, 3, 0));
    score_model_with_engine(m0, eng, cand);
    for (int tries = 0; cand.log_score == kLogZero && tries < 256; ++tries)
      score_model_with_engine(m0, eng, cand);
    if (cand.log_score == kLogZero) {
      // Fall back to a deterministic point inside the ball.
      const double l1 = cand.center.lpNorm<1>();
      Eigen::VectorXd theta = cand.center;
      if (l1 > 0.99 * cfg_.prior.c_radius)
        theta *= 0.99 * cfg_.prior.c_radius / l1;
      cand.theta = theta;
      cand.log_score = candidate_log_score(m0, cand.theta);
    }
    ChainState state{std::move(m0), cand.theta, cand.log_score};
    refresh_current_model(state.model, cand.center);
    return state;
  }

  StepDiagnostics step(ChainState& state, long t) {
    StepDiagnostics diag;
    rng::Engine iter_eng = rng::make_engine(rng::derive_seed(cfg_.seed, t, 0, 0));
    const MoveProbs q_fwd = effective_move_probs(state.model);
    const MoveKind kind = draw_kind(q_fwd, iter_eng);
    diag.kind = kind;

    const std::vector<ModelIndex> fwd = neighborhood(state.model, kind, k_);
    std::vector<CandidateScore> fwd_scores = score_candidates(fwd, t, 1);
    std::vector<double> fwd_logw(fwd_scores.size());
    for (std::size_t i = 0; i < fwd_scores.size(); ++i)
      fwd_logw[i] = fwd_scores[i].log_weight;

    const int sel = draw_from_log_weights(fwd_logw, iter_eng);
    if (sel < 0) {
      diag.proposed = compress(state.model);
      diag.acceptance_prob = 0.0;
      diag.accepted = false;
      diag.empirical_risk = state_risk(state);
      return diag;
    }
    CandidateScore& chosen = fwd_scores[sel];
    diag.proposed = compress(chosen.model);
    const double lsum_fwd = log_sum_exp(fwd_logw);

    // The covariate the move touched, with its size in the current model.
    const auto [moved_j, old_size] = moved_coordinate(state.model, chosen.model);

    const MoveKind rkind = reverse_move(kind);
    const std::vector<ModelIndex> rev = neighborhood(chosen.model, rkind, k_);
    std::vector<CandidateScore> rev_scores = score_candidates(rev, t, 2);
    const int back = locate_reverse_index(chosen.model, rkind, moved_j, old_size, k_);
    if (back < 0 || back >= static_cast<int>(rev.size()) ||
        rev[back] != state.model)
      throw std::logic_error("reverse neighborhood does not contain current model");

    if (cfg_.rejection == RejectionStyle::HoldCurrent) {
      rev_scores[back].theta = state.coeffs;
      rev_scores[back].log_score = state.log_score;
      rev_scores[back].log_proposal =
          gaussian_log_density(state.coeffs, cur_center_, cfg_.proposal.sigma2_prop);
      rev_scores[back].log_weight =
          state.log_score == kLogZero
              ? kLogZero
              : state.log_score - rev_scores[back].log_proposal;
    }
    std::vector<double> rev_logw(rev_scores.size());
    for (std::size_t i = 0; i < rev_scores.size(); ++i)
      rev_logw[i] = rev_scores[i].log_weight;
    const double lsum_rev = log_sum_exp(rev_logw);

    const MoveProbs q_rev = effective_move_probs(chosen.model);
    double log_acc;
    if (lsum_rev == kLogZero) {
      log_acc = 0.0;
    } else {
      log_acc = std::log(q_rev.get(rkind)) + lsum_fwd -
                std::log(q_fwd.get(kind)) - lsum_rev;
      log_acc = std::min(0.0, log_acc);
    }
    diag.acceptance_prob = std::exp(log_acc);

    const double u = rng::uniform01(iter_eng);
    if (std::log(u) < log_acc) {
      diag.accepted = true;
      state.model = chosen.model;
      state.coeffs = chosen.theta;
      state.log_score = chosen.log_score;
      refresh_current_model(state.model, chosen.center);
    } else if (cfg_.rejection == RejectionStyle::AdoptFreshDraw &&
               rev_scores[back].log_score != kLogZero) {
      state.coeffs = rev_scores[back].theta;
      state.log_score = rev_scores[back].log_score;
    }
    diag.empirical_risk = state_risk(state);
    return diag;
  }

  ChainTrace run() {
    ChainTrace trace;
    trace.p = p_;
    trace.states.reserve(cfg_.iterations + 1);
    trace.diagnostics.reserve(cfg_.iterations);
    ChainState state = init_chain();
    trace.states.push_back({0, compress(state.model), state.coeffs});
    for (long t = 1; t <= cfg_.iterations; ++t) {
      trace.diagnostics.push_back(step(state, t));
      trace.states.push_back({t, compress(state.model), state.coeffs});
    }
    trace.lse_fallbacks = lse_fallbacks_;
    return trace;
  }

  long lse_fallbacks() const { return lse_fallbacks_; }

 private:
  const Eigen::Block<const Eigen::MatrixXd> col_block(int j, int mj) const {
    return cols_.block(0, static_cast<Eigen::Index>(j) * k_, n_, mj);
  }

  /// Gram block between the first k_max columns of covariates a and b (a <= b).
  const Eigen::MatrixXd& gram_block(int a, int b) {
    const std::uint64_t key =
        static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(p_) + b;
    auto it = gram_.find(key);
    if (it != gram_.end()) return it->second;
    Eigen::MatrixXd block = col_block(a, k_).transpose() * col_block(b, k_);
    return gram_.emplace(key, std::move(block)).first->second;
  }

  void assemble(const ModelIndex& m, Eigen::MatrixXd& g, Eigen::VectorXd& c) {
    std::vector<std::pair<int, int>> act;
    for (int j = 0; j < p_; ++j)
      if (m[j] > 0) act.emplace_back(j, m[j]);
    int d = 0;
    for (const auto& [j, mj] : act) d += mj;
    g.resize(d, d);
    c.resize(d);
    int ro = 0;
    for (const auto& [ja, da] : act) {
      c.segment(ro, da) = bty_.segment(static_cast<Eigen::Index>(ja) * k_, da);
      int co = 0;
      for (const auto& [jb, db] : act) {
        if (ja <= jb)
          g.block(ro, co, da, db) = gram_block(ja, jb).topLeftCorner(da, db);
        else
          g.block(ro, co, da, db) =
              gram_block(jb, ja).topLeftCorner(db, da).transpose();
        co += db;
      }
      ro += da;
    }
  }

  Eigen::VectorXd center_of(const ModelIndex& m, const Eigen::MatrixXd& g,
                            const Eigen::VectorXd& c) {
    if (cfg_.proposal.ridge_lambda > 0.0) {
      Eigen::MatrixXd reg = g;
      reg.diagonal().array() += cfg_.proposal.ridge_lambda;
      return reg.ldlt().solve(c);
    }
    // Unregularized centers go through the design for a minimum-norm solve.
    const int d = static_cast<int>(g.rows());
    Eigen::MatrixXd design(n_, d);
    int col = 0;
    for (int j = 0; j < p_; ++j) {
      if (m[j] == 0) continue;
      design.block(0, col, n_, m[j]) = col_block(j, m[j]);
      col += m[j];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    if (cod.rank() < d) ++lse_fallbacks_;
    return cod.solve(data_.y);
  }

  double candidate_log_score(const ModelIndex& m, const Eigen::VectorXd& theta) {
    Eigen::MatrixXd g;
    Eigen::VectorXd c;
    assemble(m, g, c);
    return log_score_from(m, theta, g, c);
  }

  double log_score_from(const ModelIndex& m, const Eigen::VectorXd& theta,
                        const Eigen::MatrixXd& g, const Eigen::VectorXd& c) {
    if (theta.lpNorm<1>() > cfg_.prior.c_radius || !theta.allFinite())
      return kLogZero;
    const double risk =
        (y2_ - 2.0 * theta.dot(c) + theta.dot(g * theta)) / n_;
    return log_eta(m, cfg_.prior) - log_ball_volume(m, cfg_.prior.c_radius) -
           delta_ * risk;
  }

  void score_one(const ModelIndex& m, long iteration, int phase,
                 std::uint64_t index, CandidateScore& out) {
    rng::Engine eng = rng::make_engine(
        rng::derive_seed(cfg_.seed, static_cast<std::uint64_t>(iteration),
                         static_cast<std::uint64_t>(phase), index));
    score_model_with_engine(m, eng, out);
  }

  void score_model_with_engine(const ModelIndex& m, rng::Engine& eng,
                               CandidateScore& out) {
    Eigen::MatrixXd g;
    Eigen::VectorXd c;
    assemble(m, g, c);
    out.model = m;
    out.center = center_of(m, g, c);
    if (!out.center.allFinite()) {
      out.theta = out.center;
      out.log_score = kLogZero;
      out.log_proposal = 0.0;
      out.log_weight = kLogZero;
      return;
    }
    out.theta = sample_proposal(out.center, cfg_.proposal.sigma2_prop, eng);
    out.log_score = log_score_from(m, out.theta, g, c);
    out.log_proposal =
        gaussian_log_density(out.theta, out.center, cfg_.proposal.sigma2_prop);
    out.log_weight = out.log_score == kLogZero ? kLogZero
                                               : out.log_score - out.log_proposal;
  }

  void refresh_current_model(const ModelIndex& m, const Eigen::VectorXd& center) {
    assemble(m, cur_g_, cur_c_);
    cur_center_ = center;
  }

  double state_risk(const ChainState& state) const {
    return (y2_ - 2.0 * state.coeffs.dot(cur_c_) +
            state.coeffs.dot(cur_g_ * state.coeffs)) /
           n_;
  }

  static MoveKind draw_kind(const MoveProbs& q, rng::Engine& eng) {
    const double u = rng::uniform01(eng);
    double acc = 0.0;
    MoveKind last = MoveKind::Adjustment;
    for (MoveKind k :
         {MoveKind::Addition, MoveKind::Deletion, MoveKind::Adjustment}) {
      const double w = q.get(k);
      if (w <= 0.0) continue;
      last = k;
      acc += w;
      if (u < acc) return k;
    }
    return last;
  }

  /// Identifies the single covariate where `from` and `to` differ and
  /// returns (covariate, size in `from`).
  static std::pair<int, int> moved_coordinate(const ModelIndex& from,
                                              const ModelIndex& to) {
    for (int j = 0; j < static_cast<int>(from.size()); ++j)
      if (from[j] != to[j]) return {j, from[j]};
    throw std::logic_error("candidate equals current model");
  }

  const Dataset& data_;
  SamplerConfig cfg_;
  double delta_ = 0.0;
  int n_ = 0, p_ = 0, k_ = 0;
  Eigen::MatrixXd cols_;
  Eigen::VectorXd bty_;
  double y2_ = 0.0;
  std::unordered_map<std::uint64_t, Eigen::MatrixXd> gram_;
  Eigen::MatrixXd cur_g_;
  Eigen::VectorXd cur_c_;
  Eigen::VectorXd cur_center_;
  long lse_fallbacks_ = 0;
};

inline ChainTrace run_chain(const Dataset& data, const SamplerConfig& config) {
  SccSampler sampler(data, config);
  return sampler.run();
}

}  // namespace gibbsam
