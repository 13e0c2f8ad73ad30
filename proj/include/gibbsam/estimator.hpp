#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <vector>

#include "gibbsam/basis.hpp"
#include "gibbsam/risk.hpp"
#include "gibbsam/scc_sampler.hpp"

namespace gibbsam {

/// The chain's final state as an additive function.
inline AdditiveFunction randomized_estimate(const ChainTrace& trace) {
  if (trace.states.empty()) throw std::invalid_argument("trace is empty");
  const TraceState& last = trace.states.back();
  return AdditiveFunction{expand(last.model, trace.p), last.coeffs};
}

/// Coefficient-wise average over the post-burn-in states b+1..T, treating a
/// slot as zero in any state whose model does not contain it. The result is
/// reported on the union model of the averaged states.
inline AdditiveFunction aggregated_estimate(const ChainTrace& trace, long burn_in) {
  const long t_max = static_cast<long>(trace.states.size()) - 1;
  if (t_max < 0) throw std::invalid_argument("trace is empty");
  if (burn_in < 0 || burn_in >= t_max)
    throw std::invalid_argument("burn_in must satisfy 0 <= burn_in < iterations");
  ModelIndex union_model(trace.p, 0);
  for (long t = burn_in + 1; t <= t_max; ++t)
    for (const auto& [j, mj] : trace.states[t].model.active)
      union_model[j] = std::max(union_model[j], mj);
  std::vector<int> offsets(trace.p, 0);
  int off = 0;
  for (int j = 0; j < trace.p; ++j) {
    offsets[j] = off;
    off += union_model[j];
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(off);
  for (long t = burn_in + 1; t <= t_max; ++t) {
    const TraceState& st = trace.states[t];
    int src = 0;
    for (const auto& [j, mj] : st.model.active) {
      acc.segment(offsets[j], mj) += st.coeffs.segment(src, mj);
      src += mj;
    }
  }
  acc /= static_cast<double>(t_max - burn_in);
  return AdditiveFunction{std::move(union_model), std::move(acc)};
}

/// Row-wise evaluation of f over a design matrix.
inline Eigen::VectorXd predict(const AdditiveFunction& f,
                               const Eigen::MatrixXd& x) {
  if (x.cols() != static_cast<Eigen::Index>(f.model.size()))
    throw std::invalid_argument("design columns do not match model length");
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out(i) = eval_additive(f, x.row(i));
  return out;
}

/// Mean squared deviation from noise-free truth values over a design.
inline double rss(const AdditiveFunction& f, const Eigen::VectorXd& truth,
                  const Eigen::MatrixXd& design) {
  if (truth.size() != design.rows())
    throw std::invalid_argument("truth length does not match design rows");
  if (design.rows() < 1) throw std::invalid_argument("design is empty");
  return (predict(f, design) - truth).squaredNorm() / design.rows();
}

struct DiagnosticsSummary {
  long proposals_add = 0, proposals_del = 0, proposals_adjust = 0;
  long accepted_add = 0, accepted_del = 0, accepted_adjust = 0;
  std::map<int, long> support_histogram;  // support size -> state count
  long lse_fallbacks = 0;

  double rate(MoveKind kind) const {
    long prop = 0, acc = 0;
    switch (kind) {
      case MoveKind::Addition: prop = proposals_add; acc = accepted_add; break;
      case MoveKind::Deletion: prop = proposals_del; acc = accepted_del; break;
      default: prop = proposals_adjust; acc = accepted_adjust; break;
    }
    return prop > 0 ? static_cast<double>(acc) / prop : 0.0;
  }
};

inline DiagnosticsSummary summarize_diagnostics(const ChainTrace& trace) {
  DiagnosticsSummary s;
  for (const auto& d : trace.diagnostics) {
    switch (d.kind) {
      case MoveKind::Addition:
        ++s.proposals_add;
        if (d.accepted) ++s.accepted_add;
        break;
      case MoveKind::Deletion:
        ++s.proposals_del;
        if (d.accepted) ++s.accepted_del;
        break;
      default:
        ++s.proposals_adjust;
        if (d.accepted) ++s.accepted_adjust;
        break;
    }
  }
  for (const auto& st : trace.states)
    ++s.support_histogram[static_cast<int>(st.model.active.size())];
  s.lse_fallbacks = trace.lse_fallbacks;
  return s;
}

struct FitResult {
  AdditiveFunction aggregated;
  AdditiveFunction randomized;
  double delta = 0.0;
  SamplerConfig config;
  DiagnosticsSummary diagnostics;
  std::vector<double> risk_series;  // state risk at t = 0..T
  ChainTrace trace;
};

/// Runs the chain and assembles both estimators plus diagnostics.
inline FitResult fit(const Dataset& data, const SamplerConfig& config) {
  if (config.iterations < 1)
    throw std::invalid_argument("fit requires at least one iteration");
  SccSampler sampler(data, config);
  FitResult out;
  out.trace = sampler.run();
  out.delta = sampler.delta();
  out.config = config;
  out.aggregated = aggregated_estimate(out.trace, config.burn_in);
  out.randomized = randomized_estimate(out.trace);
  out.diagnostics = summarize_diagnostics(out.trace);
  out.risk_series.reserve(out.trace.states.size());
  out.risk_series.push_back(
      empirical_risk(AdditiveFunction{expand(out.trace.states[0].model, out.trace.p),
                                      out.trace.states[0].coeffs},
                     data));
  for (const auto& d : out.trace.diagnostics) out.risk_series.push_back(d.empirical_risk);
  return out;
}

}  // namespace gibbsam
