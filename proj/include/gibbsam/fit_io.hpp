#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gibbsam/estimator.hpp"

namespace gibbsam {

inline nlohmann::json triples_json(const AdditiveFunction& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : to_triples(f))
    arr.push_back(nlohmann::json::array({t.j, t.k, t.value}));
  return arr;
}

/// Serializes a fit to the artifact layout. `noise_var` is null when the
/// temperature was set explicitly without one.
inline nlohmann::json fit_to_json(const FitResult& fit, int n, int p,
                                  const std::string& data_path,
                                  std::optional<double> noise_var,
                                  bool include_trace) {
  nlohmann::json j;
  j["schema"] = "gibbsam.fit.v1";
  nlohmann::json cfg;
  cfg["n"] = n;
  cfg["p"] = p;
  cfg["data"] = data_path;
  cfg["alpha"] = fit.config.prior.alpha;
  cfg["c_radius"] = fit.config.prior.c_radius;
  cfg["delta"] = fit.delta;
  if (noise_var)
    cfg["noise_var"] = *noise_var;
  else
    cfg["noise_var"] = nullptr;
  cfg["sigma2_prop"] = fit.config.proposal.sigma2_prop;
  cfg["ridge_lambda"] = fit.config.proposal.ridge_lambda;
  cfg["k_max"] = fit.config.k_max;
  cfg["q"] = {fit.config.move_probs.add, fit.config.move_probs.del,
              fit.config.move_probs.adjust};
  cfg["iterations"] = fit.config.iterations;
  cfg["burn_in"] = fit.config.burn_in;
  cfg["seed"] = fit.config.seed;
  cfg["rejection"] =
      fit.config.rejection == RejectionStyle::HoldCurrent ? "hold" : "fresh";
  j["config"] = cfg;

  nlohmann::json est;
  est["aggregated"] = triples_json(fit.aggregated);
  est["randomized"] = triples_json(fit.randomized);
  j["estimates"] = est;

  nlohmann::json diag;
  diag["acceptance_rates"] = {
      {"addition", fit.diagnostics.rate(MoveKind::Addition)},
      {"deletion", fit.diagnostics.rate(MoveKind::Deletion)},
      {"adjustment", fit.diagnostics.rate(MoveKind::Adjustment)}};
  diag["proposals"] = {{"addition", fit.diagnostics.proposals_add},
                       {"deletion", fit.diagnostics.proposals_del},
                       {"adjustment", fit.diagnostics.proposals_adjust}};
  diag["accepted"] = {{"addition", fit.diagnostics.accepted_add},
                      {"deletion", fit.diagnostics.accepted_del},
                      {"adjustment", fit.diagnostics.accepted_adjust}};
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [size, count] : fit.diagnostics.support_histogram)
    hist.push_back(nlohmann::json::array({size, count}));
  diag["support_size_histogram"] = hist;
  diag["lse_fallbacks"] = fit.diagnostics.lse_fallbacks;
  diag["empirical_risk"] = fit.risk_series;
  j["diagnostics"] = diag;

  if (include_trace) {
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& st : fit.trace.states) {
      nlohmann::json model = nlohmann::json::array();
      for (const auto& [cov, mj] : st.model.active)
        model.push_back(nlohmann::json::array({cov + 1, mj}));
      nlohmann::json coeffs = nlohmann::json::array();
      for (Eigen::Index i = 0; i < st.coeffs.size(); ++i)
        coeffs.push_back(st.coeffs(i));
      tr.push_back(nlohmann::json::array({st.t, model, coeffs}));
    }
    j["trace"] = tr;
  }
  return j;
}

inline void write_fit_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << j.dump(2) << "\n";
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

struct FitArtifact {
  int p = 0;
  AdditiveFunction aggregated;
  AdditiveFunction randomized;
};

inline FitArtifact read_fit_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": invalid fit artifact: " + e.what());
  }
  FitArtifact art;
  try {
    art.p = j.at("config").at("p").get<int>();
    auto load = [&](const char* key) {
      std::vector<CoeffTriple> ts;
      for (const auto& row : j.at("estimates").at(key))
        ts.push_back({row.at(0).get<int>(), row.at(1).get<int>(),
                      row.at(2).get<double>()});
      return from_triples(art.p, ts);
    };
    art.aggregated = load("aggregated");
    art.randomized = load("randomized");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": invalid fit artifact: " + e.what());
  }
  return art;
}

}  // namespace gibbsam
