#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gibbsam/benchmark.hpp"
#include "gibbsam/csv.hpp"
#include "gibbsam/estimator.hpp"
#include "gibbsam/fit_io.hpp"
#include "gibbsam/sim.hpp"

namespace {

using namespace gibbsam;

/// Pilot residual variance: ridge least squares on an intercept plus the
/// first cosine and sine column of every covariate.
double estimate_noise_var(const Dataset& data) {
  const int n = data.n();
  const int p = data.p();
  if (n < 3) throw std::runtime_error("noise estimation needs n >= 3");
  Eigen::MatrixXd design(n, 2 * p + 1);
  design.col(0).setOnes();
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) {
      design(i, 1 + 2 * j) = eval_basis(2, basis_arg(data.x(i, j)));
      design(i, 2 + 2 * j) = eval_basis(3, basis_arg(data.x(i, j)));
    }
  const LseResult pilot = solve_ridge(design, data.y, 1e-6 * n);
  const Eigen::VectorXd resid = data.y - design * pilot.beta;
  const Eigen::VectorXd centered =
      (resid.array() - resid.mean()).matrix();
  return centered.squaredNorm() / (n - 1);
}

struct SimulateArgs {
  int model = 1;
  int n = 200;
  int p = 50;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth_out;
};

void add_simulate(CLI::App& app) {
  auto args = std::make_shared<SimulateArgs>();
  CLI::App* cmd = app.add_subcommand("simulate", "Draw a synthetic dataset");
  cmd->add_option("--model", args->model, "Simulation model (1, 2, or 3)")
      ->required()
      ->check(CLI::Range(1, 3));
  cmd->add_option("--n", args->n, "Number of observations")
      ->required()
      ->check(CLI::Range(1, 1 << 24));
  cmd->add_option("--p", args->p, "Number of covariates (>= 4)")
      ->required()
      ->check(CLI::Range(4, 1 << 20));
  cmd->add_option("--seed", args->seed, "Random seed")->required();
  cmd->add_option("--out", args->out, "Output data file")->required();
  cmd->add_option("--truth-out", args->truth_out,
                  "Optional output file for the noise-free truth column");
  cmd->callback([args]() {
    const SimOutput sim = simulate({args->model, args->n, args->p, args->seed});
    write_data_csv(args->out, sim.data);
    if (!args->truth_out.empty()) write_truth_csv(args->truth_out, sim.truth);
  });
}

struct FitArgs {
  std::string data;
  long iters = 0;
  long burnin = -1;
  double alpha = 0.25;
  double c_radius = 1e6;
  double noise_var = -1.0;
  bool estimate_noise = false;
  std::string delta = "auto";
  double sigma2_prop = -1.0;
  int k_max = 8;
  std::vector<double> q;
  double ridge = -1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string rejection = "hold";
  bool trace_full = false;
};

void add_fit(CLI::App& app) {
  auto args = std::make_shared<FitArgs>();
  CLI::App* cmd = app.add_subcommand("fit", "Run the sampler on a data file");
  cmd->add_option("--data", args->data, "Input data file (x1..xp,y)")->required();
  cmd->add_option("--iters", args->iters, "Chain length")
      ->required()
      ->check(CLI::Range(1L, 100000000L));
  cmd->add_option("--burnin", args->burnin,
                  "Burn-in iterations (default: iters/2)");
  cmd->add_option("--alpha", args->alpha, "Sparsity level in (0, 1/2)");
  cmd->add_option("--c", args->c_radius, "Coefficient l1 ball radius");
  auto* nv = cmd->add_option("--noise-var", args->noise_var, "Noise variance");
  auto* env = cmd->add_flag("--estimate-noise-var", args->estimate_noise,
                            "Estimate the noise variance with a pilot fit");
  nv->excludes(env);
  cmd->add_option("--delta", args->delta,
                  "Inverse temperature: 'auto' for n/(4 noise_var), or a number");
  cmd->add_option("--sigma2-prop", args->sigma2_prop,
                  "Proposal variance (default: noise variance)");
  cmd->add_option("--k-max", args->k_max, "Largest per-covariate expansion size")
      ->check(CLI::Range(1, 1024));
  cmd->add_option("--q", args->q,
                  "Move probabilities add,delete,adjust (default 1/3 each)")
      ->delimiter(',')
      ->expected(3);
  cmd->add_option("--ridge", args->ridge,
                  "Ridge strength for proposal centers (default 1e-8*n)");
  cmd->add_option("--seed", args->seed, "Random seed")->required();
  cmd->add_option("--out", args->out, "Output fit file")->required();
  cmd->add_option("--rejection", args->rejection,
                  "State kept on rejection: hold or fresh")
      ->check(CLI::IsMember({"hold", "fresh"}));
  cmd->add_flag("--trace-full", args->trace_full,
                "Store the full per-iteration trace in the fit file");
  cmd->callback([args]() {
    if (!(args->alpha > 0.0 && args->alpha < 0.5))
      throw CLI::ValidationError("--alpha", "alpha must lie in (0, 1/2)");
    if (!(args->c_radius > 0.0))
      throw CLI::ValidationError("--c", "c must be > 0");
    const DataCsv csv = read_data_csv(args->data);
    if (!csv.has_response)
      throw std::runtime_error(args->data + ": fit requires a y column");
    const Dataset& data = csv.data;

    std::optional<double> noise_var;
    if (args->noise_var > 0.0) noise_var = args->noise_var;
    else if (args->noise_var == 0.0 || (args->noise_var > -1.0 && args->noise_var < 0.0))
      throw CLI::ValidationError("--noise-var", "noise variance must be > 0");
    if (args->estimate_noise) noise_var = estimate_noise_var(data);

    SamplerConfig cfg;
    cfg.prior.alpha = args->alpha;
    cfg.prior.c_radius = args->c_radius;
    cfg.prior.p = data.p();
    if (args->delta == "auto") {
      if (!noise_var)
        throw CLI::ValidationError(
            "--delta", "delta=auto needs --noise-var or --estimate-noise-var");
      cfg.temperature.mode = DeltaMode::Practical;
      cfg.temperature.noise_var = *noise_var;
    } else {
      cfg.temperature.mode = DeltaMode::Explicit;
      try {
        cfg.temperature.explicit_value = parse_double(args->delta, "--delta");
      } catch (const std::runtime_error& e) {
        throw CLI::ValidationError("--delta", e.what());
      }
      if (!(cfg.temperature.explicit_value > 0.0))
        throw CLI::ValidationError("--delta", "delta must be > 0");
    }
    if (args->sigma2_prop > 0.0) {
      cfg.proposal.sigma2_prop = args->sigma2_prop;
    } else if (args->sigma2_prop != -1.0) {
      throw CLI::ValidationError("--sigma2-prop", "proposal variance must be > 0");
    } else if (noise_var) {
      cfg.proposal.sigma2_prop = *noise_var;
    } else {
      throw CLI::ValidationError(
          "--sigma2-prop", "needed when no noise variance is available");
    }
    cfg.proposal.ridge_lambda =
        args->ridge >= 0.0 ? args->ridge : default_ridge(data.n());
    if (args->ridge < 0.0 && args->ridge != -1.0)
      throw CLI::ValidationError("--ridge", "ridge must be >= 0");
    cfg.k_max = args->k_max;
    if (!args->q.empty()) {
      cfg.move_probs = {args->q[0], args->q[1], args->q[2]};
    }
    cfg.iterations = args->iters;
    cfg.burn_in = args->burnin >= 0 ? args->burnin : args->iters / 2;
    if (cfg.burn_in >= cfg.iterations)
      throw CLI::ValidationError("--burnin", "burn-in must be below iters");
    cfg.seed = args->seed;
    cfg.rejection = args->rejection == "fresh" ? RejectionStyle::AdoptFreshDraw
                                               : RejectionStyle::HoldCurrent;
    try {
      cfg.validate(data);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("fit", e.what());
    }
    const FitResult result = fit(data, cfg);
    write_fit_json(args->out,
                   fit_to_json(result, data.n(), data.p(), args->data,
                               noise_var, args->trace_full));
  });
}

struct PredictArgs {
  std::string fit_path;
  std::string data;
  std::string estimator = "aggregated";
  std::string out;
};

void add_predict(CLI::App& app) {
  auto args = std::make_shared<PredictArgs>();
  CLI::App* cmd = app.add_subcommand("predict", "Evaluate a fit on new covariates");
  cmd->add_option("--fit", args->fit_path, "Fit file from the fit command")
      ->required();
  cmd->add_option("--data", args->data, "Covariate file (x1..xp, y optional)")
      ->required();
  cmd->add_option("--estimator", args->estimator, "aggregated or randomized")
      ->check(CLI::IsMember({"aggregated", "randomized"}));
  cmd->add_option("--out", args->out, "Output prediction file")->required();
  cmd->callback([args]() {
    const FitArtifact art = read_fit_json(args->fit_path);
    const DataCsv csv = read_data_csv(args->data);
    if (csv.data.p() != art.p)
      throw std::runtime_error(args->data + ": expected " +
                               std::to_string(art.p) + " covariate columns, found " +
                               std::to_string(csv.data.p()));
    const AdditiveFunction& f =
        args->estimator == "randomized" ? art.randomized : art.aggregated;
    write_predictions_csv(args->out, predict(f, csv.data.x));
  });
}

struct BenchmarkArgs {
  int model = 1;
  std::vector<int> p_list;
  std::vector<long> iters_list;
  int runs = 10;
  int n = 200;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  bool fresh_design = false;
  bool timing = false;
};

void add_benchmark(CLI::App& app) {
  auto args = std::make_shared<BenchmarkArgs>();
  CLI::App* cmd = app.add_subcommand(
      "benchmark", "Replicate the simulation study for one model");
  cmd->add_option("--model", args->model, "Simulation model (1, 2, or 3)")
      ->required()
      ->check(CLI::Range(1, 3));
  cmd->add_option("--p-list", args->p_list, "Covariate counts, comma separated")
      ->required()
      ->delimiter(',');
  cmd->add_option("--iters-list", args->iters_list,
                  "Chain lengths per p (default pairing: 3000/10000/20000)")
      ->delimiter(',');
  cmd->add_option("--runs", args->runs, "Independent runs per cell")
      ->check(CLI::Range(1, 10000));
  cmd->add_option("--n", args->n, "Observations per run")
      ->check(CLI::Range(1, 1 << 24));
  cmd->add_option("--seed", args->seed, "Master seed")->required();
  cmd->add_option("--out", args->out, "Output report file")->required();
  cmd->add_option("--threads", args->threads, "Worker threads (default: cores)");
  cmd->add_flag("--fresh-design", args->fresh_design,
                "Score on a fresh design instead of the training design");
  cmd->add_flag("--timing", args->timing,
                "Write measured wallclock seconds into the report (makes "
                "reruns differ)");
  cmd->callback([args]() {
    for (int p : args->p_list)
      if (p < 4) throw CLI::ValidationError("--p-list", "every p must be >= 4");
    if (!args->iters_list.empty() &&
        args->iters_list.size() != args->p_list.size())
      throw CLI::ValidationError("--iters-list",
                                 "needs one entry per --p-list entry");
    const int threads = args->threads > 0
                            ? args->threads
                            : std::max(1u, std::thread::hardware_concurrency());
    std::vector<BenchmarkRow> rows;
    for (std::size_t i = 0; i < args->p_list.size(); ++i) {
      BenchmarkCell cell;
      cell.model_id = args->model;
      cell.p = args->p_list[i];
      cell.n = args->n;
      cell.iters = args->iters_list.empty() ? default_benchmark_iters(cell.p)
                                            : args->iters_list[i];
      cell.runs = args->runs;
      const CellResult res = run_benchmark_cell(cell, args->seed,
                                                static_cast<std::uint64_t>(i),
                                                threads, args->fresh_design);
      const auto ref = table1_reference(cell.model_id, cell.p, cell.n);
      std::cerr << "model " << cell.model_id << " p " << cell.p << " n "
                << cell.n << ": rss_mean " << double_to_string(res.rss_mean)
                << " rss_sd " << double_to_string(res.rss_sd);
      if (ref) std::cerr << " (reference " << ref->first << " sd " << ref->second << ")";
      std::cerr << " in " << res.seconds << " s\n";
      rows.push_back({cell, res});
    }
    write_benchmark_csv(args->out, rows, args->timing);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse additive regression with a Gibbs posterior and "
               "subspace stochastic search"};
  app.require_subcommand(1);
  add_simulate(app);
  add_fit(app);
  add_predict(app);
  add_benchmark(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
