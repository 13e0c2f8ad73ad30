#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gibbsam/proposal.hpp"
#include "gibbsam/rng.hpp"

using namespace gibbsam;

namespace {

Eigen::MatrixXd random_matrix(int n, int d, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  return Eigen::MatrixXd::NullaryExpr(n, d, [&]() { return normal(eng); });
}

}  // namespace

TEST_CASE("design columns follow the dictionary layout", "[proposal]") {
  Dataset data;
  data.x.resize(2, 2);
  data.x << 0.5, -1.0, 0.0, 0.25;
  data.y.resize(2);
  data.y << 0.0, 0.0;
  const Eigen::MatrixXd d1 = build_design(ModelIndex{2, 0}, data);
  REQUIRE(d1.rows() == 2);
  REQUIRE(d1.cols() == 2);
  CHECK(d1(0, 0) == 1.0);
  CHECK(d1(1, 0) == 1.0);
  CHECK(d1(0, 1) == Catch::Approx(std::cos(M_PI * 0.75)).margin(1e-15));
  CHECK(d1(1, 1) == Catch::Approx(std::cos(M_PI * 0.5)).margin(1e-15));
  const Eigen::MatrixXd d2 = build_design(ModelIndex{1, 3}, data);
  REQUIRE(d2.cols() == 4);
  CHECK(d2(0, 0) == 1.0);
  CHECK(d2(0, 1) == 1.0);
  CHECK(d2(0, 2) == Catch::Approx(std::cos(0.0)).margin(1e-15));
  CHECK(d2(1, 3) == Catch::Approx(std::sin(M_PI * 0.625)).margin(1e-15));
  CHECK_THROWS_AS(build_design(ModelIndex{0, 0}, data), std::invalid_argument);
}

TEST_CASE("plain least squares matches an independent dense solve", "[proposal]") {
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 30 + trial;
    const int d = 3 + trial % 5;
    const Eigen::MatrixXd design = random_matrix(n, d, 1000 + trial);
    const Eigen::VectorXd y = random_matrix(n, 1, 2000 + trial).col(0);
    const LseResult fit = solve_ridge(design, y, 0.0);
    CHECK(!fit.used_fallback);
    const Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd oracle =
        gram.fullPivLu().solve(design.transpose() * y);
    REQUIRE(fit.beta.size() == d);
    CHECK((fit.beta - oracle).norm() <= 1e-8 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("ridge least squares matches an independent dense solve", "[proposal]") {
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 25;
    const int d = 4;
    const double lambda = 0.37 * (trial + 1);
    const Eigen::MatrixXd design = random_matrix(n, d, 3000 + trial);
    const Eigen::VectorXd y = random_matrix(n, 1, 4000 + trial).col(0);
    const LseResult fit = solve_ridge(design, y, lambda);
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += lambda;
    const Eigen::VectorXd oracle =
        gram.fullPivLu().solve(design.transpose() * y);
    CHECK((fit.beta - oracle).norm() <= 1e-10 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("orthonormal designs give the projection coefficients", "[proposal]") {
  const Eigen::MatrixXd raw = random_matrix(40, 5, 77);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(40, 5);
  const Eigen::VectorXd y = random_matrix(40, 1, 78).col(0);
  const LseResult fit = solve_ridge(q, y, 0.0);
  CHECK((fit.beta - q.transpose() * y).norm() <= 1e-10);
}

TEST_CASE("square systems interpolate", "[proposal]") {
  const Eigen::MatrixXd design = random_matrix(6, 6, 123);
  const Eigen::VectorXd y = random_matrix(6, 1, 124).col(0);
  const LseResult fit = solve_ridge(design, y, 0.0);
  CHECK((design * fit.beta - y).norm() <= 1e-8 * y.norm());
}

TEST_CASE("duplicated constant columns stay finite at lambda zero", "[proposal]") {
  const int n = 20;
  Eigen::MatrixXd design(n, 2);
  design.setOnes();
  Eigen::VectorXd y = random_matrix(n, 1, 55).col(0);
  const LseResult fit = solve_ridge(design, y, 0.0);
  CHECK(fit.used_fallback);
  REQUIRE(fit.beta.allFinite());
  const double mean = y.mean();
  CHECK(fit.beta(0) == Catch::Approx(mean / 2.0).margin(1e-10));
  CHECK(fit.beta(1) == Catch::Approx(mean / 2.0).margin(1e-10));
}

TEST_CASE("tiny ridge keeps singular systems finite", "[proposal]") {
  const int n = 20;
  Eigen::MatrixXd design(n, 3);
  design.setOnes();
  design.col(2) = random_matrix(n, 1, 91).col(0);
  const Eigen::VectorXd y = random_matrix(n, 1, 92).col(0);
  const LseResult fit = solve_ridge(design, y, default_ridge(n));
  CHECK(fit.beta.allFinite());
  CHECK(!fit.used_fallback);
}

TEST_CASE("default ridge scales linearly with n", "[proposal]") {
  CHECK(default_ridge(200) == Catch::Approx(2e-6).margin(1e-18));
  CHECK(default_ridge(100) == Catch::Approx(1e-6).margin(1e-18));
}

TEST_CASE("gaussian log density matches closed forms", "[proposal]") {
  Eigen::VectorXd theta(1), mean(1);
  theta << 0.0;
  mean << 0.0;
  CHECK(gaussian_log_density(theta, mean, 1.0) ==
        Catch::Approx(-0.5 * std::log(2.0 * M_PI)).margin(1e-13));
  Eigen::VectorXd t2(2), m2(2);
  t2 << 1.0, 2.0;
  m2 << 0.0, 1.0;
  CHECK(gaussian_log_density(t2, m2, 2.0) ==
        Catch::Approx(-std::log(4.0 * M_PI) - 0.5).margin(1e-13));
  CHECK_THROWS_AS(gaussian_log_density(t2, m2, 0.0), std::invalid_argument);
}

TEST_CASE("proposal draws are deterministic given the engine state", "[proposal]") {
  Eigen::VectorXd mean(3);
  mean << 0.5, -1.0, 2.0;
  rng::Engine a = rng::make_engine(rng::derive_seed(9, 1, 2, 3));
  rng::Engine b = rng::make_engine(rng::derive_seed(9, 1, 2, 3));
  const Eigen::VectorXd da = sample_proposal(mean, 0.25, a);
  const Eigen::VectorXd db = sample_proposal(mean, 0.25, b);
  CHECK((da - db).norm() == 0.0);
  rng::Engine c = rng::make_engine(rng::derive_seed(9, 1, 2, 4));
  CHECK((sample_proposal(mean, 0.25, c) - da).norm() > 0.0);
}

TEST_CASE("proposal draws have the right moments", "[proposal]") {
  Eigen::VectorXd mean(2);
  mean << 1.0, -2.0;
  const double sigma2 = 0.49;
  rng::Engine eng = rng::make_engine(17);
  const int trials = 20000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Vector2d sumsq = Eigen::Vector2d::Zero();
  for (int i = 0; i < trials; ++i) {
    const Eigen::VectorXd draw = sample_proposal(mean, sigma2, eng);
    sum += draw;
    sumsq += draw.cwiseProduct(draw);
  }
  const Eigen::Vector2d avg = sum / trials;
  const Eigen::Vector2d var =
      sumsq / trials - avg.cwiseProduct(avg);
  CHECK(avg(0) == Catch::Approx(1.0).margin(0.02));
  CHECK(avg(1) == Catch::Approx(-2.0).margin(0.02));
  CHECK(var(0) == Catch::Approx(sigma2).margin(0.02));
  CHECK(var(1) == Catch::Approx(sigma2).margin(0.02));
}

TEST_CASE("tiny variance concentrates draws at the mean", "[proposal]") {
  Eigen::VectorXd mean(2);
  mean << 3.0, -4.0;
  rng::Engine eng = rng::make_engine(5);
  const Eigen::VectorXd draw = sample_proposal(mean, 1e-12, eng);
  CHECK((draw - mean).norm() <= 1e-4);
}

TEST_CASE("proposal parameters are validated", "[proposal]") {
  ProposalParams params;
  params.sigma2_prop = 0.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.sigma2_prop = 1.0;
  params.ridge_lambda = -1e-9;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.ridge_lambda = 0.0;
  CHECK_NOTHROW(params.validate());
}
