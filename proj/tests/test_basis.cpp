#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gibbsam/basis.hpp"

using namespace gibbsam;

TEST_CASE("dictionary values match the trigonometric system", "[basis]") {
  CHECK(eval_basis(1, -0.7) == 1.0);
  CHECK(eval_basis(1, 0.3) == 1.0);
  CHECK(eval_basis(2, 0.0) == 1.0);
  CHECK(eval_basis(2, 1.0) == Catch::Approx(-1.0).margin(1e-15));
  CHECK(eval_basis(3, 0.5) == Catch::Approx(1.0).margin(1e-15));
  CHECK(eval_basis(4, 0.5) == Catch::Approx(-1.0).margin(1e-15));
  CHECK(eval_basis(5, 0.25) == Catch::Approx(1.0).margin(1e-15));
  CHECK(eval_basis(6, 0.2) == Catch::Approx(std::cos(3.0 * M_PI * 0.2)));
  CHECK(eval_basis(7, -0.4) == Catch::Approx(std::sin(3.0 * M_PI * -0.4)));
}

TEST_CASE("dictionary entries are bounded by one", "[basis]") {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double t = unif(eng);
    for (int k = 1; k <= 40; ++k) CHECK(std::abs(eval_basis(k, t)) <= 1.0 + 1e-15);
  }
}

TEST_CASE("invalid dictionary index throws", "[basis]") {
  CHECK_THROWS_AS(eval_basis(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(eval_basis(-3, 0.5), std::invalid_argument);
}

TEST_CASE("coefficient dimension counts expansion sizes", "[basis]") {
  CHECK(coeff_dim(ModelIndex{2, 0, 1}) == 3);
  CHECK(coeff_dim(ModelIndex{0, 0}) == 0);
  CHECK(coeff_dim(ModelIndex{8}) == 8);
}

TEST_CASE("additive evaluation matches a hand computation", "[basis]") {
  AdditiveFunction f;
  f.model = {1, 2};
  f.coeffs.resize(3);
  f.coeffs << 0.5, -0.2, 0.3;
  Eigen::Vector2d x(0.1, 0.0);
  CHECK(eval_additive(f, x) == Catch::Approx(0.3).margin(1e-12));
  x << -0.9, 1.0;
  CHECK(eval_additive(f, x) ==
        Catch::Approx(0.5 - 0.2 + 0.3 * std::cos(M_PI)).margin(1e-12));
  x << 0.2, 0.6;
  CHECK(eval_additive(f, x) ==
        Catch::Approx(0.5 - 0.2 + 0.3 * std::cos(M_PI * 0.8)).margin(1e-12));
}

TEST_CASE("additive evaluation is linear in the coefficients", "[basis]") {
  std::mt19937_64 eng(29);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  AdditiveFunction f, g, mix;
  f.model = {3, 0, 2, 1};
  g.model = f.model;
  mix.model = f.model;
  const int d = coeff_dim(f.model);
  for (int trial = 0; trial < 50; ++trial) {
    f.coeffs = Eigen::VectorXd::NullaryExpr(d, [&]() { return unif(eng); });
    g.coeffs = Eigen::VectorXd::NullaryExpr(d, [&]() { return unif(eng); });
    const double a = unif(eng), b = unif(eng);
    mix.coeffs = a * f.coeffs + b * g.coeffs;
    Eigen::Vector4d x(unif(eng), unif(eng), unif(eng), unif(eng));
    CHECK(eval_additive(mix, x) ==
          Catch::Approx(a * eval_additive(f, x) + b * eval_additive(g, x))
              .margin(1e-12));
  }
}

TEST_CASE("additive evaluation is bounded by the l1 norm", "[basis]") {
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  AdditiveFunction f;
  f.model = {4, 2, 0, 3};
  const int d = coeff_dim(f.model);
  for (int trial = 0; trial < 200; ++trial) {
    f.coeffs = Eigen::VectorXd::NullaryExpr(d, [&]() { return unif(eng); });
    Eigen::Vector4d x(unif(eng) / 2, unif(eng) / 2, unif(eng) / 2,
                      unif(eng) / 2);
    CHECK(std::abs(eval_additive(f, x)) <=
          f.coeffs.cwiseAbs().sum() + 1e-12);
  }
}

TEST_CASE("additive evaluation validates conformality", "[basis]") {
  AdditiveFunction f;
  f.model = {1, 1};
  f.coeffs = Eigen::VectorXd::Zero(2);
  Eigen::Vector3d x3(0.0, 0.0, 0.0);
  CHECK_THROWS_AS(eval_additive(f, x3), std::invalid_argument);
  f.coeffs = Eigen::VectorXd::Zero(3);
  Eigen::Vector2d x2(0.0, 0.0);
  CHECK_THROWS_AS(eval_additive(f, x2), std::invalid_argument);
}

TEST_CASE("triple export and import round trip", "[basis]") {
  AdditiveFunction f;
  f.model = {0, 2, 0, 1};
  f.coeffs.resize(3);
  f.coeffs << 1.5, -2.5, 0.25;
  const auto triples = to_triples(f);
  REQUIRE(triples.size() == 3);
  CHECK(triples[0].j == 2);
  CHECK(triples[0].k == 1);
  CHECK(triples[0].value == 1.5);
  CHECK(triples[1].j == 2);
  CHECK(triples[1].k == 2);
  CHECK(triples[1].value == -2.5);
  CHECK(triples[2].j == 4);
  CHECK(triples[2].k == 1);
  CHECK(triples[2].value == 0.25);
  const AdditiveFunction back = from_triples(4, triples);
  CHECK(back.model == f.model);
  CHECK((back.coeffs - f.coeffs).norm() == 0.0);
}

TEST_CASE("triple import rejects invalid coordinates", "[basis]") {
  CHECK_THROWS_AS(from_triples(2, {{3, 1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(from_triples(2, {{0, 1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(from_triples(2, {{1, 0, 1.0}}), std::invalid_argument);
}
