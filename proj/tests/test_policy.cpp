#include <doctest.h>

#include <cmath>

#include "april/envs.hpp"
#include "april/policy.hpp"

using namespace april;

TEST_CASE("parameter counts") {
  CHECK(param_dim({2, 9, 1}) == 37);
  CHECK(param_dim({2, 99, 1}) == 397);
  CHECK(param_dim({1, 1, 1}) == 4);
  CHECK_THROWS(param_dim({0, 9, 1}));
}

TEST_CASE("zero policy acts neutrally") {
  const auto mc = EnvironmentConfig::defaults(Environment::mountain_car);
  const auto cancer = EnvironmentConfig::defaults(Environment::cancer);
  const auto pmc = ParametricPolicy::zeros(mc.default_policy_shape());
  const auto pc = ParametricPolicy::zeros(cancer.default_policy_shape());
  for (const Eigen::Vector2d& s : {Eigen::Vector2d(-0.5, 0.0), Eigen::Vector2d(0.3, 0.05)}) {
    CHECK(act(mc, pmc, s) == 0.0);
  }
  for (const Eigen::Vector2d& s : {Eigen::Vector2d(1.3, 0.0), Eigen::Vector2d(0.0, 2.0)}) {
    CHECK(act(cancer, pc, s) == 0.5);
  }
}

TEST_CASE("a large output bias saturates the action") {
  const auto mc = EnvironmentConfig::defaults(Environment::mountain_car);
  const auto cancer = EnvironmentConfig::defaults(Environment::cancer);
  auto pmc = ParametricPolicy::zeros(mc.default_policy_shape());
  auto pc = ParametricPolicy::zeros(cancer.default_policy_shape());
  pmc.weights[pmc.weights.size() - 1] = 10.0;
  pc.weights[pc.weights.size() - 1] = 10.0;
  CHECK(act(mc, pmc, Eigen::Vector2d(-0.5, 0.0)) == 1.0);
  CHECK(act(cancer, pc, Eigen::Vector2d(1.3, 0.0)) == doctest::Approx((std::tanh(10.0) + 1.0) / 2.0));
  CHECK(act(cancer, pc, Eigen::Vector2d(1.3, 0.0)) > 0.999999);
}

TEST_CASE("forward pass matches a hand-built network") {
  // 1 input, 2 hidden, 1 output.
  Eigen::VectorXd w(7);
  w << 0.5, 0.1, -1.0, 0.2, 2.0, -3.0, 0.4;
  const ParametricPolicy p({1, 2, 1}, w);
  Eigen::VectorXd x(1);
  x << 0.3;
  const double h0 = std::tanh(0.5 * 0.3 + 0.1);
  const double h1 = std::tanh(-1.0 * 0.3 + 0.2);
  CHECK(forward(p, x)[0] == doctest::Approx(2.0 * h0 - 3.0 * h1 + 0.4));
}

TEST_CASE("action thresholds") {
  CHECK(discrete_action(-0.5) == -1);
  CHECK(discrete_action(0.0) == 0);
  CHECK(discrete_action(0.3) == 0);
  CHECK(discrete_action(0.5) == 1);
  CHECK(dosage_action(0.0) == 0.5);
  CHECK(dosage_action(-50.0) >= 0.0);
  CHECK(dosage_action(50.0) <= 1.0);
}

TEST_CASE("perturbation statistics and determinism") {
  const auto p = ParametricPolicy::zeros({2, 99, 1});
  Rng a(42), b(42);
  const auto q1 = perturb(p, 1.0, a);
  const auto q2 = perturb(p, 1.0, b);
  CHECK(q1.weights == q2.weights);
  Rng rng(1);
  double sum = 0.0, sq = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto q = perturb(p, 2.0, rng);
    sum += q.weights.sum();
    sq += q.weights.squaredNorm();
  }
  const double n = reps * 397.0;
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.03);
  CHECK(sd == doctest::Approx(2.0).epsilon(0.03));
  Rng c(9);
  CHECK(perturb(p, 1e-12, c).weights.cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS(perturb(p, 0.0, c));
}

TEST_CASE("one-fifth style step-size adaptation") {
  CHECK(adapt_sigma({1.0, 1.5}, true).sigma == doctest::Approx(1.5));
  CHECK(adapt_sigma({1.0, 1.5}, false).sigma == doctest::Approx(0.9036).epsilon(1e-4));
  StepSizeState s{1.0, 1.5};
  for (int i = 0; i < 4; ++i) {
    s = adapt_sigma(s, true);
    s = adapt_sigma(s, false);
  }
  CHECK(s.sigma == doctest::Approx(3.375).epsilon(1e-12));
}

TEST_CASE("mismatched weights are rejected") {
  CHECK_THROWS(ParametricPolicy({2, 9, 1}, Eigen::VectorXd::Zero(36)));
}
