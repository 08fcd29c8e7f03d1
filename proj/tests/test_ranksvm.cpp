#include <doctest.h>

#include <random>

#include "april/ranksvm.hpp"
#include "oracles.hpp"

using namespace april;

namespace {

RankSvmProblem single(const Eigen::VectorXd& loser, const Eigen::VectorXd& winner, double C) {
  RankSvmProblem p;
  p.constraints.push_back({loser, winner});
  p.C = C;
  p.dimension = loser.size();
  return p;
}

Eigen::MatrixXd deltas_of(const RankSvmProblem& p) {
  Eigen::MatrixXd d(p.dimension, static_cast<Eigen::Index>(p.constraints.size()));
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    d.col(static_cast<Eigen::Index>(i)) =
        zero_pad(p.constraints[i].winner, p.dimension) - zero_pad(p.constraints[i].loser, p.dimension);
  }
  return d;
}

}  // namespace

TEST_CASE("single constraint with a large C solves to delta / ||delta||^2") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (const int D : {2, 5, 10}) {
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd a(D), b(D);
      for (int i = 0; i < D; ++i) {
        a[i] = normal(rng);
        b[i] = normal(rng);
      }
      const Eigen::VectorXd delta = b - a;
      const double C = 1.0 / delta.squaredNorm() + 1.0;
      const RankingModel m = solve(single(a, b, C));
      CHECK(m.converged);
      CHECK((m.w - delta / delta.squaredNorm()).norm() < 1e-9);
      CHECK(m.objective == doctest::Approx(0.5 / delta.squaredNorm()).epsilon(1e-9));
      CHECK(m.slacks[0] == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("single constraint with a small C saturates the multiplier") {
  const Eigen::Vector2d loser(0.0, 0.0), winner(0.1, 0.0);
  const double C = 5.0;  // below 1 / ||delta||^2 = 100
  const RankingModel m = solve(single(loser, winner, C));
  // alpha = C, w = C delta, slack = 1 - C ||delta||^2.
  CHECK(m.w[0] == doctest::Approx(0.5));
  CHECK(m.w[1] == doctest::Approx(0.0));
  CHECK(m.slacks[0] == doctest::Approx(0.95));
  CHECK(m.objective == doctest::Approx(0.5 * 0.25 + 5.0 * 0.95));
}

TEST_CASE("identical descriptors leave w at zero with unit slack") {
  const Eigen::Vector3d u(0.2, 0.3, 0.5);
  const RankingModel m = solve(single(u, u, 100.0));
  CHECK(m.w.norm() == doctest::Approx(0.0));
  CHECK(m.slacks[0] == doctest::Approx(1.0));
  CHECK(m.objective == doctest::Approx(100.0));
}

TEST_CASE("random problems match a projected-gradient dual oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 15; ++trial) {
    RankSvmProblem p;
    p.dimension = 2 + trial % 5;
    p.C = trial % 3 == 0 ? 0.5 : 100.0;
    const int m = 3 + trial % 6;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd l(p.dimension), w(p.dimension);
      for (Eigen::Index k = 0; k < p.dimension; ++k) {
        l[k] = normal(rng);
        w[k] = normal(rng);
      }
      p.constraints.push_back({l, w});
    }
    const RankingModel model = solve(p);
    const Eigen::MatrixXd d = deltas_of(p);
    const Eigen::VectorXd alpha = oracle::ranksvm_dual_pg(d, p.C);
    const double reference = oracle::ranksvm_primal(d * alpha, d, p.C);
    CHECK(model.converged);
    CHECK(model.objective <= reference + 1e-6 * std::max(1.0, reference));
    CHECK(model.objective == doctest::Approx(reference).epsilon(1e-5));
    CHECK(objective(model.w, p) == doctest::Approx(model.objective).epsilon(1e-12));
  }
}

TEST_CASE("dual solution satisfies KKT conditions and closes the gap") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd d(4, 12);
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = normal(rng);
  const Eigen::MatrixXd K = d.transpose() * d;  // rank 4, so most constraints are redundant
  const double C = 2.0;
  const DualSolution s = solve_gram(K, C);
  CHECK(s.converged);
  CHECK(s.primal - s.dual < 1e-6 * std::max(1.0, s.primal));
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    const double g = 1.0 - s.margins[i];
    if (s.alpha[i] <= 1e-12) CHECK(g <= 1e-6);
    if (s.alpha[i] >= C - 1e-12) CHECK(g >= -1e-6);
    CHECK(s.alpha[i] >= 0.0);
    CHECK(s.alpha[i] <= C);
  }
}

TEST_CASE("warm start and cold start agree") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd d(6, 9);
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = normal(rng);
  const Eigen::MatrixXd K = d.transpose() * d;
  const DualSolution cold = solve_gram(K, 100.0);
  Eigen::VectorXd warm = Eigen::VectorXd::Constant(9, 3.0);
  const DualSolution hot = solve_gram(K, 100.0, {}, &warm);
  CHECK((d * cold.alpha - d * hot.alpha).norm() < 1e-7);
  CHECK(cold.primal == doctest::Approx(hot.primal).epsilon(1e-9));
}

TEST_CASE("shorter descriptors are zero-padded") {
  RankSvmProblem p;
  p.dimension = 3;
  p.constraints.push_back({Eigen::Vector2d(1.0, 0.0), Eigen::Vector3d(0.0, 0.0, 1.0)});
  const RankingModel m = solve(p);
  CHECK(m.w[0] == doctest::Approx(-0.5));
  CHECK(m.w[2] == doctest::Approx(0.5));
  CHECK(utility(m, Eigen::Vector3d(0.0, 0.0, 1.0)) == doctest::Approx(0.5));
}

TEST_CASE("single precision instantiation") {
  RankSvmProblemT<float> p;
  p.dimension = 2;
  p.C = 100.0f;
  p.constraints.push_back({Eigen::Vector2f(0.0f, 1.0f), Eigen::Vector2f(1.0f, 0.0f)});
  const RankingModelT<float> m = solve(p);
  CHECK(m.w[0] == doctest::Approx(0.5f).epsilon(1e-5));
  CHECK(m.w[1] == doctest::Approx(-0.5f).epsilon(1e-5));
}

TEST_CASE("invalid problems are rejected") {
  RankSvmProblem p = single(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0), 100.0);
  p.C = 0.0;
  CHECK_THROWS_AS(solve(p), InvalidProblem);
  p.C = 1.0;
  p.dimension = 1;
  CHECK_THROWS_AS(solve(p), InvalidProblem);
  p.dimension = 2;
  p.constraints[0].winner = Eigen::Vector2d(std::nan(""), 0.0);
  CHECK_THROWS_AS(solve(p), InvalidProblem);
}

TEST_CASE("empty constraint set gives the zero model") {
  RankSvmProblem p;
  p.dimension = 4;
  const RankingModel m = solve(p);
  CHECK(m.w.isZero());
  CHECK(m.objective == 0.0);
  CHECK(m.converged);
}
