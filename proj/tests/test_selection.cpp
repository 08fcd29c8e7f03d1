#include <doctest.h>

#include <cmath>
#include <algorithm>

#include "april/selection.hpp"
#include "april/version_space.hpp"

using namespace april;

TEST_CASE("analytic expected-utility approximation") {
  RankingArchive archive(Eigen::Vector2d(0.0, 1.0));
  const AeusScorer scorer(archive, 2, 100.0);
  const AeusTerm t = scorer.evaluate(Eigen::Vector2d(1.0, 0.0));
  CHECK(t.w_plus.w[0] == doctest::Approx(0.5));
  CHECK(t.w_plus.w[1] == doctest::Approx(-0.5));
  CHECK(t.w_plus.objective == doctest::Approx(0.25));
  CHECK(t.w_minus.w[0] == doctest::Approx(-0.5));
  CHECK(t.w_minus.w[1] == doctest::Approx(0.5));
  CHECK(t.candidate_utility == doctest::Approx(0.5));
  CHECK(t.incumbent_utility == doctest::Approx(0.5));
  CHECK(t.score == doctest::Approx(4.0).epsilon(1e-6));
  CHECK_FALSE(t.degenerate);
  CHECK(scorer.score(Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("the incumbent itself scores zero") {
  RankingArchive archive(Eigen::Vector2d(0.0, 1.0));
  const std::vector<BehaviorDescriptor> same = {Eigen::Vector2d(0.0, 1.0)};
  const auto e = aeus_score(archive, same, 100.0);
  CHECK(e.score == 0.0);
  CHECK(e.degenerate);
}

TEST_CASE("warm-started scoring agrees with direct solves") {
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto rand_desc = [&](int d) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x[i] = u(rng);
    return Eigen::VectorXd(x / x.sum());
  };
  RankingArchive archive(rand_desc(6));
  for (int i = 0; i < 8; ++i) archive.record_comparison(rand_desc(6), u(rng) < 0.5);
  const AeusScorer scorer(archive, 6, 100.0);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd x = rand_desc(6);
    const Eigen::VectorXd ut = archive.incumbent_descriptor();
    RankSvmProblem plus = archive.problem(100.0, 6);
    plus.constraints.push_back({ut, x});
    RankSvmProblem minus = archive.problem(100.0, 6);
    minus.constraints.push_back({x, ut});
    const auto wp = solve(plus);
    const auto wm = solve(minus);
    const double expected = utility(wp, x) / wp.objective + utility(wm, ut) / wm.objective;
    CHECK(scorer.score(x) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("aeus averages over descriptors and is order invariant") {
  RankingArchive archive(Eigen::Vector2d(0.0, 1.0));
  std::vector<BehaviorDescriptor> c = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.5, 0.5), Eigen::Vector3d(0.2, 0.3, 0.5)};
  const auto a = aeus_score(archive, c, 100.0);
  std::reverse(c.begin(), c.end());
  const auto b = aeus_score(archive, c, 100.0);
  CHECK(a.score == doctest::Approx(b.score).epsilon(1e-12));
  CHECK(a.terms.size() == 3);
  double mean = 0.0;
  for (const auto& t : a.terms) mean += t.score / 3.0;
  CHECK(a.score == doctest::Approx(mean));
}

TEST_CASE("version-space sampling") {
  Rng rng(1);
  const Eigen::MatrixXd none(2, 0);
  const Eigen::MatrixXd s = sample_version_space(none, 10000, rng);
  CHECK(s.cols() == 10000);
  CHECK(std::abs(s.row(0).mean()) < 0.05);
  CHECK(std::abs(s.row(1).mean()) < 0.05);
  CHECK(s.colwise().norm().maxCoeff() <= 1.0);

  Eigen::MatrixXd d(3, 2);
  d << 1.0, 0.0, -1.0, 1.0, 0.0, -1.0;
  const Eigen::MatrixXd t = sample_version_space(d, 2000, rng);
  const Eigen::MatrixXd margins = d.transpose() * t;
  CHECK(margins.minCoeff() > 0.0);
  CHECK(t.colwise().norm().maxCoeff() <= 1.0);

  Eigen::MatrixXd contradiction(2, 2);
  contradiction << 1.0, -1.0, -1.0, 1.0;
  CHECK_THROWS_AS(sample_version_space(contradiction, 10, rng), EmptyVersionSpace);
  CHECK_THROWS_AS(interior_point(contradiction), EmptyVersionSpace);
}

TEST_CASE("interior point is strictly feasible") {
  Eigen::MatrixXd d(2, 1);
  d << -1.0, 1.0;
  const Eigen::VectorXd w = interior_point(d);
  CHECK(w.norm() == doctest::Approx(0.5));
  CHECK(w.dot(d.col(0)) > 0.0);
}

TEST_CASE("eus estimate is symmetric for mirrored descriptors") {
  RankingArchive archive(Eigen::Vector2d(0.0, 1.0));
  Rng rng(10);
  const Eigen::MatrixXd none(2, 0);
  const Eigen::MatrixXd s = sample_version_space(none, 200000, rng);
  const Eigen::Vector2d ux(1.0, 0.0), ut(0.0, 1.0);
  double plus = 0.0, minus = 0.0;
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    const double a = s.col(j).dot(ux), b = s.col(j).dot(ut);
    if (a > b) plus += a;
    else minus += b;
  }
  plus /= static_cast<double>(s.cols());
  minus /= static_cast<double>(s.cols());
  CHECK(plus == doctest::Approx(minus).epsilon(0.02));
  const double brute = eus_estimate(s, ux, ut);
  CHECK(brute == doctest::Approx(plus + minus).epsilon(1e-12));
  // Uniform disk: E[r] = 2/3 and E[max(cos, sin)] = sqrt(2) / pi.
  const double analytic = (2.0 / 3.0) * std::sqrt(2.0) / M_PI;
  CHECK(brute == doctest::Approx(analytic).epsilon(0.01));
}

TEST_CASE("eus of the incumbent is its mean utility") {
  RankingArchive archive(Eigen::Vector2d(0.3, 0.7));
  Rng rng(3);
  const Eigen::MatrixXd s = sample_version_space(Eigen::MatrixXd(2, 0), 5000, rng);
  const Eigen::Vector2d ut(0.3, 0.7);
  CHECK(eus_estimate(s, ut, ut) == doctest::Approx((s.transpose() * ut).mean()).epsilon(1e-12));
}

TEST_CASE("max-coordinate selection") {
  Eigen::MatrixXd S(2, 2);
  S << 0.9, 0.5, 0.1, 0.5;
  CHECK(select_max_coord(S, {false, false}) == 0);
  CHECK(select_max_coord(S, {true, false}) == 1);
  Eigen::MatrixXd T(2, 3);
  T << 0.2, 0.8, 0.8, 0.8, 0.2, 0.2;
  CHECK(select_max_coord(T, {false, false, false}) == 0);
  CHECK(select_max_coord(T, {true, false, false}) == 1);
  CHECK_THROWS(select_max_coord(T, {true, true, true}));
}
