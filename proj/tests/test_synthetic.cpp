#include <doctest.h>

#include <cmath>

#include "april/synthetic.hpp"

using namespace april;

TEST_CASE("instances live on the right spheres") {
  const auto inst = make_synthetic_instance(20, 300, 5);
  CHECK(inst.candidates.rows() == 20);
  CHECK(inst.candidates.cols() == 300);
  CHECK(inst.target.norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index j = 0; j < inst.candidates.cols(); ++j) {
    CHECK(inst.candidates.col(j).minCoeff() >= 0.0);
    CHECK(inst.candidates.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(inst.initial < 300);
}

TEST_CASE("simplex sampling is flat") {
  Rng rng(2);
  const int n = 20000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
  for (int i = 0; i < n; ++i) mean += uniform_simplex_point(4, rng);
  mean /= n;
  for (int k = 0; k < 4; ++k) CHECK(mean[k] == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("random selection in two dimensions reaches the best candidate") {
  const auto inst = make_synthetic_instance(2, 20, 3);
  const double best = (inst.target.transpose() * inst.candidates).maxCoeff();
  const auto curve = run_synthetic(inst, 40, Criterion::random);
  CHECK(curve.back() == doctest::Approx(best).epsilon(1e-15));
}

TEST_CASE("curves are nondecreasing and reproducible") {
  SyntheticOptions options;
  options.eus_samples = 500;
  for (const auto c : {Criterion::aeus, Criterion::eus_mc, Criterion::random, Criterion::max_coord}) {
    const auto a = run_synthetic(10, 100, 15, c, 11, options);
    const auto b = run_synthetic(10, 100, 15, c, 11, options);
    CHECK(a == b);
    REQUIRE(a.size() == 15);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] >= a[i - 1]);
  }
}

TEST_CASE("criterion names round-trip") {
  for (const auto c : {Criterion::aeus, Criterion::eus_mc, Criterion::random, Criterion::max_coord}) {
    CHECK(parse_criterion(to_string(c)) == c);
  }
  CHECK_THROWS(parse_criterion("bogus"));
}
