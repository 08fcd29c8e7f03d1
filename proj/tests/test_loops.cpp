#include <doctest.h>

#include "april/loops.hpp"

using namespace april;

namespace {

LoopConfig quick_cancer() {
  LoopConfig c = LoopConfig::defaults(Environment::cancer);
  c.lambda = 5;
  c.irl_generations = 5;
  c.expert_generations = 10;
  return c;
}

}  // namespace

TEST_CASE("archive bookkeeping") {
  RankingArchive a(Eigen::Vector2d(1.0, 0.0));
  CHECK(a.record_comparison(Eigen::Vector2d(0.0, 1.0), true) == 1);
  CHECK(a.incumbent() == 1);
  CHECK(a.constraints().back() == PairwiseConstraint{0, 1});
  CHECK(a.record_comparison(Eigen::Vector3d(0.2, 0.2, 0.6), false) == 2);
  CHECK(a.incumbent() == 1);
  CHECK(a.constraints().back() == PairwiseConstraint{2, 1});
  CHECK(a.dimension() == 3);
  const Eigen::MatrixXd d = a.difference_matrix(4);
  CHECK(d.rows() == 4);
  CHECK(d.col(1) == Eigen::Vector4d(-0.2, 0.8, -0.6, 0.0));
  CHECK_THROWS(a.add_constraint(0, 7));
}

TEST_CASE("april keeps one archive entry per demonstration") {
  const LoopConfig config = quick_cancer();
  AprilState state = april_initialize(config, 3);
  EmulatedOracle oracle(config.env);
  double incumbent = trajectory_score(state.incumbent_trajectory(), config.env);
  for (int i = 1; i <= 6; ++i) {
    const auto rec = april_iterate(state, config, oracle);
    CHECK(rec.iteration == i);
    CHECK(state.ranking.size() == static_cast<std::size_t>(i + 1));
    CHECK(state.ranking.constraints().size() == static_cast<std::size_t>(i));
    CHECK(state.policies.size() == state.ranking.size());
    CHECK(rec.incumbent_score <= incumbent);
    CHECK(rec.candidate_won == (rec.candidate_score < incumbent));
    incumbent = rec.incumbent_score;
    CHECK(incumbent == trajectory_score(state.incumbent_trajectory(), config.env));
  }
}

TEST_CASE("april is deterministic and replayable") {
  const LoopConfig config = quick_cancer();
  AprilState a = april_initialize(config, 9);
  AprilState b = april_initialize(config, 9);
  EmulatedOracle oracle(config.env);
  std::vector<bool> verdicts;
  for (int i = 0; i < 4; ++i) verdicts.push_back(april_iterate(a, config, oracle).candidate_won);
  ScriptedOracle script(verdicts);
  for (int i = 0; i < 4; ++i) april_iterate(b, config, script);
  CHECK(script.consumed() == 4);
  REQUIRE(a.ranking.size() == b.ranking.size());
  for (std::size_t i = 0; i < a.ranking.size(); ++i) CHECK(a.ranking.descriptors()[i] == b.ranking.descriptors()[i]);
  CHECK(a.ranking.incumbent() == b.ranking.incumbent());
  CHECK_THROWS_AS(april_iterate(b, config, script), OracleExhausted);
}

TEST_CASE("projection update") {
  BehaviorDescriptor bar = Eigen::Vector2d(0.0, 1.0);
  const BehaviorDescriptor expert = Eigen::Vector2d(1.0, 0.0);
  // Fresh point equal to the expert lands on the expert.
  CHECK(projection_update(bar, expert, expert));
  CHECK((bar - expert).norm() == doctest::Approx(0.0));
  // Fresh point equal to the iterate is flagged.
  BehaviorDescriptor same = Eigen::Vector2d(0.5, 0.5);
  CHECK_FALSE(projection_update(same, expert, Eigen::Vector2d(0.5, 0.5)));
  CHECK(same == Eigen::Vector2d(0.5, 0.5));
  // Projection onto the segment direction never moves away from the expert.
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    BehaviorDescriptor p = Eigen::Vector3d(u(rng), u(rng), u(rng));
    const BehaviorDescriptor e = Eigen::Vector3d(u(rng), u(rng), u(rng));
    const BehaviorDescriptor f = Eigen::Vector3d(u(rng), u(rng), u(rng));
    const double before = (e - p).norm();
    projection_update(p, e, f);
    CHECK((e - p).norm() <= before + 1e-12);
  }
}

TEST_CASE("irl first reward is expert minus the initial histogram") {
  const LoopConfig config = quick_cancer();
  const Trajectory demo = make_expert_demo(config, 2);
  IrlState state = irl_initialize(config, demo, 2);
  const Eigen::Index d = state.book.size();
  CHECK((state.reward - (align(state.expert, d) - align(state.descriptors.front(), d))).norm() == 0.0);
  double previous = state.distance();
  for (int i = 0; i < 5; ++i) {
    irl_projection_iterate(state, config, config.irl_generations);
    CHECK(state.distance() <= previous + 1e-12);
    previous = state.distance();
  }
  CHECK(state.scores.size() == 6);
}

TEST_CASE("expert demonstrations are cached and reproducible") {
  const LoopConfig config = quick_cancer();
  const Trajectory a = make_expert_demo(config, 5);
  const Trajectory b = make_expert_demo(config, 5);
  CHECK(a.actions == b.actions);
  // A longer search extends a shorter one and never ends worse.
  LoopConfig shorter = config;
  shorter.expert_generations = 2;
  LoopConfig none = config;
  none.expert_generations = 0;
  const double s10 = trajectory_score(a, config.env);
  const double s2 = trajectory_score(make_expert_demo(shorter, 5), config.env);
  const double s0 = trajectory_score(make_expert_demo(none, 5), config.env);
  CHECK(s10 <= s2);
  CHECK(s2 <= s0);
}

TEST_CASE("es with a single offspring") {
  LoopConfig config = quick_cancer();
  config.lambda = 1;
  EsState state = es_initialize(config, 1);
  EmulatedOracle oracle(config.env);
  double best = trajectory_score(state.best_trajectory, config.env);
  for (int g = 0; g < 10; ++g) {
    const auto recs = es_iterate(state, config, oracle);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].iteration == g + 1);
    CHECK(recs[0].incumbent_score <= best);
    best = recs[0].incumbent_score;
  }
  CHECK(state.demonstrations == 10);
}

TEST_CASE("es generation accounting") {
  const LoopConfig config = quick_cancer();
  EsState state = es_initialize(config, 4);
  EmulatedOracle oracle(config.env);
  const auto recs = es_iterate(state, config, oracle);
  REQUIRE(recs.size() == 5);
  for (std::size_t j = 0; j < recs.size(); ++j) CHECK(recs[j].iteration == static_cast<int>(j + 1));
  CHECK(recs.back().incumbent_score == trajectory_score(state.best_trajectory, config.env));
}
