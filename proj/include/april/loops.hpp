#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "april/archive.hpp"
#include "april/behavior.hpp"
#include "april/envs.hpp"
#include "april/policy.hpp"
#include "april/ranksvm.hpp"

namespace april {

/// Settings shared by the APRIL loop and its two baselines.
struct LoopConfig {
  EnvironmentConfig env = EnvironmentConfig::defaults(Environment::mountain_car);
  PolicyShape shape = {2, 9, 1};
  double C = 100.0;
  /// Candidate policies per iteration (and offspring per ES generation).
  int lambda = 11;
  /// Rollouts per candidate for the selection estimate; 0 picks 11 for stochastic environments, else 1.
  int n_rollouts = 0;
  /// Score a candidate once on its mean descriptor instead of once per rollout.
  bool mean_descriptor = false;
  double initial_sigma = 1.0;
  double sigma_factor = 1.5;
  /// Inner ES generations per IRL iteration.
  int irl_generations = 50;
  /// ES generations used to build the expert demonstration handed to IRL.
  int expert_generations = 200;
  SolverOptions solver;

  static LoopConfig defaults(Environment env);
  bool stochastic() const { return env.noise.sigma > 0.0 || env.hazard.enabled; }
  int rollouts_per_candidate() const;
};

/// Pairwise judge of a demonstrated candidate against the incumbent demonstration.
class ExpertOracle {
 public:
  virtual ~ExpertOracle() = default;
  /// True when the candidate is preferred.
  virtual bool prefer(const Trajectory& candidate, const Trajectory& incumbent) = 0;
  virtual std::string source() const = 0;
};

/// Benchmark expert: lower emulated score wins, ties go to the incumbent.
class EmulatedOracle final : public ExpertOracle {
 public:
  explicit EmulatedOracle(EnvironmentConfig config) : config_(std::move(config)) {}
  bool prefer(const Trajectory& candidate, const Trajectory& incumbent) override;
  std::string source() const override { return "emulated"; }

 private:
  EnvironmentConfig config_;
};

/// Plays back recorded verdicts (run-log replay and human sessions). Throws when it runs dry.
class ScriptedOracle final : public ExpertOracle {
 public:
  explicit ScriptedOracle(std::vector<bool> verdicts, std::string source = "scripted")
      : verdicts_(std::move(verdicts)), source_(std::move(source)) {}
  bool prefer(const Trajectory& candidate, const Trajectory& incumbent) override;
  std::string source() const override { return source_; }
  std::size_t consumed() const { return next_; }

 private:
  std::vector<bool> verdicts_;
  std::size_t next_ = 0;
  std::string source_;
};

class OracleExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One demonstration shown to the expert.
struct IterationRecord {
  int iteration = 0;
  std::size_t policy_id = 0;
  std::size_t trajectory_id = 0;
  bool candidate_won = false;
  double candidate_score = 0.0;
  double incumbent_score = 0.0;
  double sigma = 0.0;
  Eigen::Index dimension = 0;
  double criterion = 0.0;
  double wall_ms = 0.0;
};

// ---------------------------------------------------------------------------------------------
// APRIL

struct AprilState {
  RankingArchive ranking;
  std::vector<ParametricPolicy> policies;
  std::vector<Trajectory> trajectories;
  ClusterBook book;
  StepSizeState step;
  int iteration = 0;
  std::uint64_t seed = 0;

  const ParametricPolicy& incumbent_policy() const { return policies[ranking.incumbent()]; }
  const Trajectory& incumbent_trajectory() const { return trajectories[ranking.incumbent()]; }
};

/// Demonstrates the seed's random initial policy and makes it the incumbent.
AprilState april_initialize(const LoopConfig& config, std::uint64_t seed);

/// The candidate chosen by the self-training phase, already demonstrated and featurized.
struct Proposal {
  int iteration = 0;
  ParametricPolicy policy;
  Trajectory trajectory;
  BehaviorDescriptor descriptor;
  std::size_t candidate_index = 0;
  std::vector<double> candidate_scores;
  double criterion = 0.0;
};

/// Steps 1-3 of an iteration: perturb the incumbent policy lambda times, score each candidate by the
/// approximate expected utility of selection over its estimation rollouts, demonstrate the argmax.
/// Only the cluster book changes.
Proposal april_propose(AprilState& state, const LoopConfig& config);

/// Steps 5-6: archive the demonstration and its verdict against the incumbent, then adapt sigma.
IterationRecord april_apply(AprilState& state, const LoopConfig& config, Proposal proposal, bool candidate_wins);

/// One full iteration against an oracle.
IterationRecord april_iterate(AprilState& state, const LoopConfig& config, ExpertOracle& oracle);

// ---------------------------------------------------------------------------------------------
// (1+lambda)-ES

struct EsState {
  ParametricPolicy best;
  Trajectory best_trajectory;
  StepSizeState step;
  int generation = 0;
  std::size_t demonstrations = 0;
  std::uint64_t seed = 0;
};

EsState es_initialize(const LoopConfig& config, std::uint64_t seed);

/// One generation: lambda perturbations of the incumbent are demonstrated, the oracle picks the best
/// of them by successive comparisons, the best then meets the incumbent. Every offspring is one
/// demonstration, so the generation yields lambda records.
std::vector<IterationRecord> es_iterate(EsState& state, const LoopConfig& config, ExpertOracle& oracle);

// ---------------------------------------------------------------------------------------------
// IRL projection baseline

struct IrlState {
  BehaviorDescriptor expert;
  BehaviorDescriptor projection;
  BehaviorDescriptor reward;
  std::vector<ParametricPolicy> policies;
  std::vector<BehaviorDescriptor> descriptors;
  std::vector<double> scores;
  ClusterBook book;
  int iteration = 0;
  bool stagnated = false;
  std::uint64_t seed = 0;

  /// ||expert - projection||.
  double distance() const;
  double best_score() const;
};

/// Featurizes the expert demonstration, demonstrates the random initial policy, and sets the projection
/// iterate to its descriptor.
IrlState irl_initialize(const LoopConfig& config, const Trajectory& expert_demo, std::uint64_t seed);

/// Projection update toward the expert descriptor. Returns false (iterate unchanged) when the new
/// descriptor equals the current iterate.
bool projection_update(BehaviorDescriptor& projection, const BehaviorDescriptor& expert,
                       const BehaviorDescriptor& fresh);

/// reward = expert - projection; optimize a policy for <reward, descriptor> with the ES machinery over
/// `generations` generations, then project.
IterationRecord irl_projection_iterate(IrlState& state, const LoopConfig& config, int generations);

/// Near-optimal demonstration: best trajectory of a long (1+lambda)-ES on the emulated score.
Trajectory make_expert_demo(const LoopConfig& config, std::uint64_t seed);

}  // namespace april
