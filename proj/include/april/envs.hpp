#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "april/policy.hpp"
#include "april/random.hpp"

namespace april {

enum class Environment { mountain_car, cancer };

std::string to_string(Environment env);
Environment parse_environment(std::string_view name);

enum class TerminalReason { goal_reached, horizon, death };

std::string to_string(TerminalReason reason);
TerminalReason parse_terminal_reason(std::string_view name);

class EnvironmentMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace mountain_car {
inline constexpr double min_position = -1.2;
inline constexpr double max_position = 0.6;
inline constexpr double max_speed = 0.07;
inline constexpr double goal_position = 0.5;
inline constexpr double start_position = -0.5;
inline constexpr int default_horizon = 1000;
}  // namespace mountain_car

namespace cancer {
inline constexpr double initial_tumor = 1.3;
inline constexpr double initial_toxicity = 0.0;
inline constexpr int default_horizon = 12;
}  // namespace cancer

struct MountainCarState {
  double position = mountain_car::start_position;
  double velocity = 0.0;
};

struct CancerState {
  double tumor = cancer::initial_tumor;
  double toxicity = cancer::initial_toxicity;
  bool alive = true;
  int month = 0;
};

/// Per-month death probability 1 - exp(-exp(c0 + c1 * tumor + c2 * toxicity)).
struct HazardModel {
  bool enabled = false;
  double c0 = -4.0;
  double c1 = 1.0;
  double c2 = 1.0;

  double death_probability(double tumor, double toxicity) const;
};

enum class NoiseSharing { independent, shared };

struct NoiseSpec {
  double sigma = 0.0;
  NoiseSharing sharing = NoiseSharing::independent;
};

/// Everything that shapes a rollout, its featurization, and its emulated score.
struct EnvironmentConfig {
  Environment environment = Environment::mountain_car;
  int horizon = mountain_car::default_horizon;
  NoiseSpec noise;
  HazardModel hazard;
  /// Added to the cancer score of a trajectory that ends in death.
  double death_penalty = 10.0;
  /// Multiplies (goal - max position) for mountain-car trajectories that never reach the goal.
  double miss_scale = 1000.0;
  /// Upper normalization bound for tumor size and toxicity; values above it saturate.
  double cancer_state_bound = 4.0;
  /// Cluster radius of the sensori-motor book.
  double cluster_radius = 0.15;

  static EnvironmentConfig defaults(Environment env);
  PolicyShape default_policy_shape() const;
};

MountainCarState mc_step(const MountainCarState& state, int action);

/// One month of treatment. Throws when stepping a dead patient or past the horizon.
CancerState cancer_step(const CancerState& state, double dosage, const NoiseSpec& noise, Rng& rng,
                        const HazardModel& hazard = {}, int horizon = cancer::default_horizon);

/// Recorded rollout. states[k] is the state before actions[k]; states has one more entry than actions.
/// For mountain car a state is (position, velocity); for cancer it is (tumor, toxicity).
struct Trajectory {
  Environment environment = Environment::mountain_car;
  std::vector<Eigen::Vector2d> states;
  std::vector<double> actions;
  TerminalReason reason = TerminalReason::horizon;
  std::uint64_t seed = 0;

  std::size_t length() const { return actions.size(); }
};

/// Network input for a raw state, min-max normalized to [-1, 1] by the environment bounds.
Eigen::VectorXd observation(const EnvironmentConfig& config, const Eigen::Vector2d& state);

/// Policy action for a raw state: {-1, 0, 1} for mountain car, a dosage in [0, 1] for cancer.
double act(const EnvironmentConfig& config, const ParametricPolicy& policy, const Eigen::Vector2d& state);

Trajectory rollout(const EnvironmentConfig& config, const ParametricPolicy& policy, std::uint64_t seed);

/// Sensori-motor stream of a trajectory: one point in [0,1]^k per time step, the normalized state
/// concatenated with the normalized action. For cancer a fourth coordinate flags death; a dead patient
/// contributes one death point per remaining month up to the horizon.
std::vector<Eigen::VectorXd> sensorimotor_points(const EnvironmentConfig& config, const Trajectory& trajectory);

Eigen::Index sensorimotor_dimension(Environment env);

/// Lower is better. Goal-reaching runs score their step count; others score
/// horizon + (goal - max position) * miss_scale.
double mc_trajectory_score(const Trajectory& trajectory, const EnvironmentConfig& config);

/// Lower is better. Final tumor + toxicity, plus death_penalty when the patient died.
double cancer_trajectory_score(const Trajectory& trajectory, const EnvironmentConfig& config);

double trajectory_score(const Trajectory& trajectory, const EnvironmentConfig& config);

/// True when the candidate strictly beats the incumbent; ties go to the incumbent.
bool emulated_prefer(const Trajectory& candidate, const Trajectory& incumbent, const EnvironmentConfig& config);

}  // namespace april
