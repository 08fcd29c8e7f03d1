#include "april/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace april {

std::string to_string(Environment env) {
  switch (env) {
    case Environment::mountain_car:
      return "mountain_car";
    case Environment::cancer:
      return "cancer";
  }
  return "unknown";
}

Environment parse_environment(std::string_view name) {
  if (name == "mountain_car") return Environment::mountain_car;
  if (name == "cancer") return Environment::cancer;
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

std::string to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::goal_reached:
      return "goal_reached";
    case TerminalReason::horizon:
      return "horizon";
    case TerminalReason::death:
      return "death";
  }
  return "unknown";
}

TerminalReason parse_terminal_reason(std::string_view name) {
  if (name == "goal_reached") return TerminalReason::goal_reached;
  if (name == "horizon") return TerminalReason::horizon;
  if (name == "death") return TerminalReason::death;
  throw std::invalid_argument("unknown terminal reason '" + std::string(name) + "'");
}

double HazardModel::death_probability(double tumor, double toxicity) const {
  return 1.0 - std::exp(-std::exp(c0 + c1 * tumor + c2 * toxicity));
}

EnvironmentConfig EnvironmentConfig::defaults(Environment env) {
  EnvironmentConfig config;
  config.environment = env;
  config.horizon = env == Environment::mountain_car ? mountain_car::default_horizon : cancer::default_horizon;
  config.cluster_radius = env == Environment::mountain_car ? 0.15 : 0.25;
  return config;
}

PolicyShape EnvironmentConfig::default_policy_shape() const {
  return environment == Environment::mountain_car ? PolicyShape{2, 9, 1} : PolicyShape{2, 99, 1};
}

MountainCarState mc_step(const MountainCarState& state, int action) {
  if (action < -1 || action > 1) throw std::invalid_argument("mountain car: action must be -1, 0 or 1");
  MountainCarState next;
  next.velocity = std::clamp(state.velocity + 0.001 * action - 0.0025 * std::cos(3.0 * state.position),
                             -mountain_car::max_speed, mountain_car::max_speed);
  next.position = std::clamp(state.position + next.velocity, mountain_car::min_position, mountain_car::max_position);
  if (next.position == mountain_car::min_position && next.velocity < 0.0) next.velocity = 0.0;
  return next;
}

CancerState cancer_step(const CancerState& state, double dosage, const NoiseSpec& noise, Rng& rng,
                        const HazardModel& hazard, int horizon) {
  if (!state.alive) throw std::logic_error("cancer: cannot step a dead patient");
  if (state.month >= horizon) throw std::logic_error("cancer: treatment horizon already reached");
  if (!(dosage >= 0.0 && dosage <= 1.0)) throw std::invalid_argument("cancer: dosage must lie in [0, 1]");

  double tumor_noise = 0.0;
  double toxicity_noise = 0.0;
  if (noise.sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, noise.sigma);
    tumor_noise = normal(rng);
    toxicity_noise = noise.sharing == NoiseSharing::shared ? tumor_noise : normal(rng);
  }

  const double indicator = state.tumor > 0.0 ? 1.0 : 0.0;
  CancerState next;
  next.tumor = state.tumor + 0.15 * std::max(state.toxicity, cancer::initial_toxicity) -
               1.2 * (dosage - 0.5) * indicator + tumor_noise;
  next.toxicity = state.toxicity + 0.1 * std::max(state.tumor, cancer::initial_tumor) + 1.2 * (dosage - 0.5) +
                  toxicity_noise;
  next.tumor = std::max(0.0, next.tumor);
  next.toxicity = std::max(0.0, next.toxicity);
  next.month = state.month + 1;
  if (hazard.enabled) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    next.alive = uniform(rng) >= hazard.death_probability(next.tumor, next.toxicity);
  }
  return next;
}

Eigen::VectorXd observation(const EnvironmentConfig& config, const Eigen::Vector2d& state) {
  Eigen::VectorXd obs(2);
  if (config.environment == Environment::mountain_car) {
    obs[0] = 2.0 * (state[0] - mountain_car::min_position) /
                 (mountain_car::max_position - mountain_car::min_position) -
             1.0;
    obs[1] = state[1] / mountain_car::max_speed;
  } else {
    obs[0] = 2.0 * state[0] / config.cancer_state_bound - 1.0;
    obs[1] = 2.0 * state[1] / config.cancer_state_bound - 1.0;
  }
  return obs;
}

double act(const EnvironmentConfig& config, const ParametricPolicy& policy, const Eigen::Vector2d& state) {
  const double y = forward(policy, observation(config, state))[0];
  return config.environment == Environment::mountain_car ? static_cast<double>(discrete_action(y))
                                                         : dosage_action(y);
}

Trajectory rollout(const EnvironmentConfig& config, const ParametricPolicy& policy, std::uint64_t seed) {
  if (config.horizon <= 0) throw std::invalid_argument("rollout: horizon must be positive");
  Trajectory traj;
  traj.environment = config.environment;
  traj.seed = seed;
  traj.reason = TerminalReason::horizon;
  traj.states.reserve(static_cast<std::size_t>(config.horizon) + 1);
  traj.actions.reserve(static_cast<std::size_t>(config.horizon));

  if (config.environment == Environment::mountain_car) {
    MountainCarState s;
    traj.states.emplace_back(s.position, s.velocity);
    for (int k = 0; k < config.horizon; ++k) {
      const int a = static_cast<int>(act(config, policy, traj.states.back()));
      s = mc_step(s, a);
      traj.actions.push_back(a);
      traj.states.emplace_back(s.position, s.velocity);
      if (s.position >= mountain_car::goal_position) {
        traj.reason = TerminalReason::goal_reached;
        break;
      }
    }
  } else {
    Rng rng(seed);
    CancerState s;
    traj.states.emplace_back(s.tumor, s.toxicity);
    for (int k = 0; k < config.horizon; ++k) {
      const double a = act(config, policy, traj.states.back());
      s = cancer_step(s, a, config.noise, rng, config.hazard, config.horizon);
      traj.actions.push_back(a);
      traj.states.emplace_back(s.tumor, s.toxicity);
      if (!s.alive) {
        traj.reason = TerminalReason::death;
        break;
      }
    }
  }
  return traj;
}

Eigen::Index sensorimotor_dimension(Environment env) { return env == Environment::mountain_car ? 3 : 4; }

std::vector<Eigen::VectorXd> sensorimotor_points(const EnvironmentConfig& config, const Trajectory& trajectory) {
  if (trajectory.environment != config.environment) {
    throw EnvironmentMismatch("sensorimotor_points: trajectory from " + to_string(trajectory.environment) +
                              " featurized with " + to_string(config.environment) + " settings");
  }
  std::vector<Eigen::VectorXd> points;
  points.reserve(trajectory.actions.size());
  const auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  if (config.environment == Environment::mountain_car) {
    for (std::size_t k = 0; k < trajectory.actions.size(); ++k) {
      const Eigen::Vector2d& s = trajectory.states[k];
      Eigen::VectorXd p(3);
      p << unit((s[0] - mountain_car::min_position) / (mountain_car::max_position - mountain_car::min_position)),
          unit((s[1] + mountain_car::max_speed) / (2.0 * mountain_car::max_speed)),
          unit((trajectory.actions[k] + 1.0) / 2.0);
      points.push_back(std::move(p));
    }
  } else {
    for (std::size_t k = 0; k < trajectory.actions.size(); ++k) {
      const Eigen::Vector2d& s = trajectory.states[k];
      Eigen::VectorXd p(4);
      p << unit(s[0] / config.cancer_state_bound), unit(s[1] / config.cancer_state_bound),
          unit(trajectory.actions[k]), 0.0;
      points.push_back(std::move(p));
    }
    if (trajectory.reason == TerminalReason::death) {
      Eigen::VectorXd death = Eigen::VectorXd::Zero(4);
      death[3] = 1.0;
      const auto lived = trajectory.actions.size();
      const auto horizon = static_cast<std::size_t>(std::max(config.horizon, 0));
      for (std::size_t k = lived; k < std::max(horizon, lived + 1); ++k) points.push_back(death);
    }
  }
  return points;
}

double mc_trajectory_score(const Trajectory& trajectory, const EnvironmentConfig& config) {
  if (trajectory.environment != Environment::mountain_car) {
    throw EnvironmentMismatch("mc_trajectory_score: not a mountain car trajectory");
  }
  if (trajectory.reason == TerminalReason::goal_reached) return static_cast<double>(trajectory.length());
  double highest = mountain_car::min_position;
  for (const auto& s : trajectory.states) highest = std::max(highest, s[0]);
  return static_cast<double>(config.horizon) + (mountain_car::goal_position - highest) * config.miss_scale;
}

double cancer_trajectory_score(const Trajectory& trajectory, const EnvironmentConfig& config) {
  if (trajectory.environment != Environment::cancer) {
    throw EnvironmentMismatch("cancer_trajectory_score: not a cancer trajectory");
  }
  const Eigen::Vector2d& last = trajectory.states.back();
  const double score = last[0] + last[1];
  return trajectory.reason == TerminalReason::death ? score + config.death_penalty : score;
}

double trajectory_score(const Trajectory& trajectory, const EnvironmentConfig& config) {
  return config.environment == Environment::mountain_car ? mc_trajectory_score(trajectory, config)
                                                         : cancer_trajectory_score(trajectory, config);
}

bool emulated_prefer(const Trajectory& candidate, const Trajectory& incumbent, const EnvironmentConfig& config) {
  if (candidate.environment != incumbent.environment || candidate.environment != config.environment) {
    throw EnvironmentMismatch("emulated_prefer: trajectories from different environments");
  }
  return trajectory_score(candidate, config) < trajectory_score(incumbent, config);
}

}  // namespace april
