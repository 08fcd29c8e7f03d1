#include "april/loops.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <sstream>
#include <string>

#include "april/selection.hpp"

namespace april {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t iteration_key(int iteration) { return static_cast<std::uint64_t>(iteration); }

ParametricPolicy initial_policy(const LoopConfig& config, std::uint64_t seed) {
  Rng rng = stream_rng(seed, 0, Stream::initial_policy);
  return ParametricPolicy::random(config.shape, rng);
}

std::uint64_t rollout_seed(std::uint64_t seed, int iteration, Stream purpose, std::uint64_t index = 0) {
  return derive_seed(seed, iteration_key(iteration), static_cast<std::uint64_t>(purpose), index);
}

}  // namespace

LoopConfig LoopConfig::defaults(Environment env) {
  LoopConfig config;
  config.env = EnvironmentConfig::defaults(env);
  config.shape = config.env.default_policy_shape();
  return config;
}

int LoopConfig::rollouts_per_candidate() const {
  if (n_rollouts > 0) return n_rollouts;
  return stochastic() ? 11 : 1;
}

bool EmulatedOracle::prefer(const Trajectory& candidate, const Trajectory& incumbent) {
  return emulated_prefer(candidate, incumbent, config_);
}

bool ScriptedOracle::prefer(const Trajectory&, const Trajectory&) {
  if (next_ >= verdicts_.size()) throw OracleExhausted("scripted oracle: no verdict left");
  return verdicts_[next_++];
}

// ---------------------------------------------------------------------------------------------
// APRIL

AprilState april_initialize(const LoopConfig& config, std::uint64_t seed) {
  ClusterBook book(config.env.cluster_radius, sensorimotor_dimension(config.env.environment));
  ParametricPolicy pi0 = initial_policy(config, seed);
  Trajectory traj = rollout(config.env, pi0, rollout_seed(seed, 0, Stream::demonstrate));
  BehaviorDescriptor u0 = featurize(book, config.env, traj);
  AprilState state{RankingArchive(std::move(u0)), {std::move(pi0)}, {std::move(traj)}, std::move(book),
                   StepSizeState{config.initial_sigma, config.sigma_factor}, 0, seed};
  return state;
}

Proposal april_propose(AprilState& state, const LoopConfig& config) {
  if (config.lambda < 1) throw std::invalid_argument("april: lambda must be at least 1");
  const int iteration = state.iteration + 1;
  const int rollouts = config.rollouts_per_candidate();
  const auto lambda = static_cast<std::size_t>(config.lambda);

  std::vector<ParametricPolicy> candidates;
  std::vector<std::vector<BehaviorDescriptor>> descriptors(lambda);
  candidates.reserve(lambda);
  for (std::size_t j = 0; j < lambda; ++j) {
    Rng rng = stream_rng(state.seed, iteration_key(iteration), Stream::perturb, j);
    candidates.push_back(perturb(state.incumbent_policy(), state.step.sigma, rng));
    for (int r = 0; r < rollouts; ++r) {
      const std::uint64_t index = j * static_cast<std::uint64_t>(rollouts) + static_cast<std::uint64_t>(r);
      const Trajectory traj =
          rollout(config.env, candidates.back(), rollout_seed(state.seed, iteration, Stream::estimate, index));
      descriptors[j].push_back(featurize(state.book, config.env, traj));
    }
  }

  const Eigen::Index dimension = state.book.size();
  const AeusScorer scorer(state.ranking, dimension, config.C, config.solver);
  std::vector<double> scores(lambda, 0.0);
  std::vector<bool> informative(lambda, false);
  for (std::size_t j = 0; j < lambda; ++j) {
    if (config.mean_descriptor) {
      BehaviorDescriptor mean = BehaviorDescriptor::Zero(dimension);
      for (const auto& u : descriptors[j]) mean += align(u, dimension);
      mean /= static_cast<double>(descriptors[j].size());
      bool degenerate = false;
      scores[j] = scorer.score(mean, &degenerate);
      informative[j] = !degenerate;
    } else {
      for (const auto& u : descriptors[j]) {
        bool degenerate = false;
        scores[j] += scorer.score(u, &degenerate);
        informative[j] = informative[j] || !degenerate;
      }
      scores[j] /= static_cast<double>(descriptors[j].size());
    }
  }

  std::size_t pick = 0;
  bool have = false;
  for (std::size_t j = 0; j < lambda; ++j) {
    if (!informative[j]) continue;
    if (!have || scores[j] > scores[pick]) {
      pick = j;
      have = true;
    }
  }

  Proposal proposal;
  proposal.iteration = iteration;
  proposal.candidate_index = pick;
  proposal.candidate_scores = scores;
  proposal.criterion = scores[pick];
  proposal.policy = std::move(candidates[pick]);
  proposal.trajectory = rollout(config.env, proposal.policy, rollout_seed(state.seed, iteration, Stream::demonstrate));
  proposal.descriptor = featurize(state.book, config.env, proposal.trajectory);
  return proposal;
}

IterationRecord april_apply(AprilState& state, const LoopConfig& config, Proposal proposal, bool candidate_wins) {
  if (proposal.iteration != state.iteration + 1) {
    throw std::invalid_argument("april: proposal does not belong to the next iteration");
  }
  IterationRecord record;
  record.iteration = proposal.iteration;
  record.candidate_won = candidate_wins;
  record.candidate_score = trajectory_score(proposal.trajectory, config.env);
  record.criterion = proposal.criterion;

  const std::size_t idx = state.ranking.record_comparison(std::move(proposal.descriptor), candidate_wins);
  state.policies.push_back(std::move(proposal.policy));
  state.trajectories.push_back(std::move(proposal.trajectory));
  state.step = adapt_sigma(state.step, candidate_wins);
  state.iteration = proposal.iteration;

  record.policy_id = idx;
  record.trajectory_id = idx;
  record.incumbent_score = trajectory_score(state.incumbent_trajectory(), config.env);
  record.sigma = state.step.sigma;
  record.dimension = state.book.size();
  return record;
}

IterationRecord april_iterate(AprilState& state, const LoopConfig& config, ExpertOracle& oracle) {
  const auto start = std::chrono::steady_clock::now();
  Proposal proposal = april_propose(state, config);
  const bool wins = oracle.prefer(proposal.trajectory, state.incumbent_trajectory());
  IterationRecord record = april_apply(state, config, std::move(proposal), wins);
  record.wall_ms = elapsed_ms(start);
  return record;
}

// ---------------------------------------------------------------------------------------------
// (1+lambda)-ES

EsState es_initialize(const LoopConfig& config, std::uint64_t seed) {
  EsState state;
  state.best = initial_policy(config, seed);
  state.best_trajectory = rollout(config.env, state.best, rollout_seed(seed, 0, Stream::demonstrate));
  state.step = StepSizeState{config.initial_sigma, config.sigma_factor};
  state.seed = seed;
  state.demonstrations = 0;
  return state;
}

std::vector<IterationRecord> es_iterate(EsState& state, const LoopConfig& config, ExpertOracle& oracle) {
  if (config.lambda < 1) throw std::invalid_argument("es: lambda must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  const int generation = state.generation + 1;
  const auto lambda = static_cast<std::size_t>(config.lambda);

  std::vector<ParametricPolicy> offspring;
  std::vector<Trajectory> demos;
  std::vector<IterationRecord> records;
  std::size_t champion = 0;
  for (std::size_t j = 0; j < lambda; ++j) {
    Rng rng = stream_rng(state.seed, iteration_key(generation), Stream::perturb, j);
    offspring.push_back(perturb(state.best, state.step.sigma, rng));
    demos.push_back(rollout(config.env, offspring.back(), rollout_seed(state.seed, generation, Stream::demonstrate, j)));
    if (j > 0 && oracle.prefer(demos[j], demos[champion])) champion = j;
    IterationRecord record;
    record.iteration = static_cast<int>(state.demonstrations + j + 1);
    record.policy_id = record.trajectory_id = j;
    record.candidate_score = trajectory_score(demos[j], config.env);
    records.push_back(record);
  }
  const bool improved = oracle.prefer(demos[champion], state.best_trajectory);
  const Trajectory previous = state.best_trajectory;
  if (improved) {
    state.best = std::move(offspring[champion]);
    state.best_trajectory = std::move(demos[champion]);
  }
  state.step = adapt_sigma(state.step, improved);
  state.generation = generation;
  state.demonstrations += lambda;

  // The incumbent only changes once the whole generation has been shown.
  const double before = trajectory_score(previous, config.env);
  const double after = trajectory_score(state.best_trajectory, config.env);
  const double wall = elapsed_ms(start);
  for (std::size_t j = 0; j < lambda; ++j) {
    records[j].candidate_won = improved && j == champion;
    records[j].incumbent_score = j + 1 == lambda ? after : before;
    records[j].sigma = state.step.sigma;
    records[j].wall_ms = wall / static_cast<double>(lambda);
  }
  return records;
}

// ---------------------------------------------------------------------------------------------
// IRL projection

double IrlState::distance() const {
  const Eigen::Index d = std::max(expert.size(), projection.size());
  return (align(expert, d) - align(projection, d)).norm();
}

double IrlState::best_score() const {
  return scores.empty() ? std::numeric_limits<double>::infinity() : *std::min_element(scores.begin(), scores.end());
}

IrlState irl_initialize(const LoopConfig& config, const Trajectory& expert_demo, std::uint64_t seed) {
  ClusterBook book(config.env.cluster_radius, sensorimotor_dimension(config.env.environment));
  BehaviorDescriptor expert = featurize(book, config.env, expert_demo);
  ParametricPolicy pi0 = initial_policy(config, seed);
  const Trajectory traj = rollout(config.env, pi0, rollout_seed(seed, 0, Stream::demonstrate));
  BehaviorDescriptor u0 = featurize(book, config.env, traj);

  IrlState state{std::move(expert), u0, {}, {std::move(pi0)}, {u0}, {trajectory_score(traj, config.env)},
                 std::move(book), 0, false, seed};
  const Eigen::Index d = state.book.size();
  state.reward = align(state.expert, d) - align(state.projection, d);
  return state;
}

bool projection_update(BehaviorDescriptor& projection, const BehaviorDescriptor& expert,
                       const BehaviorDescriptor& fresh) {
  const Eigen::Index d = std::max({projection.size(), expert.size(), fresh.size()});
  const Eigen::VectorXd bar = align(projection, d);
  const Eigen::VectorXd step = align(fresh, d) - bar;
  const double denom = step.squaredNorm();
  if (denom == 0.0) {
    projection = bar;
    return false;
  }
  projection = bar + (step.dot(align(expert, d) - bar) / denom) * step;
  return true;
}

IterationRecord irl_projection_iterate(IrlState& state, const LoopConfig& config, int generations) {
  if (generations < 0) throw std::invalid_argument("irl: negative optimizer budget");
  const auto start = std::chrono::steady_clock::now();
  const int iteration = state.iteration + 1;
  {
    const Eigen::Index d = state.book.size();
    state.reward = align(state.expert, d) - align(state.projection, d);
  }
  const BehaviorDescriptor reward = state.reward;
  const auto value = [&](const BehaviorDescriptor& u) {
    return reward.head(std::min(reward.size(), u.size())).dot(u.head(std::min(reward.size(), u.size())));
  };

  // Inner (1+lambda)-ES on the linear reward, restarted from the initial policy.
  ParametricPolicy best = state.policies.front();
  Trajectory best_traj = rollout(config.env, best, rollout_seed(state.seed, iteration, Stream::inner_search, 0));
  BehaviorDescriptor best_u = featurize(state.book, config.env, best_traj);
  double best_value = value(best_u);
  StepSizeState step{config.initial_sigma, config.sigma_factor};
  std::uint64_t counter = 1;
  for (int g = 1; g <= generations; ++g) {
    std::size_t champion = 0;
    double champion_value = -std::numeric_limits<double>::infinity();
    std::vector<ParametricPolicy> offspring;
    std::vector<Trajectory> trajs;
    std::vector<BehaviorDescriptor> us;
    for (int j = 0; j < config.lambda; ++j) {
      Rng rng = stream_rng(state.seed, iteration_key(iteration),
                           Stream::inner_search, derive_seed(static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(j)));
      offspring.push_back(perturb(best, step.sigma, rng));
      trajs.push_back(rollout(config.env, offspring.back(), rollout_seed(state.seed, iteration, Stream::inner_search, counter++)));
      us.push_back(featurize(state.book, config.env, trajs.back()));
      const double v = value(us.back());
      if (v > champion_value) {
        champion_value = v;
        champion = static_cast<std::size_t>(j);
      }
    }
    const bool improved = champion_value > best_value;
    if (improved) {
      best = std::move(offspring[champion]);
      best_traj = std::move(trajs[champion]);
      best_u = std::move(us[champion]);
      best_value = champion_value;
    }
    step = adapt_sigma(step, improved);
  }

  state.stagnated = !projection_update(state.projection, state.expert, best_u);
  state.policies.push_back(best);
  state.descriptors.push_back(best_u);
  state.scores.push_back(trajectory_score(best_traj, config.env));
  state.iteration = iteration;
  {
    const Eigen::Index d = state.book.size();
    state.reward = align(state.expert, d) - align(state.projection, d);
  }

  IterationRecord record;
  record.iteration = iteration;
  record.policy_id = record.trajectory_id = state.policies.size() - 1;
  record.candidate_won = state.scores.back() <= state.best_score();
  record.candidate_score = state.scores.back();
  record.incumbent_score = state.best_score();
  record.dimension = state.book.size();
  record.criterion = state.distance();
  record.wall_ms = elapsed_ms(start);
  return record;
}

Trajectory make_expert_demo(const LoopConfig& config, std::uint64_t seed) {
  static std::mutex mutex;
  static std::map<std::string, Trajectory> cache;
  std::ostringstream key;
  key << std::hexfloat << seed << ' ' << static_cast<int>(config.env.environment) << ' ' << config.env.horizon << ' '
      << config.env.noise.sigma << ' ' << static_cast<int>(config.env.noise.sharing) << ' ' << config.env.hazard.enabled
      << ' ' << config.env.hazard.c0 << ' ' << config.env.hazard.c1 << ' ' << config.env.hazard.c2 << ' '
      << config.env.death_penalty << ' ' << config.env.miss_scale << ' ' << config.env.cancer_state_bound << ' '
      << config.shape.inputs << ' ' << config.shape.hidden << ' ' << config.shape.outputs << ' ' << config.lambda
      << ' ' << config.initial_sigma << ' ' << config.sigma_factor << ' ' << config.expert_generations;
  {
    const std::lock_guard lock(mutex);
    if (const auto it = cache.find(key.str()); it != cache.end()) return it->second;
  }

  const std::uint64_t demo_seed = derive_seed(seed, 0, static_cast<std::uint64_t>(Stream::expert_demo));
  Rng init = stream_rng(demo_seed, 0, Stream::initial_policy);
  ParametricPolicy best = ParametricPolicy::random(config.shape, init);
  Trajectory best_traj = rollout(config.env, best, rollout_seed(demo_seed, 0, Stream::expert_demo));
  double best_score = trajectory_score(best_traj, config.env);
  StepSizeState step{config.initial_sigma, config.sigma_factor};
  for (int g = 1; g <= config.expert_generations; ++g) {
    bool improved = false;
    ParametricPolicy gen_best;
    Trajectory gen_traj;
    double gen_score = std::numeric_limits<double>::infinity();
    for (int j = 0; j < config.lambda; ++j) {
      Rng rng = stream_rng(demo_seed, iteration_key(g), Stream::perturb, static_cast<std::uint64_t>(j));
      ParametricPolicy child = perturb(best, step.sigma, rng);
      Trajectory traj = rollout(config.env, child, rollout_seed(demo_seed, g, Stream::expert_demo, static_cast<std::uint64_t>(j)));
      const double s = trajectory_score(traj, config.env);
      if (s < gen_score) {
        gen_score = s;
        gen_best = std::move(child);
        gen_traj = std::move(traj);
      }
    }
    if (gen_score < best_score) {
      best = std::move(gen_best);
      best_traj = std::move(gen_traj);
      best_score = gen_score;
      improved = true;
    }
    step = adapt_sigma(step, improved);
  }

  const std::lock_guard lock(mutex);
  cache.emplace(key.str(), best_traj);
  return best_traj;
}

}  // namespace april
