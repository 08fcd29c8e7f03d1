#include "april/serialization.hpp"

#include <set>

namespace april {

namespace {

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json stamped(json body) {
  body["schema_version"] = schema_version;
  return body;
}

std::string to_string(NoiseSharing sharing) { return sharing == NoiseSharing::shared ? "shared" : "independent"; }

NoiseSharing parse_sharing(const std::string& name) {
  if (name == "independent") return NoiseSharing::independent;
  if (name == "shared") return NoiseSharing::shared;
  throw SchemaError("config: noise_sharing must be 'independent' or 'shared'");
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void validate(const LoopConfig& c) {
  const auto fail = [](const std::string& what) { throw SchemaError("config: " + what); };
  if (c.env.horizon <= 0) fail("horizon must be positive");
  if (c.env.noise.sigma < 0.0) fail("noise_sigma must be nonnegative");
  if (!(c.env.cluster_radius > 0.0)) fail("cluster_radius must be positive");
  if (!(c.env.cancer_state_bound > 0.0)) fail("cancer_state_bound must be positive");
  if (!(c.C > 0.0)) fail("C must be positive");
  if (c.lambda < 1) fail("lambda must be at least 1");
  if (c.n_rollouts < 0) fail("n_rollouts must be nonnegative");
  if (!(c.initial_sigma > 0.0)) fail("initial_sigma must be positive");
  if (!(c.sigma_factor > 1.0)) fail("sigma_factor must exceed 1");
  if (c.irl_generations < 0 || c.expert_generations < 0) fail("generation budgets must be nonnegative");
  if (c.shape.inputs != 2 || c.shape.outputs != 1) fail("policy shape must have 2 inputs and 1 output");
  if (c.shape.hidden < 1) fail("hidden layer must have at least one unit");
  if (!(c.solver.tolerance > 0.0) || c.solver.max_iterations < 1) fail("invalid solver options");
}

}  // namespace

void check_schema(const json& j, const std::string& what) {
  if (!j.is_object()) throw SchemaError(what + ": expected a JSON object");
  if (!j.contains("schema_version")) throw SchemaError(what + ": missing schema_version");
  if (j.at("schema_version").get<int>() != schema_version) {
    throw SchemaError(what + ": unsupported schema_version " + j.at("schema_version").dump());
  }
}

json to_json(const Trajectory& t) {
  json states = json::array();
  for (const auto& s : t.states) states.push_back({s[0], s[1]});
  return stamped({{"environment", to_string(t.environment)},
                  {"states", std::move(states)},
                  {"actions", t.actions},
                  {"terminal_reason", to_string(t.reason)},
                  {"seed", t.seed},
                  {"length", t.length()}});
}

Trajectory trajectory_from_json(const json& j) {
  check_schema(j, "trajectory");
  Trajectory t;
  t.environment = parse_environment(j.at("environment").get<std::string>());
  for (const auto& s : j.at("states")) {
    if (s.size() != 2) throw SchemaError("trajectory: every state has two components");
    t.states.emplace_back(s[0].get<double>(), s[1].get<double>());
  }
  t.actions = j.at("actions").get<std::vector<double>>();
  t.reason = parse_terminal_reason(j.at("terminal_reason").get<std::string>());
  t.seed = j.at("seed").get<std::uint64_t>();
  if (t.states.size() != t.actions.size() + 1) throw SchemaError("trajectory: need one more state than actions");
  return t;
}

json to_json(const ParametricPolicy& p) {
  return stamped({{"shape", {{"inputs", p.shape.inputs}, {"hidden", p.shape.hidden}, {"outputs", p.shape.outputs}}},
                  {"weights", vector_json(p.weights)}});
}

ParametricPolicy policy_from_json(const json& j) {
  check_schema(j, "policy");
  const json& s = j.at("shape");
  const PolicyShape shape{s.at("inputs").get<int>(), s.at("hidden").get<int>(), s.at("outputs").get<int>()};
  return ParametricPolicy(shape, vector_from(j.at("weights")));
}

json to_json(const ClusterBook& book) {
  json centroids = json::array();
  for (const auto& c : book.centroids()) centroids.push_back(vector_json(c));
  return stamped(
      {{"radius", book.radius()}, {"point_dimension", book.point_dimension()}, {"centroids", std::move(centroids)}});
}

ClusterBook cluster_book_from_json(const json& j) {
  check_schema(j, "cluster book");
  std::vector<Eigen::VectorXd> centroids;
  for (const auto& c : j.at("centroids")) centroids.push_back(vector_from(c));
  return ClusterBook::from_centroids(j.at("radius").get<double>(), j.at("point_dimension").get<Eigen::Index>(),
                                     centroids);
}

json to_json(const RankingArchive& a) {
  json descriptors = json::array();
  for (const auto& u : a.descriptors()) descriptors.push_back(vector_json(u));
  json constraints = json::array();
  for (const auto& c : a.constraints()) constraints.push_back({{"loser", c.loser}, {"winner", c.winner}});
  return stamped(
      {{"descriptors", std::move(descriptors)}, {"constraints", std::move(constraints)}, {"incumbent", a.incumbent()}});
}

RankingArchive archive_from_json(const json& j) {
  check_schema(j, "archive");
  const json& descriptors = j.at("descriptors");
  if (descriptors.empty()) throw SchemaError("archive: at least one descriptor required");
  RankingArchive a(vector_from(descriptors.at(0)));
  for (std::size_t i = 1; i < descriptors.size(); ++i) a.add(vector_from(descriptors[i]));
  for (const auto& c : j.at("constraints")) {
    a.add_constraint(c.at("loser").get<std::size_t>(), c.at("winner").get<std::size_t>());
  }
  a.set_incumbent(j.at("incumbent").get<std::size_t>());
  return a;
}

json to_json(const EnvironmentConfig& c) {
  return {{"environment", to_string(c.environment)},
          {"horizon", c.horizon},
          {"noise_sigma", c.noise.sigma},
          {"noise_sharing", to_string(c.noise.sharing)},
          {"hazard", {{"enabled", c.hazard.enabled}, {"c0", c.hazard.c0}, {"c1", c.hazard.c1}, {"c2", c.hazard.c2}}},
          {"death_penalty", c.death_penalty},
          {"miss_scale", c.miss_scale},
          {"cancer_state_bound", c.cancer_state_bound},
          {"cluster_radius", c.cluster_radius}};
}

json to_json(const LoopConfig& c) {
  json j = to_json(c.env);
  j["shape"] = {{"inputs", c.shape.inputs}, {"hidden", c.shape.hidden}, {"outputs", c.shape.outputs}};
  j["C"] = c.C;
  j["lambda"] = c.lambda;
  j["n_rollouts"] = c.n_rollouts;
  j["mean_descriptor"] = c.mean_descriptor;
  j["initial_sigma"] = c.initial_sigma;
  j["sigma_factor"] = c.sigma_factor;
  j["irl_generations"] = c.irl_generations;
  j["expert_generations"] = c.expert_generations;
  j["solver"] = {{"tolerance", c.solver.tolerance}, {"max_iterations", c.solver.max_iterations}};
  return j;
}

LoopConfig loop_config_from_json(const json& j, LoopConfig c) {
  if (!j.is_object()) throw SchemaError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "environment",   "horizon",         "noise_sigma",     "noise_sharing",      "hazard",
      "death_penalty", "miss_scale",      "cancer_state_bound", "cluster_radius", "shape",
      "C",             "lambda",          "n_rollouts",      "mean_descriptor",    "initial_sigma",
      "sigma_factor",  "irl_generations", "expert_generations", "solver",          "schema_version"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw SchemaError("config: unknown key '" + key + "'");
  }
  try {
    if (j.contains("environment")) {
      const Environment env = parse_environment(j.at("environment").get<std::string>());
      if (env != c.env.environment) c = LoopConfig::defaults(env);
    }
    take(j, "horizon", c.env.horizon);
    take(j, "noise_sigma", c.env.noise.sigma);
    if (j.contains("noise_sharing")) c.env.noise.sharing = parse_sharing(j.at("noise_sharing").get<std::string>());
    if (j.contains("hazard")) {
      const json& h = j.at("hazard");
      take(h, "enabled", c.env.hazard.enabled);
      take(h, "c0", c.env.hazard.c0);
      take(h, "c1", c.env.hazard.c1);
      take(h, "c2", c.env.hazard.c2);
    }
    take(j, "death_penalty", c.env.death_penalty);
    take(j, "miss_scale", c.env.miss_scale);
    take(j, "cancer_state_bound", c.env.cancer_state_bound);
    take(j, "cluster_radius", c.env.cluster_radius);
    if (j.contains("shape")) {
      const json& s = j.at("shape");
      take(s, "inputs", c.shape.inputs);
      take(s, "hidden", c.shape.hidden);
      take(s, "outputs", c.shape.outputs);
    }
    take(j, "C", c.C);
    take(j, "lambda", c.lambda);
    take(j, "n_rollouts", c.n_rollouts);
    take(j, "mean_descriptor", c.mean_descriptor);
    take(j, "initial_sigma", c.initial_sigma);
    take(j, "sigma_factor", c.sigma_factor);
    take(j, "irl_generations", c.irl_generations);
    take(j, "expert_generations", c.expert_generations);
    if (j.contains("solver")) {
      take(j.at("solver"), "tolerance", c.solver.tolerance);
      take(j.at("solver"), "max_iterations", c.solver.max_iterations);
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

LoopConfig loop_config_from_json(const json& j) {
  Environment env = Environment::mountain_car;
  if (j.is_object() && j.contains("environment")) {
    try {
      env = parse_environment(j.at("environment").get<std::string>());
    } catch (const std::exception& e) {
      throw SchemaError(std::string("config: ") + e.what());
    }
  }
  return loop_config_from_json(j, LoopConfig::defaults(env));
}

json to_json(const IterationRecord& r) {
  return stamped({{"iteration", r.iteration},
                  {"policy_id", r.policy_id},
                  {"trajectory_id", r.trajectory_id},
                  {"candidate_won", r.candidate_won},
                  {"candidate_score", r.candidate_score},
                  {"incumbent_score", r.incumbent_score},
                  {"sigma", r.sigma},
                  {"dimension", r.dimension},
                  {"criterion", r.criterion},
                  {"wall_ms", r.wall_ms}});
}

IterationRecord iteration_record_from_json(const json& j) {
  check_schema(j, "iteration record");
  IterationRecord r;
  r.iteration = j.at("iteration").get<int>();
  r.policy_id = j.at("policy_id").get<std::size_t>();
  r.trajectory_id = j.at("trajectory_id").get<std::size_t>();
  r.candidate_won = j.at("candidate_won").get<bool>();
  r.candidate_score = j.at("candidate_score").get<double>();
  r.incumbent_score = j.at("incumbent_score").get<double>();
  r.sigma = j.at("sigma").get<double>();
  r.dimension = j.at("dimension").get<Eigen::Index>();
  r.criterion = j.at("criterion").get<double>();
  r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

json to_json(const AprilState& s) {
  json policies = json::array();
  for (const auto& p : s.policies) policies.push_back(to_json(p));
  json trajectories = json::array();
  for (const auto& t : s.trajectories) trajectories.push_back(to_json(t));
  return stamped({{"seed", s.seed},
                  {"iteration", s.iteration},
                  {"step", {{"sigma", s.step.sigma}, {"c", s.step.c}}},
                  {"book", to_json(s.book)},
                  {"archive", to_json(s.ranking)},
                  {"policies", std::move(policies)},
                  {"trajectories", std::move(trajectories)}});
}

AprilState april_state_from_json(const json& j) {
  check_schema(j, "april state");
  std::vector<ParametricPolicy> policies;
  for (const auto& p : j.at("policies")) policies.push_back(policy_from_json(p));
  std::vector<Trajectory> trajectories;
  for (const auto& t : j.at("trajectories")) trajectories.push_back(trajectory_from_json(t));
  RankingArchive archive = archive_from_json(j.at("archive"));
  if (policies.size() != archive.size() || trajectories.size() != archive.size()) {
    throw SchemaError("april state: archive, policies and trajectories differ in length");
  }
  AprilState s{std::move(archive),
               std::move(policies),
               std::move(trajectories),
               cluster_book_from_json(j.at("book")),
               StepSizeState{j.at("step").at("sigma").get<double>(), j.at("step").at("c").get<double>()},
               j.at("iteration").get<int>(),
               j.at("seed").get<std::uint64_t>()};
  return s;
}

}  // namespace april
