#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "april/experiment.hpp"

using namespace april;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("april_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small(Method method, Environment env, const fs::path& out) {
  ExperimentConfig c;
  c.method = method;
  c.loop = LoopConfig::defaults(env);
  c.loop.lambda = 3;
  c.loop.irl_generations = 3;
  c.loop.expert_generations = 5;
  c.n_runs = 3;
  c.n_iterations = 5;
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("es run writes one log per run and one summary row per iteration") {
  const fs::path out = scratch("es");
  const auto c = small(Method::es, Environment::mountain_car, out);
  const auto runs = cmd_run(c);
  CHECK(runs.size() == 3);
  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03d.ndjson", i);
    CHECK(fs::exists(out / "runs" / name));
  }
  CHECK(count_lines(out / "summary.csv") == 6);
  CHECK(count_lines(out / "scores.csv") == 16);
  CHECK(fs::exists(out / "config.json"));
  fs::remove_all(out);
}

TEST_CASE("reruns are byte identical, whatever the thread count") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  auto c = small(Method::april, Environment::cancer, a);
  cmd_run(c);
  c.output_dir = b;
  c.threads = 2;
  cmd_run(c);
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(slurp(a / "scores.csv") == slurp(b / "scores.csv"));
  CHECK(replay_matches(a / "runs" / "run_001.ndjson"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("configuration hash covers the noise level") {
  auto c = small(Method::april, Environment::cancer, "x");
  const std::string h0 = config_hash(c);
  c.loop.env.noise.sigma = 0.2;
  CHECK(config_hash(c) != h0);
  c.output_dir = "elsewhere";
  c.threads = 4;
  const std::string h1 = config_hash(c);
  c.output_dir = "x";
  c.threads = 1;
  CHECK(config_hash(c) == h1);
  CHECK(h1.size() == 16);
  CHECK(to_json(c)["noise_sigma"] == 0.2);
}

TEST_CASE("experiment configuration from json") {
  const auto c = experiment_config_from_json(
      json{{"method", "irl"}, {"environment", "cancer"}, {"runs", 4}, {"iterations", 7}, {"noise_sigma", 0.1}});
  CHECK(c.method == Method::irl);
  CHECK(c.n_runs == 4);
  CHECK(c.n_iterations == 7);
  CHECK(c.loop.env.noise.sigma == 0.1);
  CHECK_THROWS(experiment_config_from_json(json{{"runz", 4}}));
  CHECK(parse_method("es") == Method::es);
}

TEST_CASE("irl run logs the projection distance") {
  const fs::path out = scratch("irl");
  const auto runs = cmd_run(small(Method::irl, Environment::cancer, out));
  for (const auto& r : runs) {
    REQUIRE(r.irl_distances.size() == 5);
    for (std::size_t i = 1; i < r.irl_distances.size(); ++i) CHECK(r.irl_distances[i] <= r.irl_distances[i - 1] + 1e-12);
  }
  fs::remove_all(out);
}

TEST_CASE("quantiles") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.25) == 1.75);
  CHECK(quantile({7}, 0.75) == 7);
}

TEST_CASE("synthetic command and plot export") {
  const fs::path out = scratch("syn");
  SyntheticConfig c;
  c.dimensions = {5, 10};
  c.criteria = {Criterion::random, Criterion::max_coord};
  c.iterations = 6;
  c.runs = 2;
  c.n_candidates = 50;
  c.output_dir = out;
  const auto files = cmd_synthetic(c);
  CHECK(files.size() == 5);
  CHECK(count_lines(out / "synthetic_random_d5.csv") == 13);
  const std::string first = slurp(out / "synthetic_max_coord_d10.csv");
  cmd_synthetic(c);
  CHECK(slurp(out / "synthetic_max_coord_d10.csv") == first);

  const json fig = export_plots({out / "synthetic_summary.csv"});
  CHECK(fig["schema_version"] == schema_version);
  CHECK(fig["figures"].size() == 2);
  CHECK(fig["figures"][0]["series"].size() == 2);
  fs::remove_all(out);
}

TEST_CASE("three run summaries make one figure with three series") {
  const fs::path base = scratch("plots");
  std::vector<fs::path> summaries;
  for (const auto m : {Method::april, Method::es, Method::irl}) {
    auto c = small(m, Environment::cancer, base / to_string(m));
    c.n_runs = 2;
    c.n_iterations = 3;
    cmd_run(c);
    summaries.push_back(c.output_dir / "summary.csv");
  }
  cmd_export_plots(summaries, base / "fig.json");
  std::ifstream in(base / "fig.json");
  const json fig = json::parse(in);
  REQUIRE(fig["figures"].size() == 1);
  CHECK(fig["figures"][0]["series"].size() == 3);
  CHECK(fig["figures"][0]["series"][0]["x"].size() == 3);

  CHECK_THROWS(cmd_export_plots({}, base / "empty.json"));
  CHECK_FALSE(fs::exists(base / "empty.json"));
  fs::remove_all(base);
}
