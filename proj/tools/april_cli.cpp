#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "april/experiment.hpp"
#include "april/session.hpp"

namespace {

april::json read_config(const std::string& path) {
  if (path.empty()) return april::json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  return april::json::parse(in);
}

template <typename T>
void override_if(const CLI::Option* opt, april::json& j, const char* key, const T& value) {
  if (opt->count() > 0) j[key] = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"APRIL preference-based policy learning workbench"};
  app.require_subcommand(1);

  // synthetic
  auto* syn = app.add_subcommand("synthetic", "active-ranking study on the simplex");
  std::string syn_config;
  std::vector<int> dims;
  std::vector<std::string> criteria;
  int syn_iterations = 0, syn_runs = 0, syn_candidates = 0, syn_threads = 0;
  long long syn_samples = 0;
  std::uint64_t syn_seed = 0;
  std::string syn_out;
  syn->add_option("--config", syn_config, "JSON config file");
  auto* o_dims = syn->add_option("--dims", dims, "dimensions")->delimiter(',');
  auto* o_crit = syn->add_option("--criteria", criteria, "aeus, eus_mc, random, max_coord")->delimiter(',');
  auto* o_si = syn->add_option("--iterations", syn_iterations);
  auto* o_sr = syn->add_option("--runs", syn_runs);
  auto* o_sc = syn->add_option("--candidates", syn_candidates);
  auto* o_ss = syn->add_option("--seed", syn_seed);
  auto* o_so = syn->add_option("--out", syn_out, "output directory");
  auto* o_se = syn->add_option("--eus-samples", syn_samples);
  auto* o_st = syn->add_option("--threads", syn_threads);

  // run
  auto* run = app.add_subcommand("run", "benchmark runs with the emulated expert");
  std::string run_config, method, env, out;
  double noise = 0.0, C = 0.0, epsilon = 0.0;
  int iterations = 0, runs = 0, lambda = 0, rollouts = 0, threads = 0;
  std::uint64_t seed = 0;
  bool hazard = false;
  run->add_option("--config", run_config, "JSON config file");
  auto* o_m = run->add_option("--method", method, "april, irl or es");
  auto* o_e = run->add_option("--env", env, "mountain_car or cancer");
  auto* o_n = run->add_option("--noise", noise, "transition noise sigma");
  auto* o_h = run->add_flag("--hazard", hazard, "enable the cancer death hazard");
  auto* o_i = run->add_option("--iterations", iterations);
  auto* o_r = run->add_option("--runs", runs);
  auto* o_l = run->add_option("--lambda", lambda);
  auto* o_c = run->add_option("-C,--C", C, "ranking SVM cost");
  auto* o_eps = run->add_option("--epsilon", epsilon, "cluster radius");
  auto* o_ro = run->add_option("--rollouts", rollouts, "estimation rollouts per candidate");
  auto* o_s = run->add_option("--seed", seed);
  auto* o_o = run->add_option("--out", out, "output directory");
  auto* o_t = run->add_option("--threads", threads);

  // export-plots
  auto* plots = app.add_subcommand("export-plots", "figure JSON from summary CSVs");
  std::vector<std::string> inputs;
  std::string figure_out;
  plots->add_option("inputs", inputs, "summary.csv or synthetic_summary.csv files")->required();
  plots->add_option("--out", figure_out, "figure JSON path")->required();

  // serve
  auto* srv = app.add_subcommand("serve", "session API for a human expert");
  std::string srv_config, dir = "sessions", host = "127.0.0.1";
  int port = 8080;
  srv->add_option("--config", srv_config, "JSON loop config applied to new sessions");
  srv->add_option("--dir", dir, "checkpoint directory");
  srv->add_option("--host", host);
  srv->add_option("--port", port);

  // replay
  auto* rep = app.add_subcommand("replay", "rebuild an APRIL run from its log and compare archives");
  std::string log;
  rep->add_option("log", log, "run_NNN.ndjson")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (syn->parsed()) {
      april::json j = read_config(syn_config);
      override_if(o_dims, j, "dimensions", dims);
      override_if(o_crit, j, "criteria", criteria);
      override_if(o_si, j, "iterations", syn_iterations);
      override_if(o_sr, j, "runs", syn_runs);
      override_if(o_sc, j, "candidates", syn_candidates);
      override_if(o_ss, j, "seed", syn_seed);
      override_if(o_so, j, "output_dir", syn_out);
      override_if(o_se, j, "eus_samples", syn_samples);
      override_if(o_st, j, "threads", syn_threads);
      const auto config = april::synthetic_config_from_json(j);
      for (const auto& path : april::cmd_synthetic(config)) std::cout << path.string() << "\n";
    } else if (run->parsed()) {
      april::json j = read_config(run_config);
      override_if(o_m, j, "method", method);
      override_if(o_e, j, "environment", env);
      override_if(o_n, j, "noise_sigma", noise);
      if (o_h->count() > 0) j["hazard"]["enabled"] = hazard;
      override_if(o_i, j, "iterations", iterations);
      override_if(o_r, j, "runs", runs);
      override_if(o_l, j, "lambda", lambda);
      override_if(o_c, j, "C", C);
      override_if(o_eps, j, "cluster_radius", epsilon);
      override_if(o_ro, j, "n_rollouts", rollouts);
      override_if(o_s, j, "seed", seed);
      override_if(o_o, j, "output_dir", out);
      override_if(o_t, j, "threads", threads);
      const auto config = april::experiment_config_from_json(j);
      april::cmd_run(config);
      std::cout << (config.output_dir / "summary.csv").string() << "\n";
    } else if (plots->parsed()) {
      std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
      april::cmd_export_plots(paths, figure_out);
      std::cout << figure_out << "\n";
    } else if (srv->parsed()) {
      const auto base = april::loop_config_from_json(read_config(srv_config));
      return april::serve(dir, base, host, port);
    } else if (rep->parsed()) {
      const bool ok = april::replay_matches(log);
      std::cout << (ok ? "replay matches" : "replay differs") << "\n";
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
