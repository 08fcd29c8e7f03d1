#include "april/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace april {

namespace fs = std::filesystem;

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

template <typename Job>
void parallel_for(int n, int threads, Job job) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::april:
      return "april";
    case Method::irl:
      return "irl";
    case Method::es:
      return "es";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "april") return Method::april;
  if (name == "irl") return Method::irl;
  if (name == "es") return Method::es;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

json to_json(const ExperimentConfig& c) {
  json j = to_json(c.loop);
  j["method"] = to_string(c.method);
  j["iterations"] = c.n_iterations;
  j["runs"] = c.n_runs;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.string();
  j["threads"] = c.threads;
  j["schema_version"] = schema_version;
  return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("config: expected a JSON object");
  ExperimentConfig c;
  json loop = j;
  try {
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("iterations")) c.n_iterations = j.at("iterations").get<int>();
    if (j.contains("runs")) c.n_runs = j.at("runs").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  for (const char* key : {"method", "iterations", "runs", "seed", "output_dir", "threads"}) loop.erase(key);
  c.loop = loop_config_from_json(loop);
  if (c.n_iterations < 1) throw SchemaError("config: iterations must be positive");
  if (c.n_runs < 1) throw SchemaError("config: runs must be positive");
  if (c.threads < 1) throw SchemaError("config: threads must be positive");
  return c;
}

std::string config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  j.erase("threads");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

RunResult run_one(const ExperimentConfig& config, int run_id) {
  RunResult result;
  result.run_id = run_id;
  result.seed = config.seed + static_cast<std::uint64_t>(run_id);
  const LoopConfig& loop = config.loop;
  EmulatedOracle oracle(loop.env);

  switch (config.method) {
    case Method::april: {
      AprilState state = april_initialize(loop, result.seed);
      for (int t = 0; t < config.n_iterations; ++t) {
        result.records.push_back(april_iterate(state, loop, oracle));
        result.best_scores.push_back(result.records.back().incumbent_score);
      }
      result.final_archive = to_json(state.ranking);
      break;
    }
    case Method::es: {
      EsState state = es_initialize(loop, result.seed);
      while (static_cast<int>(result.records.size()) < config.n_iterations) {
        for (auto& r : es_iterate(state, loop, oracle)) {
          if (static_cast<int>(result.records.size()) == config.n_iterations) break;
          result.best_scores.push_back(r.incumbent_score);
          result.records.push_back(std::move(r));
        }
      }
      break;
    }
    case Method::irl: {
      const Trajectory demo = make_expert_demo(loop, result.seed);
      IrlState state = irl_initialize(loop, demo, result.seed);
      for (int t = 0; t < config.n_iterations; ++t) {
        result.records.push_back(irl_projection_iterate(state, loop, loop.irl_generations));
        result.best_scores.push_back(result.records.back().incumbent_score);
        result.irl_distances.push_back(state.distance());
      }
      break;
    }
  }
  return result;
}

std::vector<RunResult> run_all(const ExperimentConfig& config) {
  std::vector<RunResult> runs(static_cast<std::size_t>(config.n_runs));
  parallel_for(config.n_runs, config.threads, [&](int i) { runs[static_cast<std::size_t>(i)] = run_one(config, i); });
  return runs;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<QuartileRow> summarize(const std::vector<RunResult>& runs) {
  std::vector<QuartileRow> rows;
  if (runs.empty()) return rows;
  const std::size_t n = runs.front().best_scores.size();
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> column;
    for (const auto& r : runs) column.push_back(r.best_scores.at(t));
    QuartileRow row;
    row.iteration = static_cast<int>(t) + 1;
    for (const double v : column) row.mean += v;
    row.mean /= static_cast<double>(column.size());
    row.median = quantile(column, 0.5);
    row.q1 = quantile(column, 0.25);
    row.q3 = quantile(column, 0.75);
    rows.push_back(row);
  }
  return rows;
}

std::vector<RunResult> cmd_run(const ExperimentConfig& config) {
  make_dirs(config.output_dir / "runs");
  const std::string hash = config_hash(config);
  {
    json j = to_json(config);
    j["config_hash"] = hash;
    open_out(config.output_dir / "config.json") << j.dump(2) << "\n";
  }
  std::vector<RunResult> runs = run_all(config);

  for (const auto& run : runs) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03d.ndjson", run.run_id);
    std::ofstream log = open_out(config.output_dir / "runs" / name);
    json header = {{"type", "header"},           {"schema_version", schema_version}, {"run_id", run.run_id},
                   {"seed", run.seed},           {"method", to_string(config.method)}, {"config_hash", hash},
                   {"config", to_json(config)}};
    log << header.dump() << "\n";
    for (std::size_t t = 0; t < run.records.size(); ++t) {
      json line = to_json(run.records[t]);
      line["type"] = "iteration";
      line["best_score"] = run.best_scores[t];
      line["verdict"] = run.records[t].candidate_won ? "candidate" : "incumbent";
      if (!run.irl_distances.empty()) line["irl_distance"] = run.irl_distances[t];
      log << line.dump() << "\n";
    }
    if (!run.final_archive.is_null()) {
      log << json{{"type", "final"}, {"schema_version", schema_version}, {"archive", run.final_archive}}.dump() << "\n";
    }
  }

  {
    std::ofstream scores = open_out(config.output_dir / "scores.csv");
    scores << "run_id,iteration,best_score,schema_version\n";
    for (const auto& run : runs) {
      for (std::size_t t = 0; t < run.best_scores.size(); ++t) {
        scores << run.run_id << ',' << t + 1 << ',' << number(run.best_scores[t]) << ',' << schema_version << '\n';
      }
    }
  }
  {
    std::ofstream summary = open_out(config.output_dir / "summary.csv");
    summary << "iteration,mean,median,q1,q3,runs,schema_version\n";
    for (const auto& row : summarize(runs)) {
      summary << row.iteration << ',' << number(row.mean) << ',' << number(row.median) << ',' << number(row.q1) << ','
              << number(row.q3) << ',' << runs.size() << ',' << schema_version << '\n';
    }
  }
  return runs;
}

AprilState replay_april(const fs::path& run_log) {
  std::ifstream in(run_log);
  if (!in) throw std::runtime_error("cannot read " + run_log.string());
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("run log: empty file");
  const json header = json::parse(line);
  check_schema(header, "run log header");
  const ExperimentConfig config = experiment_config_from_json(header.at("config"));
  if (config.method != Method::april) throw SchemaError("run log: replay needs an APRIL run");
  std::vector<bool> verdicts;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    if (j.at("type") == "iteration") verdicts.push_back(j.at("verdict").get<std::string>() == "candidate");
  }
  ScriptedOracle oracle(verdicts, "replay");
  AprilState state = april_initialize(config.loop, header.at("seed").get<std::uint64_t>());
  for (std::size_t t = 0; t < verdicts.size(); ++t) april_iterate(state, config.loop, oracle);
  return state;
}

bool replay_matches(const fs::path& run_log) {
  json stored;
  {
    std::ifstream in(run_log);
    std::string line;
    while (std::getline(in, line)) {
      const json j = json::parse(line);
      if (j.at("type") == "final") stored = j.at("archive");
    }
  }
  if (stored.is_null()) throw SchemaError("run log: no final archive record");
  return to_json(replay_april(run_log).ranking) == stored;
}

SyntheticConfig synthetic_config_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("synthetic config: expected a JSON object");
  static const std::set<std::string> known = {"dimensions", "criteria",    "iterations",    "runs",
                                              "candidates", "seed",        "output_dir",    "eus_samples",
                                              "eus_weighting", "C",        "threads",       "schema_version"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw SchemaError("synthetic config: unknown key '" + key + "'");
  }
  SyntheticConfig c;
  try {
    if (j.contains("dimensions")) c.dimensions = j.at("dimensions").get<std::vector<int>>();
    if (j.contains("criteria")) {
      c.criteria.clear();
      for (const auto& name : j.at("criteria")) c.criteria.push_back(parse_criterion(name.get<std::string>()));
    }
    if (j.contains("iterations")) c.iterations = j.at("iterations").get<int>();
    if (j.contains("runs")) c.runs = j.at("runs").get<int>();
    if (j.contains("candidates")) c.n_candidates = j.at("candidates").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("eus_samples")) c.options.eus_samples = j.at("eus_samples").get<Eigen::Index>();
    if (j.contains("eus_weighting")) {
      const auto w = j.at("eus_weighting").get<std::string>();
      if (w != "plain" && w != "renormalized") throw SchemaError("synthetic config: unknown eus_weighting");
      c.options.eus_weighting = w == "plain" ? EusWeighting::plain : EusWeighting::renormalized;
    }
    if (j.contains("C")) c.options.C = j.at("C").get<double>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("synthetic config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("synthetic config: ") + e.what());
  }
  if (c.dimensions.empty() || c.criteria.empty()) throw SchemaError("synthetic config: empty dimension or criterion list");
  if (c.iterations < 1 || c.runs < 1 || c.n_candidates < 2 || c.threads < 1) {
    throw SchemaError("synthetic config: iterations, runs and threads must be positive, candidates at least 2");
  }
  return c;
}

std::vector<fs::path> cmd_synthetic(const SyntheticConfig& config) {
  make_dirs(config.output_dir);
  std::vector<fs::path> written;
  std::ofstream summary = open_out(config.output_dir / "synthetic_summary.csv");
  summary << "criterion,d,iteration,mean,schema_version\n";
  for (const int d : config.dimensions) {
    for (const Criterion criterion : config.criteria) {
      std::vector<std::vector<double>> curves(static_cast<std::size_t>(config.runs));
      parallel_for(config.runs, config.threads, [&](int r) {
        curves[static_cast<std::size_t>(r)] = run_synthetic(d, config.n_candidates, config.iterations, criterion,
                                                            config.seed + static_cast<std::uint64_t>(r), config.options);
      });
      const fs::path path = config.output_dir / ("synthetic_" + to_string(criterion) + "_d" + std::to_string(d) + ".csv");
      std::ofstream out = open_out(path);
      out << "run_id,iteration,performance,schema_version\n";
      for (std::size_t r = 0; r < curves.size(); ++r) {
        for (std::size_t t = 0; t < curves[r].size(); ++t) {
          out << r << ',' << t + 1 << ',' << number(curves[r][t]) << ',' << schema_version << '\n';
        }
      }
      for (int t = 0; t < config.iterations; ++t) {
        double mean = 0.0;
        for (const auto& curve : curves) mean += curve[static_cast<std::size_t>(t)];
        mean /= static_cast<double>(curves.size());
        summary << to_string(criterion) << ',' << d << ',' << t + 1 << ',' << number(mean) << ',' << schema_version
                << '\n';
      }
      written.push_back(path);
    }
  }
  written.push_back(config.output_dir / "synthetic_summary.csv");
  return written;
}

json export_plots(const std::vector<fs::path>& summaries) {
  if (summaries.empty()) throw std::invalid_argument("export-plots: no summary files given");
  json run_figure = {{"title", "best score"}, {"x_label", "demonstrations"}, {"y_label", "best score"},
                     {"series", json::array()}};
  std::map<int, json> synthetic_figures;

  for (const auto& path : summaries) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("export-plots: cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("export-plots: empty file " + path.string());
    const auto header = split_csv(line);
    if (!header.empty() && header[0] == "iteration") {
      std::string name = path.parent_path().filename().string();
      const fs::path config_path = path.parent_path() / "config.json";
      if (fs::exists(config_path)) {
        const json c = read_json_file(config_path);
        name = c.at("method").get<std::string>() + " " + c.at("environment").get<std::string>();
      }
      json series = {{"name", name}, {"x", json::array()}, {"y", json::array()}, {"median", json::array()},
                     {"q1", json::array()}, {"q3", json::array()}};
      while (std::getline(in, line)) {
        const auto cells = split_csv(line);
        if (cells.size() < 5) throw std::runtime_error("export-plots: malformed row in " + path.string());
        series["x"].push_back(std::stoi(cells[0]));
        series["y"].push_back(std::stod(cells[1]));
        series["median"].push_back(std::stod(cells[2]));
        series["q1"].push_back(std::stod(cells[3]));
        series["q3"].push_back(std::stod(cells[4]));
      }
      run_figure["series"].push_back(std::move(series));
    } else if (header.size() >= 4 && header[0] == "criterion") {
      std::map<std::pair<int, std::string>, json> series;
      while (std::getline(in, line)) {
        const auto cells = split_csv(line);
        if (cells.size() < 4) throw std::runtime_error("export-plots: malformed row in " + path.string());
        json& s = series[{std::stoi(cells[1]), cells[0]}];
        if (s.is_null()) s = {{"name", cells[0]}, {"x", json::array()}, {"y", json::array()}};
        s["x"].push_back(std::stoi(cells[2]));
        s["y"].push_back(std::stod(cells[3]));
      }
      for (auto& [key, s] : series) {
        json& fig = synthetic_figures[key.first];
        if (fig.is_null()) {
          fig = {{"title", "d=" + std::to_string(key.first)}, {"x_label", "comparisons"}, {"y_label", "performance"},
                 {"series", json::array()}};
        }
        fig["series"].push_back(std::move(s));
      }
    } else {
      throw std::runtime_error("export-plots: unrecognized summary header in " + path.string());
    }
  }

  json doc = {{"schema_version", schema_version}, {"figures", json::array()}};
  if (!run_figure["series"].empty()) doc["figures"].push_back(std::move(run_figure));
  for (auto& [d, fig] : synthetic_figures) doc["figures"].push_back(std::move(fig));
  return doc;
}

void cmd_export_plots(const std::vector<fs::path>& summaries, const fs::path& output) {
  const json doc = export_plots(summaries);
  if (output.has_parent_path()) make_dirs(output.parent_path());
  open_out(output) << doc.dump(2) << "\n";
}

}  // namespace april
