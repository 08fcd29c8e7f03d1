#include "april/synthetic.hpp"

#include <algorithm>
#include <stdexcept>

namespace april {

std::string to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::aeus:
      return "aeus";
    case Criterion::eus_mc:
      return "eus_mc";
    case Criterion::random:
      return "random";
    case Criterion::max_coord:
      return "max_coord";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view name) {
  if (name == "aeus") return Criterion::aeus;
  if (name == "eus_mc" || name == "eeus") return Criterion::eus_mc;
  if (name == "random") return Criterion::random;
  if (name == "max_coord") return Criterion::max_coord;
  throw std::invalid_argument("unknown criterion '" + std::string(name) + "'");
}

Eigen::VectorXd uniform_simplex_point(int dimension, Rng& rng) {
  std::exponential_distribution<double> exponential(1.0);
  Eigen::VectorXd u(dimension);
  for (int i = 0; i < dimension; ++i) u[i] = exponential(rng);
  return u / u.sum();
}

Eigen::VectorXd uniform_sphere_point(int dimension, Rng& rng) {
  Eigen::VectorXd w;
  double norm = 0.0;
  do {
    w = standard_normal(dimension, rng);
    norm = w.norm();
  } while (norm == 0.0);
  return w / norm;
}

SyntheticInstance make_synthetic_instance(int dimension, int n_candidates, std::uint64_t seed) {
  if (dimension < 2) throw std::invalid_argument("synthetic: dimension must be at least 2");
  if (n_candidates < 2) throw std::invalid_argument("synthetic: need at least two candidates");
  SyntheticInstance inst;
  inst.dimension = dimension;
  inst.seed = seed;
  Rng rng = stream_rng(seed, 0, Stream::instance);
  inst.target = uniform_sphere_point(dimension, rng);
  inst.candidates.resize(dimension, n_candidates);
  for (int j = 0; j < n_candidates; ++j) inst.candidates.col(j) = uniform_simplex_point(dimension, rng);
  inst.initial = std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(n_candidates) - 1)(rng);
  return inst;
}

std::size_t select_candidate(const SyntheticInstance& instance, const RankingArchive& archive,
                             const std::vector<bool>& used, Criterion criterion, Rng& rng,
                             const SyntheticOptions& options) {
  const auto n = static_cast<std::size_t>(instance.candidates.cols());
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < n; ++i) {
    if (!used[i]) open.push_back(i);
  }
  if (open.empty()) throw std::invalid_argument("select_candidate: every candidate already used");

  switch (criterion) {
    case Criterion::random:
      return open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
    case Criterion::max_coord:
      return select_max_coord(instance.candidates, used);
    case Criterion::aeus: {
      const AeusScorer scorer(archive, instance.dimension, options.C, options.solver);
      std::size_t best = open.front();
      double best_score = 0.0;
      bool have = false;
      for (const std::size_t i : open) {
        bool degenerate = false;
        const double s = scorer.score(instance.candidates.col(static_cast<Eigen::Index>(i)), &degenerate);
        if (degenerate) continue;
        if (!have || s > best_score) {
          best = i;
          best_score = s;
          have = true;
        }
      }
      return best;
    }
    case Criterion::eus_mc: {
      const Eigen::MatrixXd samples =
          sample_version_space(archive, instance.dimension, options.eus_samples, rng, options.hit_and_run);
      const Eigen::VectorXd incumbent_values = samples.transpose() * archive.incumbent_descriptor();
      std::size_t best = open.front();
      double best_value = 0.0;
      bool have = false;
      for (const std::size_t i : open) {
        const Eigen::VectorXd values = samples.transpose() * instance.candidates.col(static_cast<Eigen::Index>(i));
        double value = 0.0;
        if (options.eus_weighting == EusWeighting::plain) {
          value = values.cwiseMax(incumbent_values).mean();
        } else {
          value = eus_estimate(samples, instance.candidates.col(static_cast<Eigen::Index>(i)),
                               archive.incumbent_descriptor(), options.eus_weighting);
        }
        if (!have || value > best_value) {
          best = i;
          best_value = value;
          have = true;
        }
      }
      return best;
    }
  }
  throw std::logic_error("select_candidate: unhandled criterion");
}

std::vector<double> run_synthetic(const SyntheticInstance& instance, int n_iterations, Criterion criterion,
                                  const SyntheticOptions& options) {
  if (n_iterations < 0) throw std::invalid_argument("run_synthetic: negative iteration count");
  const auto n = static_cast<std::size_t>(instance.candidates.cols());
  std::vector<bool> used(n, false);
  used[instance.initial] = true;
  RankingArchive archive(instance.candidates.col(static_cast<Eigen::Index>(instance.initial)));
  double best = instance.target.dot(archive.incumbent_descriptor());

  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(n_iterations));
  for (int t = 0; t < n_iterations; ++t) {
    if (std::find(used.begin(), used.end(), false) == used.end()) {
      curve.push_back(best);
      continue;
    }
    Rng rng = stream_rng(instance.seed, static_cast<std::uint64_t>(t) + 1, Stream::selection,
                         static_cast<std::uint64_t>(criterion));
    const std::size_t pick = select_candidate(instance, archive, used, criterion, rng, options);
    used[pick] = true;
    const Eigen::VectorXd u = instance.candidates.col(static_cast<Eigen::Index>(pick));
    const double value = instance.target.dot(u);
    const bool wins = value > best;
    archive.record_comparison(u, wins);
    if (wins) best = value;
    curve.push_back(best);
  }
  return curve;
}

std::vector<double> run_synthetic(int dimension, int n_candidates, int n_iterations, Criterion criterion,
                                  std::uint64_t seed, const SyntheticOptions& options) {
  return run_synthetic(make_synthetic_instance(dimension, n_candidates, seed), n_iterations, criterion, options);
}

}  // namespace april
