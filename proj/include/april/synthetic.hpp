#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "april/random.hpp"
#include "april/ranksvm.hpp"
#include "april/selection.hpp"
#include "april/version_space.hpp"

namespace april {

enum class Criterion { aeus, eus_mc, random, max_coord };

std::string to_string(Criterion criterion);
Criterion parse_criterion(std::string_view name);

/// Candidates on the nonnegative L1 unit sphere (columns) and a hidden utility on the L2 unit sphere.
struct SyntheticInstance {
  int dimension = 0;
  Eigen::MatrixXd candidates;
  Eigen::VectorXd target;
  std::size_t initial = 0;
  std::uint64_t seed = 0;
};

/// Flat Dirichlet point via normalized exponential spacings.
Eigen::VectorXd uniform_simplex_point(int dimension, Rng& rng);
/// Normalized Gaussian.
Eigen::VectorXd uniform_sphere_point(int dimension, Rng& rng);

SyntheticInstance make_synthetic_instance(int dimension, int n_candidates, std::uint64_t seed);

struct SyntheticOptions {
  double C = 100.0;
  Eigen::Index eus_samples = 10000;
  EusWeighting eus_weighting = EusWeighting::plain;
  HitAndRunOptions hit_and_run;
  SolverOptions solver;
};

/// Index chosen by a criterion among candidates not yet shown to the oracle.
std::size_t select_candidate(const SyntheticInstance& instance, const RankingArchive& archive,
                             const std::vector<bool>& used, Criterion criterion, Rng& rng,
                             const SyntheticOptions& options = {});

/// Active-ranking loop against the linear oracle <u, target>. Returns <u_t, target> after each iteration.
std::vector<double> run_synthetic(const SyntheticInstance& instance, int n_iterations, Criterion criterion,
                                  const SyntheticOptions& options = {});

std::vector<double> run_synthetic(int dimension, int n_candidates, int n_iterations, Criterion criterion,
                                  std::uint64_t seed, const SyntheticOptions& options = {});

}  // namespace april
