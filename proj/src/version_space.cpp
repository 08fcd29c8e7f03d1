#include "april/version_space.hpp"

#include <cmath>
#include <limits>

namespace april {

Eigen::VectorXd interior_point(const Eigen::MatrixXd& deltas) {
  const Eigen::Index dim = deltas.rows();
  const Eigen::Index m = deltas.cols();
  if (m == 0) return Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd unit = deltas;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double norm = deltas.col(i).norm();
    if (norm == 0.0) throw EmptyVersionSpace("version space: constraint between identical descriptors");
    unit.col(i) /= norm;
  }
  // Hard-margin ranking direction on normalized constraints maximizes the smallest normalized margin.
  const Eigen::MatrixXd gram = unit.transpose() * unit;
  for (const double C : {1e6, 1e10}) {
    const DualSolution dual = solve_gram(gram, C, SolverOptions{1e-12, 200000});
    Eigen::VectorXd w = unit * dual.alpha;
    const double norm = w.norm();
    if (norm == 0.0 || !w.allFinite()) continue;
    w *= 0.5 / norm;
    if ((deltas.transpose() * w).minCoeff() > 0.0) return w;
  }
  throw EmptyVersionSpace("version space: no weight vector satisfies every ranking constraint strictly");
}

Eigen::MatrixXd sample_version_space(const Eigen::MatrixXd& deltas, Eigen::Index n, Rng& rng,
                                     const HitAndRunOptions& options) {
  if (n < 0) throw std::invalid_argument("sample_version_space: negative sample count");
  if (options.burn_in < 0 || options.thinning < 1) {
    throw std::invalid_argument("sample_version_space: invalid burn-in or thinning");
  }
  const Eigen::Index dim = deltas.rows();
  if (dim == 0) throw std::invalid_argument("sample_version_space: zero dimension");
  Eigen::VectorXd w = interior_point(deltas);
  Eigen::VectorXd margins = deltas.transpose() * w;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::VectorXd direction(dim);
  Eigen::VectorXd slopes(deltas.cols());

  const auto step = [&] {
    double dnorm = 0.0;
    do {
      for (Eigen::Index i = 0; i < dim; ++i) direction[i] = normal(rng);
      dnorm = direction.norm();
    } while (dnorm == 0.0);
    direction /= dnorm;
    // Chord of the unit ball through w.
    const double b = w.dot(direction);
    const double c = w.squaredNorm() - 1.0;
    const double root = std::sqrt(std::max(0.0, b * b - c));
    double lo = -b - root;
    double hi = -b + root;
    slopes.noalias() = deltas.transpose() * direction;
    for (Eigen::Index i = 0; i < slopes.size(); ++i) {
      if (slopes[i] > 0.0) {
        lo = std::max(lo, -margins[i] / slopes[i]);
      } else if (slopes[i] < 0.0) {
        hi = std::min(hi, -margins[i] / slopes[i]);
      }
    }
    if (!(hi > lo)) return;
    for (int attempt = 0; attempt < 16; ++attempt) {
      const double t = lo + (hi - lo) * uniform(rng);
      if (w.squaredNorm() + 2.0 * t * b + t * t > 1.0) continue;
      bool inside = true;
      for (Eigen::Index i = 0; i < slopes.size() && inside; ++i) inside = margins[i] + t * slopes[i] > 0.0;
      if (!inside) continue;
      w.noalias() += t * direction;
      margins.noalias() += t * slopes;
      return;
    }
  };

  for (int i = 0; i < options.burn_in; ++i) step();
  Eigen::MatrixXd samples(dim, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (int i = 0; i < options.thinning; ++i) step();
    if ((s & 1023) == 0) margins.noalias() = deltas.transpose() * w;
    samples.col(s) = w;
  }
  return samples;
}

Eigen::MatrixXd sample_version_space(const RankingArchive& archive, Eigen::Index dimension, Eigen::Index n, Rng& rng,
                                     const HitAndRunOptions& options) {
  return sample_version_space(archive.difference_matrix(dimension), n, rng, options);
}

double eus_mc(const RankingArchive& archive, const BehaviorDescriptor& candidate, Eigen::Index n, Rng& rng,
              EusWeighting weighting, const HitAndRunOptions& options) {
  if (n <= 0) throw std::invalid_argument("eus_mc: sample count must be positive");
  const Eigen::Index dim = std::max(archive.dimension(), candidate.size());
  const Eigen::MatrixXd samples = sample_version_space(archive, dim, n, rng, options);
  return eus_estimate(samples, candidate, archive.incumbent_descriptor(), weighting);
}

}  // namespace april
