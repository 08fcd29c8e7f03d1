#pragma once

#include <stdexcept>

#include <Eigen/Core>

#include "april/archive.hpp"
#include "april/random.hpp"
#include "april/selection.hpp"

namespace april {

class EmptyVersionSpace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HitAndRunOptions {
  int burn_in = 1000;
  int thinning = 10;
};

/// A point of {||w|| < 1, <w, d_i> > 0 for every column d_i} maximizing the smallest normalized margin,
/// scaled to norm 1/2. Throws EmptyVersionSpace when no strictly consistent direction exists.
Eigen::VectorXd interior_point(const Eigen::MatrixXd& deltas);

/// Hit-and-run samples (columns) of the version space {||w||_2 <= 1, <w, d_i> > 0}. `deltas` holds the
/// difference vectors winner - loser as columns; with no columns the region is the unit ball.
Eigen::MatrixXd sample_version_space(const Eigen::MatrixXd& deltas, Eigen::Index n, Rng& rng,
                                     const HitAndRunOptions& options = {});

Eigen::MatrixXd sample_version_space(const RankingArchive& archive, Eigen::Index dimension, Eigen::Index n, Rng& rng,
                                     const HitAndRunOptions& options = {});

/// Expected utility of selecting `candidate` against the archive incumbent, estimated from n version-space
/// samples.
double eus_mc(const RankingArchive& archive, const BehaviorDescriptor& candidate, Eigen::Index n, Rng& rng,
              EusWeighting weighting = EusWeighting::plain, const HitAndRunOptions& options = {});

}  // namespace april
