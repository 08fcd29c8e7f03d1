#pragma once

#include <Eigen/Core>

#include "april/random.hpp"

namespace april {

/// Layer sizes of a one-hidden-layer network.
struct PolicyShape {
  int inputs = 2;
  int hidden = 9;
  int outputs = 1;

  friend bool operator==(const PolicyShape&, const PolicyShape&) = default;
};

/// (inputs + 1) * hidden + (hidden + 1) * outputs. Throws on non-positive sizes.
Eigen::Index param_dim(const PolicyShape& shape);

/// Flat parameter vector of a tanh network. Layout: for every hidden unit its input weights followed
/// by its bias, then for every output unit its hidden weights followed by its bias.
struct ParametricPolicy {
  PolicyShape shape;
  Eigen::VectorXd weights;

  ParametricPolicy() = default;
  ParametricPolicy(PolicyShape shape, Eigen::VectorXd weights);

  static ParametricPolicy zeros(const PolicyShape& shape);
  /// i.i.d. standard normal weights.
  static ParametricPolicy random(const PolicyShape& shape, Rng& rng);
};

/// Raw network outputs for an (already normalized) observation.
Eigen::VectorXd forward(const ParametricPolicy& policy, const Eigen::Ref<const Eigen::VectorXd>& observation);

/// Three-way threshold of a raw output: -1 below -1/3, +1 above 1/3, 0 otherwise.
int discrete_action(double output);

/// (tanh(output) + 1) / 2, always in [0, 1].
double dosage_action(double output);

/// x + sigma * g with g standard normal per coordinate.
ParametricPolicy perturb(const ParametricPolicy& policy, double sigma, Rng& rng);

struct StepSizeState {
  double sigma = 1.0;
  double c = 1.5;
};

/// sigma * c on improvement, sigma / c^(1/4) otherwise.
StepSizeState adapt_sigma(StepSizeState state, bool improved);

}  // namespace april
