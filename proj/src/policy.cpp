#include "april/policy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace april {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

Eigen::Index param_dim(const PolicyShape& shape) {
  if (shape.inputs <= 0 || shape.hidden <= 0 || shape.outputs <= 0) {
    throw std::invalid_argument("policy shape: layer sizes must be positive");
  }
  return static_cast<Eigen::Index>(shape.inputs + 1) * shape.hidden +
         static_cast<Eigen::Index>(shape.hidden + 1) * shape.outputs;
}

ParametricPolicy::ParametricPolicy(PolicyShape s, Eigen::VectorXd w) : shape(s), weights(std::move(w)) {
  if (weights.size() != param_dim(shape)) {
    throw std::invalid_argument("policy: expected " + std::to_string(param_dim(shape)) + " weights, got " +
                                std::to_string(weights.size()));
  }
  if (!weights.allFinite()) throw std::invalid_argument("policy: non-finite weights");
}

ParametricPolicy ParametricPolicy::zeros(const PolicyShape& shape) {
  return {shape, Eigen::VectorXd::Zero(param_dim(shape))};
}

ParametricPolicy ParametricPolicy::random(const PolicyShape& shape, Rng& rng) {
  return {shape, standard_normal(param_dim(shape), rng)};
}

Eigen::VectorXd forward(const ParametricPolicy& policy, const Eigen::Ref<const Eigen::VectorXd>& observation) {
  const PolicyShape& s = policy.shape;
  if (observation.size() != s.inputs) {
    throw std::invalid_argument("policy: observation has " + std::to_string(observation.size()) +
                                " entries, network expects " + std::to_string(s.inputs));
  }
  const RowMajorMap hidden_layer(policy.weights.data(), s.hidden, s.inputs + 1);
  const RowMajorMap output_layer(policy.weights.data() + static_cast<Eigen::Index>(s.inputs + 1) * s.hidden,
                                 s.outputs, s.hidden + 1);
  const Eigen::VectorXd h =
      (hidden_layer.leftCols(s.inputs) * observation + hidden_layer.col(s.inputs)).array().tanh().matrix();
  return output_layer.leftCols(s.hidden) * h + output_layer.col(s.hidden);
}

int discrete_action(double output) {
  if (output < -1.0 / 3.0) return -1;
  if (output > 1.0 / 3.0) return 1;
  return 0;
}

double dosage_action(double output) { return 0.5 * (std::tanh(output) + 1.0); }

ParametricPolicy perturb(const ParametricPolicy& policy, double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("perturb: sigma must be positive");
  ParametricPolicy out = policy;
  out.weights += sigma * standard_normal(policy.weights.size(), rng);
  return out;
}

StepSizeState adapt_sigma(StepSizeState state, bool improved) {
  if (improved) {
    state.sigma *= state.c;
  } else {
    state.sigma /= std::pow(state.c, 0.25);
  }
  return state;
}

}  // namespace april
