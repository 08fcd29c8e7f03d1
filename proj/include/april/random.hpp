#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace april {

using Rng = std::mt19937_64;

/// Purposes that key independent random streams inside one run.
enum class Stream : std::uint64_t {
  initial_policy = 1,
  perturb = 2,
  estimate = 3,
  demonstrate = 4,
  inner_search = 5,
  expert_demo = 6,
  instance = 7,
  selection = 8,
  version_space = 9,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  return mix64(mix64(mix64(mix64(base) ^ a) ^ b) ^ c);
}

/// Counter-based stream: the generator for (iteration, purpose, index) never depends on how many
/// draws another phase consumed.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t iteration, Stream purpose,
                      std::uint64_t index = 0) {
  return Rng(derive_seed(seed, iteration, static_cast<std::uint64_t>(purpose), index));
}

inline Eigen::VectorXd standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = normal(rng);
  return g;
}

}  // namespace april
