#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "april/envs.hpp"

namespace april {

/// L1-normalized histogram of time fractions over sensori-motor states.
using BehaviorDescriptor = Eigen::VectorXd;

/// Online leader clustering with a fixed radius. A point joins its nearest centroid when that centroid
/// lies within the radius; otherwise it founds a new one. Centroids never move, so an index keeps its
/// meaning for the life of the book.
class ClusterBook {
 public:
  ClusterBook(double radius, Eigen::Index point_dimension);

  /// Rebuilds a book from stored centroids (creation order). Throws if two centroids are within the radius.
  static ClusterBook from_centroids(double radius, Eigen::Index point_dimension,
                                    const std::vector<Eigen::VectorXd>& centroids);

  /// Index of the nearest centroid within the radius, or a freshly appended one.
  Eigen::Index assign(const Eigen::Ref<const Eigen::VectorXd>& point);

  /// Nearest centroid within the radius (ties to the lowest index), or -1.
  Eigen::Index nearest(const Eigen::Ref<const Eigen::VectorXd>& point) const;

  Eigen::Index size() const { return static_cast<Eigen::Index>(centroids_.size()); }
  double radius() const { return radius_; }
  Eigen::Index point_dimension() const { return point_dimension_; }
  const std::vector<Eigen::VectorXd>& centroids() const { return centroids_; }

 private:
  using Cell = std::vector<std::int64_t>;
  struct CellHash {
    std::size_t operator()(const Cell& cell) const noexcept;
  };

  Cell cell_of(const Eigen::Ref<const Eigen::VectorXd>& point) const;
  void check_point(const Eigen::Ref<const Eigen::VectorXd>& point) const;

  double radius_;
  Eigen::Index point_dimension_;
  std::vector<Eigen::VectorXd> centroids_;
  std::unordered_map<Cell, std::vector<Eigen::Index>, CellHash> grid_;
};

/// Histogram of cluster assignments over a point stream; the book may grow.
BehaviorDescriptor featurize(ClusterBook& book, std::span<const Eigen::VectorXd> points);

BehaviorDescriptor featurize(ClusterBook& book, const EnvironmentConfig& config, const Trajectory& trajectory);

/// Zero-pads a descriptor to a larger dimension.
BehaviorDescriptor align(const BehaviorDescriptor& u, Eigen::Index dimension);

}  // namespace april
