#include "april/behavior.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "april/ranksvm.hpp"

namespace april {

ClusterBook::ClusterBook(double radius, Eigen::Index point_dimension)
    : radius_(radius), point_dimension_(point_dimension) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("cluster book: radius must be positive");
  if (point_dimension <= 0) throw std::invalid_argument("cluster book: point dimension must be positive");
}

ClusterBook ClusterBook::from_centroids(double radius, Eigen::Index point_dimension,
                                        const std::vector<Eigen::VectorXd>& centroids) {
  ClusterBook book(radius, point_dimension);
  for (const auto& c : centroids) {
    book.check_point(c);
    if (book.nearest(c) >= 0) {
      throw std::invalid_argument("cluster book: stored centroids closer than the radius");
    }
    book.assign(c);
  }
  return book;
}

std::size_t ClusterBook::CellHash::operator()(const Cell& cell) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (const std::int64_t c : cell) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

ClusterBook::Cell ClusterBook::cell_of(const Eigen::Ref<const Eigen::VectorXd>& point) const {
  Cell cell(static_cast<std::size_t>(point.size()));
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    cell[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(point[i] / radius_));
  }
  return cell;
}

void ClusterBook::check_point(const Eigen::Ref<const Eigen::VectorXd>& point) const {
  if (point.size() != point_dimension_) {
    throw std::invalid_argument("cluster book: point has dimension " + std::to_string(point.size()) +
                                ", book expects " + std::to_string(point_dimension_));
  }
  if (!point.allFinite()) throw std::invalid_argument("cluster book: non-finite point");
}

Eigen::Index ClusterBook::nearest(const Eigen::Ref<const Eigen::VectorXd>& point) const {
  check_point(point);
  // Any centroid within the radius sits in an adjacent cell along every axis.
  const Cell home = cell_of(point);
  const auto k = home.size();
  Cell probe(k);
  Eigen::Index best = -1;
  double best_dist = radius_ * radius_;
  std::vector<int> offset(k, -1);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) probe[i] = home[i] + offset[i];
    if (const auto it = grid_.find(probe); it != grid_.end()) {
      for (const Eigen::Index idx : it->second) {
        const double d = (centroids_[static_cast<std::size_t>(idx)] - point).squaredNorm();
        if (d < best_dist || (d == best_dist && (best < 0 || idx < best))) {
          best = idx;
          best_dist = d;
        }
      }
    }
    std::size_t axis = 0;
    while (axis < k && offset[axis] == 1) offset[axis++] = -1;
    if (axis == k) break;
    ++offset[axis];
  }
  return best;
}

Eigen::Index ClusterBook::assign(const Eigen::Ref<const Eigen::VectorXd>& point) {
  const Eigen::Index found = nearest(point);
  if (found >= 0) return found;
  const Eigen::Index idx = size();
  centroids_.emplace_back(point);
  grid_[cell_of(point)].push_back(idx);
  return idx;
}

BehaviorDescriptor featurize(ClusterBook& book, std::span<const Eigen::VectorXd> points) {
  if (points.empty()) throw std::invalid_argument("featurize: empty trajectory");
  std::vector<Eigen::Index> labels;
  labels.reserve(points.size());
  for (const auto& p : points) labels.push_back(book.assign(p));
  BehaviorDescriptor histogram = BehaviorDescriptor::Zero(book.size());
  for (const Eigen::Index l : labels) histogram[l] += 1.0;
  return histogram / static_cast<double>(points.size());
}

BehaviorDescriptor featurize(ClusterBook& book, const EnvironmentConfig& config, const Trajectory& trajectory) {
  const auto points = sensorimotor_points(config, trajectory);
  return featurize(book, points);
}

BehaviorDescriptor align(const BehaviorDescriptor& u, Eigen::Index dimension) {
  if (dimension < u.size()) {
    throw std::invalid_argument("align: target dimension " + std::to_string(dimension) + " below descriptor size " +
                                std::to_string(u.size()));
  }
  return zero_pad(u, dimension);
}

}  // namespace april
