#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "april/behavior.hpp"
#include "april/ranksvm.hpp"

namespace april {

/// Indices into the archive's descriptor list; loser is ranked below winner.
struct PairwiseConstraint {
  std::size_t loser = 0;
  std::size_t winner = 0;

  friend bool operator==(const PairwiseConstraint&, const PairwiseConstraint&) = default;
};

/// Demonstrated descriptors, the pairwise verdicts collected on them, and the current best one.
/// Descriptors are stored at their creation dimension and zero-padded on use.
class RankingArchive {
 public:
  explicit RankingArchive(BehaviorDescriptor first);

  std::size_t add(BehaviorDescriptor descriptor);
  /// Records a verdict between two stored descriptors.
  void add_constraint(std::size_t loser, std::size_t winner);
  void set_incumbent(std::size_t index);

  /// Appends a challenger and the verdict against the current incumbent; the incumbent moves to the
  /// challenger when it wins. Returns the challenger's index.
  std::size_t record_comparison(BehaviorDescriptor challenger, bool challenger_wins);

  std::size_t size() const { return descriptors_.size(); }
  std::size_t incumbent() const { return incumbent_; }
  const BehaviorDescriptor& incumbent_descriptor() const { return descriptors_[incumbent_]; }
  const std::vector<BehaviorDescriptor>& descriptors() const { return descriptors_; }
  const std::vector<PairwiseConstraint>& constraints() const { return constraints_; }

  /// Largest stored descriptor size.
  Eigen::Index dimension() const { return dimension_; }

  /// Columns winner - loser, zero-padded to the given dimension.
  Eigen::MatrixXd difference_matrix(Eigen::Index dimension) const;
  RankSvmProblem problem(double C, Eigen::Index dimension) const;

 private:
  void check_index(std::size_t i) const;

  std::vector<BehaviorDescriptor> descriptors_;
  std::vector<PairwiseConstraint> constraints_;
  std::size_t incumbent_ = 0;
  Eigen::Index dimension_ = 0;
};

}  // namespace april
