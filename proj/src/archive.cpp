#include "april/archive.hpp"

#include <stdexcept>
#include <string>

namespace april {

RankingArchive::RankingArchive(BehaviorDescriptor first) { add(std::move(first)); }

std::size_t RankingArchive::add(BehaviorDescriptor descriptor) {
  if (!descriptor.allFinite()) throw std::invalid_argument("archive: non-finite descriptor");
  dimension_ = std::max(dimension_, descriptor.size());
  descriptors_.push_back(std::move(descriptor));
  return descriptors_.size() - 1;
}

void RankingArchive::check_index(std::size_t i) const {
  if (i >= descriptors_.size()) {
    throw std::out_of_range("archive: descriptor index " + std::to_string(i) + " out of range");
  }
}

void RankingArchive::add_constraint(std::size_t loser, std::size_t winner) {
  check_index(loser);
  check_index(winner);
  constraints_.push_back({loser, winner});
}

void RankingArchive::set_incumbent(std::size_t index) {
  check_index(index);
  incumbent_ = index;
}

std::size_t RankingArchive::record_comparison(BehaviorDescriptor challenger, bool challenger_wins) {
  const std::size_t previous = incumbent_;
  const std::size_t idx = add(std::move(challenger));
  if (challenger_wins) {
    add_constraint(previous, idx);
    incumbent_ = idx;
  } else {
    add_constraint(idx, previous);
  }
  return idx;
}

Eigen::MatrixXd RankingArchive::difference_matrix(Eigen::Index dimension) const {
  if (dimension < dimension_) throw std::invalid_argument("archive: dimension below stored descriptor size");
  Eigen::MatrixXd deltas = Eigen::MatrixXd::Zero(dimension, static_cast<Eigen::Index>(constraints_.size()));
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& winner = descriptors_[constraints_[i].winner];
    const auto& loser = descriptors_[constraints_[i].loser];
    const auto col = static_cast<Eigen::Index>(i);
    deltas.col(col).head(winner.size()) += winner;
    deltas.col(col).head(loser.size()) -= loser;
  }
  return deltas;
}

RankSvmProblem RankingArchive::problem(double C, Eigen::Index dimension) const {
  if (dimension < dimension_) throw std::invalid_argument("archive: dimension below stored descriptor size");
  RankSvmProblem p;
  p.C = C;
  p.dimension = dimension;
  p.constraints.reserve(constraints_.size());
  for (const auto& c : constraints_) p.constraints.push_back({descriptors_[c.loser], descriptors_[c.winner]});
  return p;
}

}  // namespace april
