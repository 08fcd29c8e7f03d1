#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "april/archive.hpp"
#include "april/ranksvm.hpp"

namespace april {

/// One trajectory's contribution to the approximate expected utility of selection.
struct AeusTerm {
  RankingModel w_plus;   // archive + (incumbent < candidate)
  RankingModel w_minus;  // archive + (candidate < incumbent)
  double candidate_utility = 0.0;  // <w_plus, u>
  double incumbent_utility = 0.0;  // <w_minus, u_t>
  double score = 0.0;
  bool degenerate = false;
};

struct AeusEvaluation {
  std::vector<AeusTerm> terms;
  double score = 0.0;
  /// Every term was degenerate (candidate indistinguishable from the incumbent, or a zero objective).
  bool degenerate = false;
};

/// Scores candidates against a fixed archive. The archive's Gram matrix and its own ranking solution
/// are computed once; each candidate adds one Gram row and warm-starts both augmented solves from the
/// archive solution.
class AeusScorer {
 public:
  AeusScorer(const RankingArchive& archive, Eigen::Index dimension, double C, SolverOptions options = {});

  /// <w+, u>/F(w+) + <w-, u_t>/F(w-) for one descriptor. Identical descriptors score 0 with the flag set.
  double score(const BehaviorDescriptor& u, bool* degenerate = nullptr) const;

  /// Same quantity, with both ranking models materialized.
  AeusTerm evaluate(const BehaviorDescriptor& u) const;

  Eigen::Index dimension() const { return dimension_; }

 private:
  struct Augmented {
    DualSolution solution;
    double utility = 0.0;
  };
  Augmented solve_augmented(const Eigen::VectorXd& delta, const Eigen::VectorXd& probe) const;

  Eigen::Index dimension_;
  double C_;
  SolverOptions options_;
  Eigen::MatrixXd deltas_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd archive_alpha_;
  Eigen::VectorXd incumbent_;
};

/// Mean over the candidate's descriptors of the per-descriptor score. All descriptors are aligned to
/// max(archive dimension, largest candidate size).
AeusEvaluation aeus_score(const RankingArchive& archive, std::span<const BehaviorDescriptor> candidates,
                          double C, SolverOptions options = {});

enum class EusWeighting {
  /// (1/n) [ sum over W+ of <w,u_x> + sum over W- of <w,u_t> ], the version-space mean of the max.
  plain,
  /// Conditional mean over W+ plus conditional mean over W-.
  renormalized,
};

/// Monte-Carlo expected utility of selection from version-space samples (columns of `samples`).
double eus_estimate(const Eigen::MatrixXd& samples, const Eigen::VectorXd& candidate, const Eigen::VectorXd& incumbent,
                    EusWeighting weighting = EusWeighting::plain);

/// Unused index with the largest L-infinity norm (ties to the lowest index). Candidates are columns.
std::size_t select_max_coord(const Eigen::MatrixXd& candidates, const std::vector<bool>& used);

}  // namespace april
