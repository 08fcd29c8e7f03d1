#include "april/selection.hpp"

#include <stdexcept>

namespace april {

AeusScorer::AeusScorer(const RankingArchive& archive, Eigen::Index dimension, double C, SolverOptions options)
    : dimension_(dimension), C_(C), options_(options) {
  if (!(C > 0.0)) throw InvalidProblem("aeus: C must be positive");
  deltas_ = archive.difference_matrix(dimension);
  gram_ = deltas_.transpose() * deltas_;
  archive_alpha_ = solve_gram(gram_, C_, options_).alpha;
  incumbent_ = align(archive.incumbent_descriptor(), dimension);
}

AeusScorer::Augmented AeusScorer::solve_augmented(const Eigen::VectorXd& delta, const Eigen::VectorXd& probe) const {
  const Eigen::Index m = gram_.rows();
  Eigen::MatrixXd gram(m + 1, m + 1);
  gram.topLeftCorner(m, m) = gram_;
  const Eigen::VectorXd cross = deltas_.transpose() * delta;
  gram.col(m).head(m) = cross;
  gram.row(m).head(m) = cross.transpose();
  gram(m, m) = delta.squaredNorm();

  Eigen::VectorXd warm(m + 1);
  warm.head(m) = archive_alpha_;
  warm[m] = 0.0;
  Augmented out;
  out.solution = solve_gram(gram, C_, options_, &warm);
  const Eigen::VectorXd& alpha = out.solution.alpha;
  out.utility = alpha.head(m).dot(deltas_.transpose() * probe) + alpha[m] * delta.dot(probe);
  return out;
}

double AeusScorer::score(const BehaviorDescriptor& u_raw, bool* degenerate) const {
  const Eigen::VectorXd u = align(u_raw, dimension_);
  const Eigen::VectorXd delta = u - incumbent_;
  bool flag = delta.isZero(0.0);
  double total = 0.0;
  if (!flag) {
    const Augmented plus = solve_augmented(delta, u);
    const Augmented minus = solve_augmented(-delta, incumbent_);
    if (plus.solution.primal > 0.0 && minus.solution.primal > 0.0) {
      total = plus.utility / plus.solution.primal + minus.utility / minus.solution.primal;
    } else {
      flag = true;
    }
  }
  if (degenerate != nullptr) *degenerate = flag;
  return total;
}

AeusTerm AeusScorer::evaluate(const BehaviorDescriptor& u_raw) const {
  const Eigen::VectorXd u = align(u_raw, dimension_);
  const Eigen::VectorXd delta = u - incumbent_;
  AeusTerm term;
  const auto materialize = [&](const Eigen::VectorXd& d) {
    const Augmented a = solve_augmented(d, u);
    RankingModel model;
    const Eigen::Index m = gram_.rows();
    model.w = deltas_ * a.solution.alpha.head(m) + a.solution.alpha[m] * d;
    model.slacks = (1.0 - a.solution.margins.array()).max(0.0).matrix();
    model.objective = a.solution.primal;
    model.converged = a.solution.converged;
    model.iterations = a.solution.iterations;
    return model;
  };
  term.w_plus = materialize(delta);
  term.w_minus = materialize(-delta);
  term.candidate_utility = term.w_plus.w.dot(u);
  term.incumbent_utility = term.w_minus.w.dot(incumbent_);
  term.degenerate = delta.isZero(0.0) || !(term.w_plus.objective > 0.0) || !(term.w_minus.objective > 0.0);
  term.score = term.degenerate ? 0.0
                               : term.candidate_utility / term.w_plus.objective +
                                     term.incumbent_utility / term.w_minus.objective;
  return term;
}

AeusEvaluation aeus_score(const RankingArchive& archive, std::span<const BehaviorDescriptor> candidates, double C,
                          SolverOptions options) {
  if (candidates.empty()) throw std::invalid_argument("aeus_score: no candidate descriptors");
  Eigen::Index dimension = archive.dimension();
  for (const auto& u : candidates) dimension = std::max(dimension, u.size());
  const AeusScorer scorer(archive, dimension, C, options);
  AeusEvaluation eval;
  eval.degenerate = true;
  for (const auto& u : candidates) {
    eval.terms.push_back(scorer.evaluate(u));
    eval.score += eval.terms.back().score;
    eval.degenerate = eval.degenerate && eval.terms.back().degenerate;
  }
  eval.score /= static_cast<double>(candidates.size());
  return eval;
}

double eus_estimate(const Eigen::MatrixXd& samples, const Eigen::VectorXd& candidate, const Eigen::VectorXd& incumbent,
                    EusWeighting weighting) {
  if (samples.cols() == 0) throw std::invalid_argument("eus_estimate: no samples");
  const Eigen::Index dim = samples.rows();
  const Eigen::VectorXd cu = samples.transpose() * align(candidate, dim);
  const Eigen::VectorXd tu = samples.transpose() * align(incumbent, dim);
  double plus_sum = 0.0;
  double minus_sum = 0.0;
  Eigen::Index plus_count = 0;
  for (Eigen::Index i = 0; i < cu.size(); ++i) {
    if (cu[i] > tu[i]) {
      plus_sum += cu[i];
      ++plus_count;
    } else {
      minus_sum += tu[i];
    }
  }
  const Eigen::Index minus_count = cu.size() - plus_count;
  if (weighting == EusWeighting::plain) return (plus_sum + minus_sum) / static_cast<double>(cu.size());
  double out = 0.0;
  if (plus_count > 0) out += plus_sum / static_cast<double>(plus_count);
  if (minus_count > 0) out += minus_sum / static_cast<double>(minus_count);
  return out;
}

std::size_t select_max_coord(const Eigen::MatrixXd& candidates, const std::vector<bool>& used) {
  if (used.size() != static_cast<std::size_t>(candidates.cols())) {
    throw std::invalid_argument("select_max_coord: usage mask does not match candidate count");
  }
  std::size_t best = used.size();
  double best_norm = 0.0;
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (used[i]) continue;
    const double norm = candidates.col(static_cast<Eigen::Index>(i)).lpNorm<Eigen::Infinity>();
    if (best == used.size() || norm > best_norm) {
      best = i;
      best_norm = norm;
    }
  }
  if (best == used.size()) throw std::invalid_argument("select_max_coord: every candidate already used");
  return best;
}

}  // namespace april
