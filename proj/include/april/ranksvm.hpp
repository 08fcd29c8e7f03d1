#pragma once

// Linear pairwise ranking SVM:
//
//   minimize   1/2 ||w||^2 + C sum_i xi_i
//   subject to <w, winner_i> - <w, loser_i> >= 1 - xi_i,   xi_i >= 0.
//
// Solved through its box-constrained dual
//
//   maximize   sum_i a_i - 1/2 a^T K a,   0 <= a_i <= C,
//
// where K is the Gram matrix of the difference vectors d_i = winner_i - loser_i and w = sum_i a_i d_i.
// The dual is worked entirely in Gram space, so callers that add one constraint to a fixed set (the
// selection criterion) only pay for one new Gram row.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace april {

class InvalidProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// loser is ranked below winner. Either side may be shorter than the problem dimension; missing
/// coordinates are zero.
template <typename Scalar>
struct RankingConstraintT {
  VectorX<Scalar> loser;
  VectorX<Scalar> winner;
};

template <typename Scalar>
struct RankSvmProblemT {
  std::vector<RankingConstraintT<Scalar>> constraints;
  Scalar C = Scalar(100);
  Eigen::Index dimension = 0;
};

template <typename Scalar>
struct RankingModelT {
  VectorX<Scalar> w;
  Scalar objective = Scalar(0);
  VectorX<Scalar> slacks;
  bool converged = false;
  int iterations = 0;
};

struct SolverOptions {
  /// Largest tolerated KKT violation of a bound multiplier.
  double tolerance = 1e-8;
  /// Upper bound on active-set iterations.
  int max_iterations = 100000;
};

/// Dual solution in Gram space. margins = K * alpha, i.e. <w, d_i>.
template <typename Scalar>
struct DualSolutionT {
  VectorX<Scalar> alpha;
  VectorX<Scalar> margins;
  Scalar primal = Scalar(0);
  Scalar dual = Scalar(0);
  bool converged = false;
  int iterations = 0;
};

using RankingConstraint = RankingConstraintT<double>;
using RankSvmProblem = RankSvmProblemT<double>;
using RankingModel = RankingModelT<double>;
using DualSolution = DualSolutionT<double>;

/// Zero-pads v to n coordinates. Throws if v is longer than n.
template <typename Derived>
VectorX<typename Derived::Scalar> zero_pad(const Eigen::MatrixBase<Derived>& v, Eigen::Index n) {
  if (v.size() > n) {
    throw std::invalid_argument("zero_pad: vector of size " + std::to_string(v.size()) +
                                " does not fit dimension " + std::to_string(n));
  }
  VectorX<typename Derived::Scalar> out = VectorX<typename Derived::Scalar>::Zero(n);
  out.head(v.size()) = v;
  return out;
}

namespace detail {

template <typename Scalar>
Scalar hinge_sum(const VectorX<Scalar>& margins) {
  return (Scalar(1) - margins.array()).max(Scalar(0)).sum();
}

template <typename Scalar>
void evaluate(const MatrixX<Scalar>& gram, Scalar C, DualSolutionT<Scalar>& s) {
  s.margins.noalias() = gram * s.alpha;
  const Scalar quad = s.alpha.dot(s.margins);
  s.primal = Scalar(0.5) * quad + C * hinge_sum(s.margins);
  s.dual = s.alpha.sum() - Scalar(0.5) * quad;
}

}  // namespace detail

/// Primal active-set method on the box-constrained dual, max 1'a - a'Ka/2 with 0 <= a <= C. A ridge of
/// 1e-12 * max K_ii keeps every free subproblem strictly convex; constraints with K_ii = 0 sit at C.
/// Deterministic: ties in the release rule go to the lowest index.
template <typename Scalar>
DualSolutionT<Scalar> solve_gram(const MatrixX<Scalar>& gram, Scalar C, const SolverOptions& options = {},
                                 const VectorX<Scalar>* warm_start = nullptr) {
  const Eigen::Index m = gram.rows();
  DualSolutionT<Scalar> s;
  s.alpha = VectorX<Scalar>::Zero(m);
  if (warm_start != nullptr) {
    const Eigen::Index n = std::min<Eigen::Index>(m, warm_start->size());
    s.alpha.head(n) = warm_start->head(n).cwiseMax(Scalar(0)).cwiseMin(C);
  }
  if (m == 0) {
    s.converged = true;
    return s;
  }
  enum : char { lower, upper, free };
  const Scalar max_diag = gram.diagonal().maxCoeff();
  const Scalar ridge = Scalar(1e-12) * (max_diag > Scalar(0) ? max_diag : Scalar(1));
  std::vector<char> status(static_cast<std::size_t>(m));
  std::vector<bool> pinned(static_cast<std::size_t>(m), false);
  for (Eigen::Index i = 0; i < m; ++i) {
    auto& st = status[static_cast<std::size_t>(i)];
    if (gram(i, i) <= Scalar(0)) {
      pinned[static_cast<std::size_t>(i)] = true;
      st = upper;
      s.alpha[i] = C;
    } else if (s.alpha[i] <= Scalar(0)) {
      st = lower;
      s.alpha[i] = Scalar(0);
    } else if (s.alpha[i] >= C) {
      st = upper;
      s.alpha[i] = C;
    } else {
      st = free;
    }
  }
  const Scalar tol = static_cast<Scalar>(options.tolerance);
  std::vector<Eigen::Index> free_set;
  VectorX<Scalar> grad(m);
  bool subspace_optimal = false;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    s.iterations = iter;
    grad.noalias() = gram * s.alpha;
    grad += ridge * s.alpha - VectorX<Scalar>::Ones(m);
    free_set.clear();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (status[static_cast<std::size_t>(i)] == free) free_set.push_back(i);
    }
    const auto f = static_cast<Eigen::Index>(free_set.size());
    if (!subspace_optimal && f > 0) {
      MatrixX<Scalar> hff(f, f);
      VectorX<Scalar> rhs(f);
      for (Eigen::Index a = 0; a < f; ++a) {
        rhs[a] = -grad[free_set[a]];
        for (Eigen::Index b = 0; b < f; ++b) hff(a, b) = gram(free_set[a], free_set[b]);
        hff(a, a) += ridge;
      }
      const VectorX<Scalar> p = Eigen::LDLT<MatrixX<Scalar>>(hff).solve(rhs);
      if (p.allFinite() && p.template lpNorm<Eigen::Infinity>() > Scalar(1e-15) * std::max(Scalar(1), C)) {
        Scalar t = Scalar(1);
        Eigen::Index blocking = -1;
        for (Eigen::Index a = 0; a < f; ++a) {
          const Scalar x = s.alpha[free_set[a]];
          Scalar limit = t;
          if (p[a] < Scalar(0)) limit = -x / p[a];
          if (p[a] > Scalar(0)) limit = (C - x) / p[a];
          if (limit < t) {
            t = std::max(Scalar(0), limit);
            blocking = a;
          }
        }
        for (Eigen::Index a = 0; a < f; ++a) {
          s.alpha[free_set[a]] = std::clamp(s.alpha[free_set[a]] + t * p[a], Scalar(0), C);
        }
        if (blocking >= 0) {
          const Eigen::Index i = free_set[blocking];
          const bool at_upper = p[blocking] > Scalar(0);
          s.alpha[i] = at_upper ? C : Scalar(0);
          status[static_cast<std::size_t>(i)] = at_upper ? upper : lower;
        } else {
          subspace_optimal = true;
        }
        continue;
      }
    }
    subspace_optimal = false;
    // Release the bound coordinate whose multiplier has the wrong sign by the largest margin.
    Eigen::Index release = -1;
    Scalar worst = tol;
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto st = status[static_cast<std::size_t>(i)];
      if (pinned[static_cast<std::size_t>(i)] || st == free) continue;
      const Scalar violation = st == lower ? -grad[i] : grad[i];
      if (violation > worst) {
        worst = violation;
        release = i;
      }
    }
    if (release < 0) {
      s.converged = true;
      break;
    }
    status[static_cast<std::size_t>(release)] = free;
  }
  detail::evaluate(gram, C, s);
  return s;
}

template <typename Scalar>
void validate(const RankSvmProblemT<Scalar>& problem) {
  if (!(problem.C > Scalar(0)) || !std::isfinite(static_cast<double>(problem.C))) {
    throw InvalidProblem("ranking problem: C must be positive and finite");
  }
  if (problem.dimension < 0) throw InvalidProblem("ranking problem: negative dimension");
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto& c = problem.constraints[i];
    if (c.loser.size() > problem.dimension || c.winner.size() > problem.dimension) {
      throw InvalidProblem("ranking problem: constraint " + std::to_string(i) + " exceeds dimension " +
                           std::to_string(problem.dimension));
    }
    if (!c.loser.allFinite() || !c.winner.allFinite()) {
      throw InvalidProblem("ranking problem: constraint " + std::to_string(i) + " is not finite");
    }
  }
}

/// Difference vectors winner - loser as columns, aligned to the problem dimension.
template <typename Scalar>
MatrixX<Scalar> difference_matrix(const RankSvmProblemT<Scalar>& problem) {
  const auto m = static_cast<Eigen::Index>(problem.constraints.size());
  MatrixX<Scalar> deltas = MatrixX<Scalar>::Zero(problem.dimension, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& c = problem.constraints[static_cast<std::size_t>(i)];
    deltas.col(i).head(c.winner.size()) += c.winner;
    deltas.col(i).head(c.loser.size()) -= c.loser;
  }
  return deltas;
}

template <typename Scalar>
RankingModelT<Scalar> solve(const RankSvmProblemT<Scalar>& problem, const SolverOptions& options = {}) {
  validate(problem);
  const MatrixX<Scalar> deltas = difference_matrix(problem);
  const MatrixX<Scalar> gram = deltas.transpose() * deltas;
  const DualSolutionT<Scalar> dual = solve_gram(gram, problem.C, options);

  RankingModelT<Scalar> model;
  model.w = deltas * dual.alpha;
  const VectorX<Scalar> margins = deltas.transpose() * model.w;
  model.slacks = (Scalar(1) - margins.array()).max(Scalar(0)).matrix();
  model.objective = Scalar(0.5) * model.w.squaredNorm() + problem.C * model.slacks.sum();
  model.converged = dual.converged;
  model.iterations = dual.iterations;
  return model;
}

template <typename Scalar>
RankingModelT<Scalar> solve(const RankSvmProblemT<Scalar>& problem, double tolerance, int max_iterations) {
  return solve(problem, SolverOptions{tolerance, max_iterations});
}

/// <w, u>, with u zero-padded to the model dimension.
template <typename Scalar, typename Derived>
Scalar utility(const RankingModelT<Scalar>& model, const Eigen::MatrixBase<Derived>& u) {
  if (u.size() > model.w.size()) {
    throw std::invalid_argument("utility: descriptor longer than model dimension");
  }
  if (!u.allFinite()) throw std::invalid_argument("utility: non-finite descriptor");
  return model.w.head(u.size()).dot(u);
}

/// 1/2 ||w||^2 + C * sum of hinge residuals, for any candidate w.
template <typename Scalar, typename Derived>
Scalar objective(const Eigen::MatrixBase<Derived>& w, const RankSvmProblemT<Scalar>& problem) {
  validate(problem);
  if (w.size() != problem.dimension) throw InvalidProblem("objective: w does not match problem dimension");
  Scalar hinge = Scalar(0);
  for (const auto& c : problem.constraints) {
    const Scalar margin = w.head(c.winner.size()).dot(c.winner) - w.head(c.loser.size()).dot(c.loser);
    hinge += std::max(Scalar(0), Scalar(1) - margin);
  }
  return Scalar(0.5) * w.squaredNorm() + problem.C * hinge;
}

}  // namespace april
