#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Box-constrained dual of the ranking SVM by projected gradient ascent with step 1/L.
inline Eigen::VectorXd ranksvm_dual_pg(const Eigen::MatrixXd& deltas, double C, int iterations = 200000) {
  const Eigen::MatrixXd K = deltas.transpose() * deltas;
  const double L = std::max(1e-12, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues().maxCoeff());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(K.rows());
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd g = Eigen::VectorXd::Ones(K.rows()) - K * a;
    a = (a + g / L).cwiseMax(0.0).cwiseMin(C);
  }
  return a;
}

inline double ranksvm_primal(const Eigen::VectorXd& w, const Eigen::MatrixXd& deltas, double C) {
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < deltas.cols(); ++i) hinge += std::max(0.0, 1.0 - w.dot(deltas.col(i)));
  return 0.5 * w.squaredNorm() + C * hinge;
}

/// Mountain car step written from the classic definition.
inline std::pair<double, double> mountain_car(double x, double v, int a) {
  v += 0.001 * a - 0.0025 * std::cos(3.0 * x);
  v = std::clamp(v, -0.07, 0.07);
  x += v;
  if (x < -1.2) {
    x = -1.2;
    v = 0.0;
  }
  if (x > 0.6) x = 0.6;
  return {x, v};
}

/// Noise-free cancer transition from the treatment model.
inline std::pair<double, double> cancer(double s, double t, double a) {
  const double s0 = 1.3, t0 = 0.0;
  double s1 = s + 0.15 * std::max(t, t0) - 1.2 * (a - 0.5) * (s > 0.0 ? 1.0 : 0.0);
  double t1 = t + 0.1 * std::max(s, s0) + 1.2 * (a - 0.5);
  return {std::max(0.0, s1), std::max(0.0, t1)};
}

}  // namespace oracle
