#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace lge {

// Shrinkage primitives shared by the ADMM solvers. All functions here are
// pure; safe to call concurrently.

// sgn(x) * max(|x| - tau, 0)
inline double soft_threshold(double x, double tau) {
  double m = std::abs(x) - tau;
  return m > 0.0 ? (x < 0.0 ? -m : m) : 0.0;
}

Eigen::MatrixXd soft_threshold_matrix(const Eigen::MatrixXd& m, double tau);

// Singular value thresholding D_tau: U diag(max(sigma_i - tau, 0)) V^T
// using a thin SVD. Throws std::invalid_argument on non-finite input.
Eigen::MatrixXd svt(const Eigen::MatrixXd& j, double tau);

struct MatrixNorms {
  double frobenius = 0.0;
  double nuclear = 0.0;
  double entrywise_l1 = 0.0;
};

MatrixNorms norms(const Eigen::MatrixXd& m);

// Number of singular values above rel_tol * sigma_max; 0 for the zero matrix.
int rank_by_tolerance(const Eigen::MatrixXd& m, double rel_tol = 1e-12);

// Singular values in non-increasing order.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& m);

}  // namespace lge
