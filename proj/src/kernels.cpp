#include "lge/kernels.hpp"

#include <stdexcept>

namespace lge {

Eigen::MatrixXd soft_threshold_matrix(const Eigen::MatrixXd& m, double tau) {
  return m.unaryExpr([tau](double x) { return soft_threshold(x, tau); });
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& j, double tau) {
  if (!j.allFinite()) throw std::invalid_argument("svt: non-finite input");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - tau, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

MatrixNorms norms(const Eigen::MatrixXd& m) {
  MatrixNorms out;
  out.frobenius = m.norm();
  out.entrywise_l1 = m.cwiseAbs().sum();
  out.nuclear = singular_values(m).sum();
  return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues();
}

int rank_by_tolerance(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::VectorXd s = singular_values(m);
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  double thresh = rel_tol * s(0);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thresh) ++r;
  return r;
}

}  // namespace lge
