#include "lge/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lge {

int connected_components(const Adjacency& w) {
  const int p = static_cast<int>(w.weights.rows());
  std::vector<int> label(p, -1);
  int count = 0;
  std::vector<int> stack;
  for (int start = 0; start < p; ++start) {
    if (label[start] >= 0) continue;
    label[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < p; ++u) {
        if (u != v && w.weights(v, u) > 0.0 && label[u] < 0) {
          label[u] = count;
          stack.push_back(u);
        }
      }
    }
    ++count;
  }
  return count;
}

SyntheticDataset generate_lowrank(int p, int n, int r, double q, double mu, Rng& rng) {
  if (r > p) throw std::invalid_argument("generate_lowrank: r > p");
  if (r < 1 || n < 1) throw std::invalid_argument("generate_lowrank: r and n must be >= 1");

  SyntheticDataset ds;
  ds.adjacency0 = random_weighted_graph(p, q, rng);
  ds.laplacian0 = laplacian_from_adjacency(ds.adjacency0);
  ds.components = connected_components(ds.adjacency0);
  ds.basis = smooth_basis(ds.laplacian0, r).vectors;

  std::normal_distribution<double> coeff(mu, std::sqrt(1.0 / p));
  ds.coefficients.resize(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) ds.coefficients(i, j) = coeff(rng);

  ds.lowrank0 = ds.basis * ds.coefficients.transpose();
  ds.perturbation = Eigen::MatrixXd::Zero(p, n);
  ds.x = ds.lowrank0;
  ds.rank = r;
  return ds;
}

Eigen::MatrixXd generate_perturbation(int p, int n, const PerturbationSpec& spec, Rng& rng) {
  if (spec.density < 0.0 || spec.density > 1.0)
    throw std::invalid_argument("generate_perturbation: density outside [0,1]");
  if (spec.law == AmplitudeLaw::uniform && spec.uniform_max <= 0.0)
    throw std::invalid_argument("generate_perturbation: uniform amplitude bound must be > 0");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, n);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) {
      if (unit(rng) >= spec.density) continue;
      if (spec.law == AmplitudeLaw::signed_unit) {
        m(i, j) = unit(rng) < 0.5 ? 1.0 : -1.0;
      } else {
        double amp = unit(rng) * spec.uniform_max;
        if (spec.signed_amplitudes && unit(rng) < 0.5) amp = -amp;
        m(i, j) = amp;
      }
    }
  }
  return m;
}

Eigen::MatrixXd distort_lowrank(const Eigen::MatrixXd& lowrank0, const PerturbationSpec& spec,
                                Rng& rng) {
  return lowrank0 + generate_perturbation(static_cast<int>(lowrank0.rows()),
                                          static_cast<int>(lowrank0.cols()), spec, rng);
}

double rel_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw std::invalid_argument("rel_error: shape mismatch");
  double denom = truth.norm();
  if (denom <= 0.0) throw std::invalid_argument("rel_error: zero-norm truth");
  return (estimate - truth).norm() / denom;
}

}  // namespace lge
