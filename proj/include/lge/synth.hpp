#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "lge/graph.hpp"
#include "lge/rng.hpp"

namespace lge {

struct SyntheticDataset {
  Eigen::MatrixXd x;             // L0 + M
  Eigen::MatrixXd lowrank0;      // ground truth, rank r
  Eigen::MatrixXd perturbation;  // sparse M
  GraphLaplacian laplacian0;
  Adjacency adjacency0;
  Eigen::MatrixXd basis;         // p x r smooth basis P
  Eigen::MatrixXd coefficients;  // n x r coefficients Y
  std::uint64_t seed = 0;
  int rank = 0;
  int components = 0;  // connected components of the generating graph
};

enum class AmplitudeLaw { signed_unit, uniform };

struct PerturbationSpec {
  double density = 0.0;  // fraction of nonzero entries
  AmplitudeLaw law = AmplitudeLaw::signed_unit;
  double uniform_max = 1.0;  // c, for the uniform law
  bool signed_amplitudes = true;  // uniform law: apply a random sign
};

// Low-rank ground truth: random q-graph, r smallest-eigenvalue eigenvectors
// as basis, coefficients i.i.d. Normal(mu, 1/p). M is left zero.
SyntheticDataset generate_lowrank(int p, int n, int r, double q, double mu, Rng& rng);

Eigen::MatrixXd generate_perturbation(int p, int n, const PerturbationSpec& spec, Rng& rng);

// L0 plus a sparse distortion drawn like generate_perturbation.
Eigen::MatrixXd distort_lowrank(const Eigen::MatrixXd& lowrank0, const PerturbationSpec& spec,
                                Rng& rng);

// ||estimate - truth||_F / ||truth||_F. Throws on zero-norm truth.
double rel_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

int connected_components(const Adjacency& w);

}  // namespace lge
