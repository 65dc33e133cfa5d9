#pragma once

#include <Eigen/Dense>

#include "lge/rng.hpp"

namespace lge {

// Symmetric nonnegative weight matrix with zero diagonal.
struct Adjacency {
  Eigen::MatrixXd weights;
};

// Member of the valid-Laplacian set: symmetric, nonpositive off-diagonals,
// zero row sums (hence PSD).
struct GraphLaplacian {
  Eigen::MatrixXd matrix;
};

struct SmoothBasis {
  Eigen::MatrixXd vectors;      // p x r, orthonormal columns
  Eigen::VectorXd eigenvalues;  // non-decreasing
};

enum class DistortionMode { weights_only, topology };

struct LaplacianDistortion {
  double probability = 0.0;  // per-edge / per-pair Bernoulli probability
  DistortionMode mode = DistortionMode::weights_only;
};

// Phi = D - W. Throws std::invalid_argument if W is asymmetric, has a
// nonzero diagonal or negative weights.
GraphLaplacian laplacian_from_adjacency(const Adjacency& w);

// Recover W = -offdiag(Phi); inverse of laplacian_from_adjacency on valid input.
Adjacency adjacency_from_laplacian(const GraphLaplacian& phi);

bool is_valid_laplacian(const Eigen::MatrixXd& m, double tol);

// Symmetrize, clip off-diagonals at zero, rebuild the diagonal from the
// negated off-diagonal row sums. Idempotent; fixes every valid Laplacian.
GraphLaplacian project_to_laplacian_set(const Eigen::MatrixXd& m);

// Erdos-Renyi style graph: each pair connected with probability q,
// connected-edge weights drawn U(0,1).
Adjacency random_weighted_graph(int p, double q, Rng& rng);

// Eigenvectors of the r smallest eigenvalues of Phi.
SmoothBasis smooth_basis(const GraphLaplacian& phi, int r);

// k nearest neighbors between rows of X (Euclidean), symmetrized by union,
// Gaussian kernel weights with median-pairwise-distance bandwidth.
Adjacency knn_graph(const Eigen::MatrixXd& x, int k);

// Adds Bernoulli(s) perturbations with U(0,1) amplitude to off-diagonal
// entries (subtracting the amplitude, i.e. adding edge weight), then
// re-projects into the valid-Laplacian set. weights_only preserves the zero
// pattern of phi0; topology perturbs every off-diagonal pair.
GraphLaplacian distort_laplacian(const GraphLaplacian& phi0, const LaplacianDistortion& d,
                                 Rng& rng);

// Coherence connectivity between channels (rows of `series`, sampled at fs
// Hz): band filter to f +- 5 Hz, Morlet convolution at f, then the
// normalized complex inner product of the analytic signals. Entries in
// [0,1]; zero-energy channels get zero edges.
Adjacency coherence_adjacency(const Eigen::MatrixXd& series, double f, double fs);

}  // namespace lge
