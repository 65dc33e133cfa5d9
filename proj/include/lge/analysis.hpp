#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lge/solver.hpp"
#include "lge/synth.hpp"

namespace lge {

// State of a distortion-free step-1 run captured after k iterations,
// together with everything needed to continue or analyze it.
struct IterateSnapshot {
  Step1State state;
  Eigen::MatrixXd x;
  GraphLaplacian phi0;
  SolverConfig cfg;
  Eigen::MatrixXd lowrank0;  // ground truth, for the error metric
  std::uint64_t seed = 0;
  int k = 0;
};

IterateSnapshot make_snapshot(const SyntheticDataset& ds, const SolverConfig& cfg, int k);

struct RolloutResult {
  Eigen::MatrixXd lowrank_k2;   // L after two more iterations
  double lerr_empirical = 0.0;  // ||L^(k+2) - L0||_F
};

// Exactly two ADMM iterations from the snapshot, using phi_tilde in the
// K-updates. Bit-identical to warm-starting step1_lowrank for two iterations.
RolloutResult two_step_rollout(const IterateSnapshot& snap, const GraphLaplacian& phi_tilde);

struct AbcMatrices {
  Eigen::MatrixXd a;  // p x n
  Eigen::MatrixXd b;  // p x n
  Eigen::MatrixXd c;  // p x p, truncated Neumann series of (gamma*Phi0 + r2 I)^-1
};

// Distortion-independent pieces of the two-iteration propagation:
// J^(k+2) ~ A + [gamma(Phi0 + dPhi) + r2 I]^-1 B, with the inverse
// approximated by C - gamma * C * dPhi * C.
AbcMatrices abc_matrices(const IterateSnapshot& snap);

struct ApproxParams {
  double g = 1.0;      // nuclear-norm tightening factor
  double h = 2.0;      // small-singular-value averaging factor
  double m = 0.0;      // constant offset
  double tau1 = 1.0;
  int rank_k = 0;      // rank of L at the snapshot
};

// One sampled iterate: the singular values of a J matrix.
using JRecord = Eigen::VectorXd;

// g = mean ||J||_* / (sqrt(rank J) ||J||_F); h = tau1 / mean(sigma <= tau1),
// falling back to 2 (mean of U(0,tau1)) when no singular value is below tau1.
ApproxParams estimate_gh(const std::vector<JRecord>& records, const SolverConfig& cfg,
                         int rank_k, int p);

// Singular values of the J matrices of `count` undistorted iterations
// continued from the snapshot.
std::vector<JRecord> collect_j_records(const IterateSnapshot& snap, int count);

// ||J||_F^2 - 2 tau1 ||J||_* + m  (the SVD-free surrogate of ||SVT(J)||_F^2).
double approx_frobenius_sq(const Eigen::MatrixXd& j, const ApproxParams& params);

struct ApproxFrobenius {
  double value = 0.0;
  bool clamped = false;  // negative radicand clamped to zero
};

// (F^2 - 2 tau1 g sqrt(p) F + m)^(1/2) for F = ||A + CB - gamma C dPhi C B||_F.
ApproxFrobenius approx_lowrank_frobenius(double f_norm, const ApproxParams& params, int p);

// | approx ||L^(k+2)||_F  -  ||L0||_F |
ApproxFrobenius lerr_analytic(const AbcMatrices& abc, const Eigen::MatrixXd& delta_phi,
                              const ApproxParams& params, double gamma, double norm_l0);

struct SweepRow {
  double gamma = 0.0;
  double s = 0.0;
  int k = 0;
  double rel_graph_distortion = 0.0;
  double lerr_empirical_rel = 0.0;
  double lerr_analytic_rel = 0.0;
  int seeds = 0;
};

// Distortion sweep over (gamma, s, k): topology-mode graph distortion,
// empirical two-step rollout vs the analytic surrogate, averaged over seeds.
std::vector<SweepRow> sensitivity_sweep(const SyntheticDataset& base, const SolverConfig& cfg,
                                        const std::vector<double>& gammas,
                                        const std::vector<double>& s_grid,
                                        const std::vector<int>& k_points, int seeds,
                                        std::uint64_t master_seed);

}  // namespace lge
