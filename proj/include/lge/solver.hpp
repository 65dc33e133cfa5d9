#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lge/graph.hpp"

namespace lge {

struct SolverConfig {
  double gamma = 1.0;   // graph smoothness weight
  double delta = 0.5;   // sparsity weight
  double beta = 1.0;    // Laplacian Frobenius weight
  double r1 = 1.0;      // ADMM step size (X = L + M constraint)
  double r2 = 1.0;      // ADMM step size (L = K constraint)
  double rho = 1.0;     // step-2 Lagrangian parameter
  double step1_tol = 1e-6;
  double step2_tol = 1e-6;
  double outer_tol = 1e-6;
  int step1_max_iter = 500;
  int step2_max_iter = 500;
  int outer_max_iter = 20;
  // Compatibility switches; defaults follow the dimensionally consistent
  // update and the diminishing 1/k dual step.
  bool printed_phi_denominator = false;  // use beta/2 + rho instead of 2*beta + rho
  bool constant_dual_step = false;       // dual step rho instead of 1/k

  double tau1() const { return 2.0 / (r1 + r2); }
  double tau2() const { return delta / r1; }
  void validate() const;
};

struct Step1State {
  Eigen::MatrixXd lowrank;  // L
  Eigen::MatrixXd sparse;   // M
  Eigen::MatrixXd aux;      // K
  Eigen::MatrixXd z1;
  Eigen::MatrixXd z2;
  int iteration = 0;

  static Step1State zeros(Eigen::Index p, Eigen::Index n);
};

struct Step1TraceRow {
  int iteration = 0;
  double feasibility = 0.0;  // ||X - L - M||_F / ||X||_F
  double split_gap = 0.0;    // ||K - L||_F / max(1, ||L||_F)
};

struct Step1Result {
  Step1State state;
  std::vector<Step1TraceRow> trace;
  bool converged = false;
};

// The J-average of the next iteration, given the current state.
Eigen::MatrixXd step1_next_j(const Eigen::MatrixXd& x, const Step1State& state,
                             const SolverConfig& cfg);

// One in-place ADMM iteration (J, L, M, K, z1, z2 updates in order).
void step1_iterate_once(const Eigen::MatrixXd& x, const GraphLaplacian& phi,
                        const SolverConfig& cfg, Step1State& state);

// Graph-regularized robust decomposition X = L + M for a fixed Laplacian.
Step1Result step1_lowrank(const Eigen::MatrixXd& x, const GraphLaplacian& phi,
                          const SolverConfig& cfg,
                          const std::optional<Step1State>& warm = std::nullopt);

struct Step2State {
  Eigen::MatrixXd z;
  Eigen::MatrixXd dual;  // u
  int iteration = 0;
};

struct Step2TraceRow {
  int iteration = 0;
  double residual = 0.0;  // ||z - Phi||_F / max(1, ||Phi||_F)
};

struct Step2Result {
  GraphLaplacian phi;  // the feasible z-iterate
  Step2State state;
  std::vector<Step2TraceRow> trace;
  bool converged = false;
};

// Laplacian refinement for a fixed low-rank estimate.
Step2Result step2_graph(const Eigen::MatrixXd& lowrank, const SolverConfig& cfg,
                        const std::optional<Step2State>& warm = std::nullopt);

double lge_objective(const Eigen::MatrixXd& lowrank, const Eigen::MatrixXd& sparse,
                     const Eigen::MatrixXd& phi, const SolverConfig& cfg);

struct LgeTraceRow {
  int outer_iter = 0;
  double objective = 0.0;
  double step1_residual = 0.0;
  double step2_residual = 0.0;
  int rank_lowrank = 0;
};

struct LgeSolution {
  Eigen::MatrixXd lowrank;
  Eigen::MatrixXd sparse;
  GraphLaplacian laplacian;
  std::vector<LgeTraceRow> trace;
  bool converged = false;        // outer loop reached its stopping rule
  bool step1_converged = false;  // last inner step-1 run converged
};

// Alternates step1_lowrank and step2_graph from phi_init.
LgeSolution lge(const Eigen::MatrixXd& x, const GraphLaplacian& phi_init,
                const SolverConfig& cfg);

struct RpcaResult {
  Eigen::MatrixXd lowrank;
  Eigen::MatrixXd sparse;
  std::vector<Step1TraceRow> trace;
  bool converged = false;
};

// Classic robust PCA: the same ADMM with gamma = 0 and no graph.
RpcaResult rpca(const Eigen::MatrixXd& x, double delta, const SolverConfig& cfg);

}  // namespace lge
