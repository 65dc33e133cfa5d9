#include "lge/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "lge/kernels.hpp"

namespace lge {

void SolverConfig::validate() const {
  if (gamma < 0 || delta < 0 || beta < 0) throw std::invalid_argument("config: weights must be >= 0");
  if (r1 <= 0 || r2 <= 0 || rho <= 0) throw std::invalid_argument("config: step sizes must be > 0");
  if (step1_tol <= 0 || step2_tol <= 0 || outer_tol <= 0)
    throw std::invalid_argument("config: tolerances must be > 0");
  if (step1_max_iter < 1 || step2_max_iter < 1 || outer_max_iter < 1)
    throw std::invalid_argument("config: iteration caps must be >= 1");
}

Step1State Step1State::zeros(Eigen::Index p, Eigen::Index n) {
  Step1State s;
  s.lowrank = Eigen::MatrixXd::Zero(p, n);
  s.sparse = Eigen::MatrixXd::Zero(p, n);
  s.aux = Eigen::MatrixXd::Zero(p, n);
  s.z1 = Eigen::MatrixXd::Zero(p, n);
  s.z2 = Eigen::MatrixXd::Zero(p, n);
  s.iteration = 0;
  return s;
}

Eigen::MatrixXd step1_next_j(const Eigen::MatrixXd& x, const Step1State& state,
                             const SolverConfig& cfg) {
  return (cfg.r1 * (x - state.sparse + state.z1 / cfg.r1) +
          cfg.r2 * (state.aux + state.z2 / cfg.r2)) /
         (cfg.r1 + cfg.r2);
}

void step1_iterate_once(const Eigen::MatrixXd& x, const GraphLaplacian& phi,
                        const SolverConfig& cfg, Step1State& state) {
  Eigen::MatrixXd j = step1_next_j(x, state, cfg);
  state.lowrank = svt(j, cfg.tau1());
  state.sparse = soft_threshold_matrix(x - state.lowrank + state.z1 / cfg.r1, cfg.tau2());
  // (gamma*Phi + r2*I) is SPD for r2 > 0 and Phi PSD.
  Eigen::MatrixXd sys = cfg.gamma * phi.matrix;
  sys.diagonal().array() += cfg.r2;
  state.aux = cfg.r2 * sys.llt().solve(state.lowrank - state.z2 / cfg.r2);
  state.z1 += cfg.r1 * (x - state.lowrank - state.sparse);
  state.z2 += cfg.r2 * (state.aux - state.lowrank);
  ++state.iteration;
}

Step1Result step1_lowrank(const Eigen::MatrixXd& x, const GraphLaplacian& phi,
                          const SolverConfig& cfg, const std::optional<Step1State>& warm) {
  cfg.validate();
  if (phi.matrix.rows() != x.rows())
    throw std::invalid_argument("step1_lowrank: graph size does not match rows of X");

  Step1Result res;
  res.state = warm ? *warm : Step1State::zeros(x.rows(), x.cols());
  const double xnorm = std::max(x.norm(), 1e-300);

  for (int it = 0; it < cfg.step1_max_iter; ++it) {
    step1_iterate_once(x, phi, cfg, res.state);
    if (!res.state.lowrank.allFinite() || !res.state.sparse.allFinite())
      throw std::runtime_error("step1_lowrank: divergence at iteration " +
                               std::to_string(res.state.iteration));
    Step1TraceRow row;
    row.iteration = res.state.iteration;
    row.feasibility = (x - res.state.lowrank - res.state.sparse).norm() / xnorm;
    row.split_gap =
        (res.state.aux - res.state.lowrank).norm() / std::max(1.0, res.state.lowrank.norm());
    res.trace.push_back(row);
    if (row.feasibility <= cfg.step1_tol && row.split_gap <= cfg.step1_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

Step2Result step2_graph(const Eigen::MatrixXd& lowrank, const SolverConfig& cfg,
                        const std::optional<Step2State>& warm) {
  cfg.validate();
  if (!lowrank.allFinite()) throw std::invalid_argument("step2_graph: non-finite input");
  if (cfg.beta <= 0 && cfg.rho <= 0)
    throw std::invalid_argument("step2_graph: objective is not coercive");

  const Eigen::Index p = lowrank.rows();
  Step2Result res;
  if (warm) {
    res.state = *warm;
  } else {
    res.state.z = Eigen::MatrixXd::Zero(p, p);
    res.state.dual = Eigen::MatrixXd::Zero(p, p);
    res.state.iteration = 0;
  }

  const Eigen::MatrixXd gram = cfg.gamma * (lowrank * lowrank.transpose());
  const double denom =
      cfg.printed_phi_denominator ? (0.5 * cfg.beta + cfg.rho) : (2.0 * cfg.beta + cfg.rho);

  Eigen::MatrixXd phi;
  for (int it = 0; it < cfg.step2_max_iter; ++it) {
    ++res.state.iteration;
    phi = (cfg.rho * res.state.z + res.state.dual - gram) / denom;
    res.state.z = project_to_laplacian_set(phi - res.state.dual / cfg.rho).matrix;
    double dual_step =
        cfg.constant_dual_step ? cfg.rho : 1.0 / static_cast<double>(res.state.iteration);
    res.state.dual += dual_step * (res.state.z - phi);
    if (!phi.allFinite())
      throw std::runtime_error("step2_graph: divergence at iteration " +
                               std::to_string(res.state.iteration));
    Step2TraceRow row;
    row.iteration = res.state.iteration;
    row.residual = (res.state.z - phi).norm() / std::max(1.0, phi.norm());
    res.trace.push_back(row);
    if (row.residual <= cfg.step2_tol) {
      res.converged = true;
      break;
    }
  }
  res.phi.matrix = res.state.z;  // feasible iterate
  return res;
}

double lge_objective(const Eigen::MatrixXd& lowrank, const Eigen::MatrixXd& sparse,
                     const Eigen::MatrixXd& phi, const SolverConfig& cfg) {
  MatrixNorms nl = norms(lowrank);
  double smooth = (lowrank.transpose() * phi * lowrank).trace();
  return nl.nuclear + cfg.delta * sparse.cwiseAbs().sum() + cfg.gamma * smooth +
         cfg.beta * phi.squaredNorm();
}

LgeSolution lge(const Eigen::MatrixXd& x, const GraphLaplacian& phi_init,
                const SolverConfig& cfg) {
  cfg.validate();
  LgeSolution sol;
  sol.laplacian = phi_init;

  std::optional<Step1State> warm1;
  std::optional<Step2State> warm2;
  double prev_objective = 0.0;

  for (int outer = 1; outer <= cfg.outer_max_iter; ++outer) {
    Step1Result s1 = step1_lowrank(x, sol.laplacian, cfg, warm1);
    sol.lowrank = s1.state.lowrank;
    sol.sparse = s1.state.sparse;
    sol.step1_converged = s1.converged;
    warm1 = s1.state;

    Step2Result s2 = step2_graph(sol.lowrank, cfg, warm2);
    sol.laplacian = s2.phi;
    warm2 = s2.state;

    LgeTraceRow row;
    row.outer_iter = outer;
    row.objective = lge_objective(sol.lowrank, sol.sparse, sol.laplacian.matrix, cfg);
    row.step1_residual = s1.trace.empty() ? 0.0 : s1.trace.back().feasibility;
    row.step2_residual = s2.trace.empty() ? 0.0 : s2.trace.back().residual;
    row.rank_lowrank = rank_by_tolerance(sol.lowrank, 1e-8);
    sol.trace.push_back(row);

    if (outer > 1 &&
        std::abs(prev_objective - row.objective) <= cfg.outer_tol * std::max(1.0, std::abs(prev_objective))) {
      sol.converged = true;
      break;
    }
    prev_objective = row.objective;
  }
  return sol;
}

RpcaResult rpca(const Eigen::MatrixXd& x, double delta, const SolverConfig& cfg) {
  if (delta <= 0) throw std::invalid_argument("rpca: delta must be > 0");
  SolverConfig c = cfg;
  c.gamma = 0.0;
  c.delta = delta;
  GraphLaplacian none{Eigen::MatrixXd::Zero(x.rows(), x.rows())};
  Step1Result s1 = step1_lowrank(x, none, c);
  RpcaResult res;
  res.lowrank = s1.state.lowrank;
  res.sparse = s1.state.sparse;
  res.trace = std::move(s1.trace);
  res.converged = s1.converged;
  return res;
}

}  // namespace lge
