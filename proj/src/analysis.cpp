#include "lge/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "lge/kernels.hpp"
#include "lge/rng.hpp"

namespace lge {

IterateSnapshot make_snapshot(const SyntheticDataset& ds, const SolverConfig& cfg, int k) {
  if (k < 0) throw std::invalid_argument("make_snapshot: k must be >= 0");
  IterateSnapshot snap;
  snap.x = ds.x;
  snap.phi0 = ds.laplacian0;
  snap.cfg = cfg;
  snap.lowrank0 = ds.lowrank0;
  snap.seed = ds.seed;
  snap.k = k;
  snap.state = Step1State::zeros(ds.x.rows(), ds.x.cols());
  for (int i = 0; i < k; ++i) step1_iterate_once(snap.x, snap.phi0, cfg, snap.state);
  return snap;
}

RolloutResult two_step_rollout(const IterateSnapshot& snap, const GraphLaplacian& phi_tilde) {
  Step1State state = snap.state;
  step1_iterate_once(snap.x, phi_tilde, snap.cfg, state);
  step1_iterate_once(snap.x, phi_tilde, snap.cfg, state);
  RolloutResult res;
  res.lerr_empirical = (state.lowrank - snap.lowrank0).norm();
  res.lowrank_k2 = std::move(state.lowrank);
  return res;
}

AbcMatrices abc_matrices(const IterateSnapshot& snap) {
  const SolverConfig& cfg = snap.cfg;
  const double rs = cfg.r1 + cfg.r2;

  // One distortion-free half-iteration: J, L, M at level k+1. These do not
  // touch the graph, so they are unaffected by any distortion.
  Eigen::MatrixXd j1 = step1_next_j(snap.x, snap.state, cfg);
  Eigen::MatrixXd l1 = svt(j1, cfg.tau1());
  Eigen::MatrixXd m1 = soft_threshold_matrix(snap.x - l1 + snap.state.z1 / cfg.r1, cfg.tau2());

  AbcMatrices abc;
  // Expanding the dual updates puts +z1+z2 in the numerator of the J
  // average; the collected form flips that sign by mistake.
  abc.a = (2.0 * cfg.r1 / rs) * (snap.x - m1) - l1 + (snap.state.z1 + snap.state.z2) / rs;
  abc.b = (2.0 * cfg.r2 * cfg.r2 / rs) * (l1 - snap.state.z2 / cfg.r2);

  Eigen::MatrixXd scaled = (cfg.gamma / cfg.r2) * snap.phi0.matrix;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(scaled.rows(), scaled.cols());
  abc.c = (eye - scaled + scaled * scaled) / cfg.r2;
  return abc;
}

std::vector<JRecord> collect_j_records(const IterateSnapshot& snap, int count) {
  std::vector<JRecord> records;
  Step1State state = snap.state;
  for (int i = 0; i < count; ++i) {
    records.push_back(singular_values(step1_next_j(snap.x, state, snap.cfg)));
    step1_iterate_once(snap.x, snap.phi0, snap.cfg, state);
  }
  return records;
}

ApproxParams estimate_gh(const std::vector<JRecord>& records, const SolverConfig& cfg,
                         int rank_k, int p) {
  if (records.empty()) throw std::invalid_argument("estimate_gh: no iterates");
  const double tau1 = cfg.tau1();

  double g_sum = 0.0;
  double small_sum = 0.0;
  int small_count = 0;
  for (const auto& s : records) {
    double fro = s.norm();
    double nuc = s.sum();
    int rank = 0;
    double floor_val = s.size() > 0 ? 1e-8 * s(0) : 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > floor_val) ++rank;
    g_sum += (fro > 0.0 && rank > 0) ? nuc / (std::sqrt(static_cast<double>(rank)) * fro) : 1.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) <= tau1) {
        small_sum += s(i);
        ++small_count;
      }
    }
  }

  ApproxParams params;
  params.tau1 = tau1;
  params.rank_k = rank_k;
  params.g = g_sum / static_cast<double>(records.size());
  params.h = (small_count > 0 && small_sum > 0.0)
                 ? tau1 / (small_sum / static_cast<double>(small_count))
                 : 2.0;  // mean of U(0, tau1)
  params.m = tau1 * tau1 * rank_k + (tau1 * tau1 / params.h) * (p - rank_k);
  return params;
}

double approx_frobenius_sq(const Eigen::MatrixXd& j, const ApproxParams& params) {
  MatrixNorms n = norms(j);
  return n.frobenius * n.frobenius - 2.0 * params.tau1 * n.nuclear + params.m;
}

ApproxFrobenius approx_lowrank_frobenius(double f_norm, const ApproxParams& params, int p) {
  double radicand = f_norm * f_norm -
                    2.0 * params.tau1 * params.g * std::sqrt(static_cast<double>(p)) * f_norm +
                    params.m;
  ApproxFrobenius out;
  if (radicand < 0.0) {
    out.clamped = true;
    out.value = 0.0;
  } else {
    out.value = std::sqrt(radicand);
  }
  return out;
}

ApproxFrobenius lerr_analytic(const AbcMatrices& abc, const Eigen::MatrixXd& delta_phi,
                              const ApproxParams& params, double gamma, double norm_l0) {
  double f_norm = (abc.a + abc.c * abc.b - gamma * abc.c * delta_phi * abc.c * abc.b).norm();
  ApproxFrobenius out = approx_lowrank_frobenius(f_norm, params, static_cast<int>(abc.c.rows()));
  out.value = std::abs(out.value - norm_l0);
  return out;
}

std::vector<SweepRow> sensitivity_sweep(const SyntheticDataset& base, const SolverConfig& cfg,
                                        const std::vector<double>& gammas,
                                        const std::vector<double>& s_grid,
                                        const std::vector<int>& k_points, int seeds,
                                        std::uint64_t master_seed) {
  if (seeds < 1) throw std::invalid_argument("sensitivity_sweep: need >= 1 seed");
  const double norm_l0 = base.lowrank0.norm();
  const double norm_phi0 = base.laplacian0.matrix.norm();
  const int p = static_cast<int>(base.x.rows());

  std::vector<SweepRow> rows;
  for (size_t gi = 0; gi < gammas.size(); ++gi) {
    SolverConfig c = cfg;
    c.gamma = gammas[gi];
    for (size_t ki = 0; ki < k_points.size(); ++ki) {
      IterateSnapshot snap = make_snapshot(base, c, k_points[ki]);
      AbcMatrices abc = abc_matrices(snap);
      ApproxParams params = estimate_gh(collect_j_records(snap, 2), c,
                                        rank_by_tolerance(snap.state.lowrank, 1e-8), p);
      for (size_t si = 0; si < s_grid.size(); ++si) {
        SweepRow row;
        row.gamma = gammas[gi];
        row.s = s_grid[si];
        row.k = k_points[ki];
        row.seeds = seeds;
        for (int seed = 0; seed < seeds; ++seed) {
          // Distortions depend only on (s, seed): all gammas and k points
          // see the same distorted graphs.
          Rng rng = make_rng(derive_seed(master_seed, si * static_cast<size_t>(seeds) + seed));
          GraphLaplacian phi_tilde = distort_laplacian(
              base.laplacian0, {s_grid[si], DistortionMode::topology}, rng);
          Eigen::MatrixXd dphi = phi_tilde.matrix - base.laplacian0.matrix;
          row.rel_graph_distortion += dphi.norm() / norm_phi0;
          row.lerr_empirical_rel += two_step_rollout(snap, phi_tilde).lerr_empirical / norm_l0;
          row.lerr_analytic_rel +=
              lerr_analytic(abc, dphi, params, c.gamma, norm_l0).value / norm_l0;
        }
        row.rel_graph_distortion /= seeds;
        row.lerr_empirical_rel /= seeds;
        row.lerr_analytic_rel /= seeds;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace lge
