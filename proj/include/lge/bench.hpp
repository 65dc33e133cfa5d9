#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lge/solver.hpp"
#include "lge/synth.hpp"

namespace lge {

// Synthetic benchmark protocols: p=30 node graphs with q=0.3, rank-3
// low-rank ground truth, n=50 samples, signed-unit sparse perturbations,
// results averaged over seeds. Every cell is seeded from (master_seed,
// cell index) so grids can grow without perturbing existing cells.

struct BenchProtocol {
  int p = 30;
  int n = 50;
  int r = 3;
  double q = 0.3;
  double mu = 0.0;
  int knn_k = 5;
};

SyntheticDataset make_dataset(const BenchProtocol& proto, double density, AmplitudeLaw law,
                              double uniform_max, std::uint64_t seed);

struct Table2Row {
  double d = 0.0;
  double lge_groundtruth = 0.0;
  double lge_knn = 0.0;
  double rpca = 0.0;
};

std::vector<Table2Row> table2_run(const BenchProtocol& proto, const SolverConfig& cfg,
                                  const std::vector<double>& d_grid, int seeds,
                                  std::uint64_t master_seed, int jobs = 1);

struct Table3Result {
  double d = 0.0;
  double lge_lowrank_err = 0.0;
  double lge_graph_err = 0.0;
  double rpca_lowrank_err = 0.0;
};

Table3Result table3_run(const BenchProtocol& proto, const SolverConfig& cfg, double d, int seeds,
                        std::uint64_t master_seed, int jobs = 1);

struct Step1DistortionRow {
  DistortionMode mode = DistortionMode::weights_only;
  double s = 0.0;
  double rel_graph_distortion = 0.0;
  double lowrank_err = 0.0;
};

// Step-1 in isolation under a distorted input graph (data perturbation
// density fixed at `density`).
std::vector<Step1DistortionRow> step1_distortion_run(const BenchProtocol& proto,
                                                     const SolverConfig& cfg, double density,
                                                     int seeds, std::uint64_t master_seed,
                                                     int jobs = 1);

struct Step2DistortionRow {
  AmplitudeLaw law = AmplitudeLaw::signed_unit;
  double param = 0.0;  // u for signed_unit, c for uniform
  double rel_lowrank_distortion = 0.0;
  double graph_err = 0.0;
};

// Step-2 in isolation with distorted low-rank inputs: (a) signed-unit
// amplitudes, u in [0.05, 0.1]; (b) U(0,c) amplitudes at fixed u = 0.2.
std::vector<Step2DistortionRow> step2_distortion_run(const BenchProtocol& proto,
                                                     const SolverConfig& cfg, int seeds,
                                                     std::uint64_t master_seed, int jobs = 1);

// Runs fn(0..count-1), fanning out over at most `jobs` threads; exceptions
// are rethrown on the caller thread.
void run_parallel(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace lge
