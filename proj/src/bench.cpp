#include "lge/bench.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lge/rng.hpp"

namespace lge {

void run_parallel(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  int nthreads = std::min(jobs, count);
  threads.reserve(static_cast<size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

SyntheticDataset make_dataset(const BenchProtocol& proto, double density, AmplitudeLaw law,
                              double uniform_max, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  SyntheticDataset ds = generate_lowrank(proto.p, proto.n, proto.r, proto.q, proto.mu, rng);
  ds.seed = seed;
  if (density > 0.0) {
    PerturbationSpec spec;
    spec.density = density;
    spec.law = law;
    spec.uniform_max = uniform_max;
    ds.perturbation = generate_perturbation(proto.p, proto.n, spec, rng);
    ds.x = ds.lowrank0 + ds.perturbation;
  }
  return ds;
}

// Each (cell, seed) pair writes into its own slot; aggregation afterwards is
// sequential, so results do not depend on the number of jobs.

std::vector<Table2Row> table2_run(const BenchProtocol& proto, const SolverConfig& cfg,
                                  const std::vector<double>& d_grid, int seeds,
                                  std::uint64_t master_seed, int jobs) {
  const int nd = static_cast<int>(d_grid.size());
  struct Sample {
    double gt, knn, rp;
  };
  std::vector<Sample> samples(static_cast<size_t>(nd) * seeds);
  run_parallel(nd * seeds, jobs, [&](int cell) {
    const int di = cell / seeds;
    SyntheticDataset ds = make_dataset(proto, d_grid[static_cast<size_t>(di)],
                                       AmplitudeLaw::signed_unit, 1.0,
                                       derive_seed(master_seed, static_cast<std::uint64_t>(cell)));
    LgeSolution gt = lge(ds.x, ds.laplacian0, cfg);
    GraphLaplacian knn_phi = laplacian_from_adjacency(knn_graph(ds.x, proto.knn_k));
    LgeSolution knn = lge(ds.x, knn_phi, cfg);
    RpcaResult rp = rpca(ds.x, cfg.delta, cfg);
    samples[static_cast<size_t>(cell)] = {rel_error(gt.lowrank, ds.lowrank0),
                                          rel_error(knn.lowrank, ds.lowrank0),
                                          rel_error(rp.lowrank, ds.lowrank0)};
  });
  std::vector<Table2Row> rows(nd);
  for (int di = 0; di < nd; ++di) {
    rows[static_cast<size_t>(di)].d = d_grid[static_cast<size_t>(di)];
    for (int s = 0; s < seeds; ++s) {
      const Sample& smp = samples[static_cast<size_t>(di * seeds + s)];
      rows[static_cast<size_t>(di)].lge_groundtruth += smp.gt / seeds;
      rows[static_cast<size_t>(di)].lge_knn += smp.knn / seeds;
      rows[static_cast<size_t>(di)].rpca += smp.rp / seeds;
    }
  }
  return rows;
}

Table3Result table3_run(const BenchProtocol& proto, const SolverConfig& cfg, double d, int seeds,
                        std::uint64_t master_seed, int jobs) {
  struct Sample {
    double lge_l, lge_phi, rp;
  };
  std::vector<Sample> samples(static_cast<size_t>(seeds));
  run_parallel(seeds, jobs, [&](int seed_idx) {
    SyntheticDataset ds =
        make_dataset(proto, d, AmplitudeLaw::signed_unit, 1.0,
                     derive_seed(master_seed, static_cast<std::uint64_t>(seed_idx)));
    LgeSolution sol = lge(ds.x, ds.laplacian0, cfg);
    RpcaResult rp = rpca(ds.x, cfg.delta, cfg);
    samples[static_cast<size_t>(seed_idx)] = {
        rel_error(sol.lowrank, ds.lowrank0),
        rel_error(sol.laplacian.matrix, ds.laplacian0.matrix),
        rel_error(rp.lowrank, ds.lowrank0)};
  });
  Table3Result res;
  res.d = d;
  for (const auto& smp : samples) {
    res.lge_lowrank_err += smp.lge_l / seeds;
    res.lge_graph_err += smp.lge_phi / seeds;
    res.rpca_lowrank_err += smp.rp / seeds;
  }
  return res;
}

std::vector<Step1DistortionRow> step1_distortion_run(const BenchProtocol& proto,
                                                     const SolverConfig& cfg, double density,
                                                     int seeds, std::uint64_t master_seed,
                                                     int jobs) {
  struct Cell {
    DistortionMode mode;
    double s;
  };
  std::vector<Cell> cells;
  for (double s = 0.02; s <= 0.650001; s += 0.09)
    cells.push_back({DistortionMode::weights_only, s});
  for (double s = 0.05; s <= 0.300001; s += 0.05)
    cells.push_back({DistortionMode::topology, s});

  struct Sample {
    double dist, err;
  };
  // Paired design: each replicate reuses one dataset and one distortion
  // stream across the whole curve, so only the distortion level varies
  // between adjacent cells.
  std::vector<Sample> samples(cells.size() * static_cast<size_t>(seeds));
  run_parallel(static_cast<int>(cells.size()) * seeds, jobs, [&](int cell) {
    const size_t ci = static_cast<size_t>(cell / seeds);
    const std::uint64_t rep = static_cast<std::uint64_t>(cell % seeds);
    const std::uint64_t curve = cells[ci].mode == DistortionMode::topology ? 1 : 0;
    SyntheticDataset ds =
        make_dataset(proto, density, AmplitudeLaw::signed_unit, 1.0, derive_seed(master_seed, rep));
    Rng rng = make_rng(derive_seed(master_seed ^ 0x5eedULL, (curve << 8) + rep));
    GraphLaplacian phi_tilde =
        distort_laplacian(ds.laplacian0, {cells[ci].s, cells[ci].mode}, rng);
    Step1Result s1 = step1_lowrank(ds.x, phi_tilde, cfg);
    samples[static_cast<size_t>(cell)] = {
        (phi_tilde.matrix - ds.laplacian0.matrix).norm() / ds.laplacian0.matrix.norm(),
        rel_error(s1.state.lowrank, ds.lowrank0)};
  });
  std::vector<Step1DistortionRow> rows(cells.size());
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    rows[ci].mode = cells[ci].mode;
    rows[ci].s = cells[ci].s;
    for (int s = 0; s < seeds; ++s) {
      const Sample& smp = samples[ci * static_cast<size_t>(seeds) + static_cast<size_t>(s)];
      rows[ci].rel_graph_distortion += smp.dist / seeds;
      rows[ci].lowrank_err += smp.err / seeds;
    }
  }
  return rows;
}

std::vector<Step2DistortionRow> step2_distortion_run(const BenchProtocol& proto,
                                                     const SolverConfig& cfg, int seeds,
                                                     std::uint64_t master_seed, int jobs) {
  struct Cell {
    AmplitudeLaw law;
    double param;
  };
  std::vector<Cell> cells;
  for (double u = 0.05; u <= 0.100001; u += 0.01)
    cells.push_back({AmplitudeLaw::signed_unit, u});
  for (double c = 0.1; c <= 1.000001; c += 0.1)
    cells.push_back({AmplitudeLaw::uniform, c});

  struct Sample {
    double dist, err;
  };
  // Same paired design as the step-1 sweep.
  std::vector<Sample> samples(cells.size() * static_cast<size_t>(seeds));
  run_parallel(static_cast<int>(cells.size()) * seeds, jobs, [&](int cell) {
    const size_t ci = static_cast<size_t>(cell / seeds);
    const std::uint64_t rep = static_cast<std::uint64_t>(cell % seeds);
    const Cell& c = cells[ci];
    const std::uint64_t curve = c.law == AmplitudeLaw::uniform ? 1 : 0;
    SyntheticDataset ds =
        make_dataset(proto, 0.0, AmplitudeLaw::signed_unit, 1.0, derive_seed(master_seed, rep));
    Rng rng = make_rng(derive_seed(master_seed ^ 0xd157ULL, (curve << 8) + rep));
    Eigen::MatrixXd distorted;
    if (c.law == AmplitudeLaw::signed_unit) {
      // Nested coupling: one (support, sign) draw per replicate, thresholded
      // by the density, so the perturbation grows with the parameter.
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      distorted = ds.lowrank0;
      for (Eigen::Index i = 0; i < distorted.rows(); ++i)
        for (Eigen::Index j = 0; j < distorted.cols(); ++j) {
          double u = unit(rng);
          double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
          if (u < c.param) distorted(i, j) += sign;
        }
    } else {
      PerturbationSpec spec;
      spec.density = 0.2;
      spec.law = AmplitudeLaw::uniform;
      spec.uniform_max = c.param;
      distorted = distort_lowrank(ds.lowrank0, spec, rng);
    }
    Step2Result s2 = step2_graph(distorted, cfg);
    samples[static_cast<size_t>(cell)] = {rel_error(distorted, ds.lowrank0),
                                          rel_error(s2.phi.matrix, ds.laplacian0.matrix)};
  });
  std::vector<Step2DistortionRow> rows(cells.size());
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    rows[ci].law = cells[ci].law;
    rows[ci].param = cells[ci].param;
    for (int s = 0; s < seeds; ++s) {
      const Sample& smp = samples[ci * static_cast<size_t>(seeds) + static_cast<size_t>(s)];
      rows[ci].rel_lowrank_distortion += smp.dist / seeds;
      rows[ci].graph_err += smp.err / seeds;
    }
  }
  return rows;
}

}  // namespace lge
