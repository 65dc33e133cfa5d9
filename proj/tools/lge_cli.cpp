#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "lge/analysis.hpp"
#include "lge/bench.hpp"
#include "lge/config_io.hpp"
#include "lge/csv.hpp"
#include "lge/rng.hpp"
#include "lge/solver.hpp"
#include "lge/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

struct GlobalOpts {
  std::uint64_t seed = 42;
  int jobs = 1;
  bool fixed_threads = false;
  std::string out = ".";

  int effective_jobs() const { return fixed_threads ? 1 : jobs; }
};

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_manifest(const GlobalOpts& g, const std::string& command,
                    const lge::SolverConfig& cfg, lge::csv::KeyValues extra,
                    double wall_seconds) {
  lge::csv::KeyValues kv = std::move(extra);
  kv["command"] = command;
  kv["seed"] = std::to_string(g.seed);
  kv["jobs"] = std::to_string(g.effective_jobs());
  kv["fixed_threads"] = g.fixed_threads ? "true" : "false";
  kv["software_version"] = kVersion;
  kv["wall_time_seconds"] = fmt(wall_seconds);
  for (const auto& [k, v] : lge::solver_config_to_kv(cfg)) kv["config." + k] = v;
  lge::csv::write_key_values((fs::path(g.out) / "manifest.txt").string(), kv);
}

lge::SolverConfig load_config(const std::string& path_flag) {
  std::string path = path_flag;
  if (path.empty()) {
    if (const char* env = std::getenv("LGE_CONFIG")) path = env;
  }
  if (path.empty()) return lge::SolverConfig{};
  return lge::solver_config_from_kv(lge::csv::read_key_values(path));
}

std::string csv_path(const GlobalOpts& g, const std::string& name) {
  return (fs::path(g.out) / name).string();
}

void write_table(const GlobalOpts& g, const std::string& name, const std::string& header,
                 const std::vector<std::vector<double>>& rows) {
  std::string text = header + "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      text += fmt(row[i]);
      text += (i + 1 < row.size()) ? "," : "\n";
    }
  }
  lge::csv::write_text_atomic(csv_path(g, name), text);
}

void write_lge_trace(const GlobalOpts& g, const lge::LgeSolution& sol) {
  std::vector<std::vector<double>> rows;
  for (const auto& t : sol.trace) {
    rows.push_back({static_cast<double>(t.outer_iter), t.objective, t.step1_residual,
                    t.step2_residual, static_cast<double>(t.rank_lowrank)});
  }
  write_table(g, "trace.csv", "outer_iter,objective,step1_residual,step2_residual,rank_L", rows);
}

int cmd_gen(const GlobalOpts& g, int p, int n, int r, double q, double mu, double d,
            const std::string& amp, double c, bool positive_amps) {
  Timer timer;
  lge::Rng rng = lge::make_rng(g.seed);
  lge::SyntheticDataset ds = lge::generate_lowrank(p, n, r, q, mu, rng);
  ds.seed = g.seed;
  lge::PerturbationSpec spec;
  spec.density = d;
  spec.law = amp == "uniform" ? lge::AmplitudeLaw::uniform : lge::AmplitudeLaw::signed_unit;
  spec.uniform_max = c;
  spec.signed_amplitudes = !positive_amps;
  if (d > 0.0) {
    ds.perturbation = lge::generate_perturbation(p, n, spec, rng);
    ds.x = ds.lowrank0 + ds.perturbation;
  }

  fs::create_directories(g.out);
  lge::csv::write_matrix(csv_path(g, "X.csv"), ds.x);
  lge::csv::write_matrix(csv_path(g, "L0.csv"), ds.lowrank0);
  lge::csv::write_matrix(csv_path(g, "M.csv"), ds.perturbation);
  lge::csv::write_matrix(csv_path(g, "Phi0.csv"), ds.laplacian0.matrix);
  lge::csv::write_matrix(csv_path(g, "W0.csv"), ds.adjacency0.weights);
  lge::csv::write_matrix(csv_path(g, "P.csv"), ds.basis);
  lge::csv::write_matrix(csv_path(g, "Y.csv"), ds.coefficients);

  lge::csv::KeyValues extra{{"p", std::to_string(p)},
                            {"n", std::to_string(n)},
                            {"r", std::to_string(r)},
                            {"q", fmt(q)},
                            {"mu", fmt(mu)},
                            {"density", fmt(d)},
                            {"amplitude_law", amp},
                            {"uniform_max", fmt(c)},
                            {"signed_amplitudes", positive_amps ? "false" : "true"},
                            {"graph_components", std::to_string(ds.components)}};
  write_manifest(g, "gen", lge::SolverConfig{}, std::move(extra), timer.seconds());
  return 0;
}

int cmd_solve(const GlobalOpts& g, const std::string& x_path, const std::string& graph_path,
              int knn_k, const lge::SolverConfig& cfg) {
  Timer timer;
  Eigen::MatrixXd x = lge::csv::read_matrix(x_path);
  lge::GraphLaplacian phi_init;
  if (!graph_path.empty()) {
    Eigen::MatrixXd raw = lge::csv::read_matrix(graph_path);
    if (!lge::is_valid_laplacian(raw, 1e-6)) {
      // accept an adjacency matrix as the graph source as well
      phi_init = lge::laplacian_from_adjacency(lge::Adjacency{raw});
    } else {
      phi_init.matrix = raw;
    }
  } else {
    phi_init = lge::laplacian_from_adjacency(lge::knn_graph(x, knn_k));
  }

  lge::LgeSolution sol = lge::lge(x, phi_init, cfg);

  fs::create_directories(g.out);
  lge::csv::write_matrix(csv_path(g, "L.csv"), sol.lowrank);
  lge::csv::write_matrix(csv_path(g, "M.csv"), sol.sparse);
  lge::csv::write_matrix(csv_path(g, "Phi.csv"), sol.laplacian.matrix);
  write_lge_trace(g, sol);
  lge::csv::KeyValues extra{{"x", x_path},
                            {"graph", graph_path.empty() ? ("knn:" + std::to_string(knn_k))
                                                         : graph_path},
                            {"converged", sol.step1_converged && sol.converged ? "true" : "false"}};
  write_manifest(g, "solve", cfg, std::move(extra), timer.seconds());
  return (sol.step1_converged && sol.converged) ? 0 : 2;
}

int cmd_rpca(const GlobalOpts& g, const std::string& x_path, double delta,
             const lge::SolverConfig& cfg) {
  Timer timer;
  Eigen::MatrixXd x = lge::csv::read_matrix(x_path);
  lge::RpcaResult res = lge::rpca(x, delta, cfg);

  fs::create_directories(g.out);
  lge::csv::write_matrix(csv_path(g, "L.csv"), res.lowrank);
  lge::csv::write_matrix(csv_path(g, "M.csv"), res.sparse);
  std::vector<std::vector<double>> rows;
  for (const auto& t : res.trace)
    rows.push_back({static_cast<double>(t.iteration), t.feasibility, t.split_gap});
  write_table(g, "trace.csv", "iteration,feasibility,split_gap", rows);
  lge::SolverConfig used = cfg;
  used.gamma = 0.0;
  used.delta = delta;
  write_manifest(g, "rpca", used, {{"x", x_path}, {"converged", res.converged ? "true" : "false"}},
                 timer.seconds());
  return res.converged ? 0 : 2;
}

int cmd_sweep(const GlobalOpts& g, const std::string& kind, const lge::SolverConfig& cfg,
              int seeds, double density) {
  Timer timer;
  fs::create_directories(g.out);
  lge::BenchProtocol proto;
  const int jobs = g.effective_jobs();

  if (kind == "table2") {
    std::vector<double> d_grid;
    for (int i = 1; i <= 10; ++i) d_grid.push_back(i / 10.0);
    auto rows = lge::table2_run(proto, cfg, d_grid, seeds, g.seed, jobs);
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) out.push_back({r.d, r.lge_groundtruth, r.lge_knn, r.rpca});
    write_table(g, "table2.csv", "d,lge_groundtruth,lge_knn,rpca", out);
  } else if (kind == "table3") {
    auto res = lge::table3_run(proto, cfg, density, seeds, g.seed, jobs);
    write_table(g, "table3.csv", "d,lge_lowrank_err,lge_graph_err,rpca_lowrank_err",
                {{res.d, res.lge_lowrank_err, res.lge_graph_err, res.rpca_lowrank_err}});
  } else if (kind == "step1_distortion") {
    auto rows = lge::step1_distortion_run(proto, cfg, density, seeds, g.seed, jobs);
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) {
      out.push_back({r.mode == lge::DistortionMode::weights_only ? 0.0 : 1.0, r.s,
                     r.rel_graph_distortion, r.lowrank_err});
    }
    write_table(g, "step1_distortion.csv",
                "topology_mode,s,rel_graph_distortion,lowrank_err", out);
  } else if (kind == "step2_distortion") {
    auto rows = lge::step2_distortion_run(proto, cfg, seeds, g.seed, jobs);
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) {
      out.push_back({r.law == lge::AmplitudeLaw::signed_unit ? 0.0 : 1.0, r.param,
                     r.rel_lowrank_distortion, r.graph_err});
    }
    write_table(g, "step2_distortion.csv",
                "uniform_law,param,rel_lowrank_distortion,graph_err", out);
  } else if (kind == "sensitivity") {
    lge::BenchProtocol sens = proto;
    sens.r = 6;
    lge::SyntheticDataset base =
        lge::make_dataset(sens, density, lge::AmplitudeLaw::signed_unit, 1.0,
                          lge::derive_seed(g.seed, 0xba5eULL));
    std::vector<double> gammas{0.0, 0.5, 1.0, 2.0};
    std::vector<double> s_grid;
    for (int i = 1; i <= 100; ++i) s_grid.push_back(i / 100.0);
    std::vector<int> k_points{5, 11, 18};
    auto rows = lge::sensitivity_sweep(base, cfg, gammas, s_grid, k_points, seeds, g.seed);
    for (int k : k_points) {
      std::vector<std::vector<double>> out;
      for (const auto& r : rows) {
        if (r.k != k) continue;
        out.push_back({r.gamma, r.s, r.rel_graph_distortion, r.lerr_empirical_rel,
                       r.lerr_analytic_rel, static_cast<double>(r.k),
                       static_cast<double>(r.seeds)});
      }
      write_table(g, "sensitivity_k" + std::to_string(k) + ".csv",
                  "gamma,s,rel_graph_distortion,lerr_empirical_rel,lerr_analytic_rel,k,seeds",
                  out);
    }
  } else {
    std::cerr << "unknown sweep kind '" << kind
              << "'; valid kinds: table2, table3, step1_distortion, step2_distortion, "
                 "sensitivity\n";
    return 1;
  }

  write_manifest(g, "sweep", cfg,
                 {{"kind", kind}, {"seeds", std::to_string(seeds)}, {"density", fmt(density)}},
                 timer.seconds());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint low-rank component and connectivity-graph estimation"};
  app.set_version_flag("--version", std::string("lge ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough(true);  // global flags may appear after the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Concurrent sweep cells")->capture_default_str();
  app.add_flag("--fixed-threads", g.fixed_threads,
               "Force single-threaded execution for bitwise reproducibility");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  int p = 30, n = 50, r = 3;
  double q = 0.3, mu = 0.0, d = 0.1, c = 1.0;
  std::string amp = "signed_unit";
  bool positive_amps = false;
  gen->add_option("--p", p, "Graph nodes / data rows")->capture_default_str();
  gen->add_option("--n", n, "Samples / data columns")->capture_default_str();
  gen->add_option("--r", r, "Rank of the low-rank component")->capture_default_str();
  gen->add_option("--q", q, "Edge probability")->capture_default_str();
  gen->add_option("--mu", mu, "Coefficient mean")->capture_default_str();
  gen->add_option("--d", d, "Perturbation density")->capture_default_str();
  gen->add_option("--amp", amp, "Amplitude law: signed_unit or uniform")
      ->check(CLI::IsMember({"signed_unit", "uniform"}))
      ->capture_default_str();
  gen->add_option("--c", c, "Uniform amplitude bound")->capture_default_str();
  gen->add_flag("--positive-amplitudes", positive_amps,
                "Uniform law: draw positive amplitudes only");
  gen->add_option("--out", g.out, "Output directory")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Joint low-rank and graph estimation");
  std::string x_path, graph_path, config_path;
  int knn_k = 5;
  double gamma_override = -1, delta_override = -1, beta_override = -1;
  int outer_override = -1;
  solve->add_option("--x", x_path, "Input data matrix CSV")->required();
  auto* graph_opt = solve->add_option("--graph", graph_path, "Initial Laplacian (or adjacency) CSV");
  solve->add_option("--knn", knn_k, "Build the initial graph from k nearest neighbors")
      ->excludes(graph_opt)
      ->capture_default_str();
  solve->add_option("--config", config_path, "key=value solver config (env LGE_CONFIG)");
  solve->add_option("--gamma", gamma_override, "Override gamma");
  solve->add_option("--delta", delta_override, "Override delta");
  solve->add_option("--beta", beta_override, "Override beta");
  solve->add_option("--outer", outer_override, "Override outer iteration cap");
  solve->add_option("--out", g.out, "Output directory")->required();

  // rpca
  auto* rp = app.add_subcommand("rpca", "Robust PCA baseline (no graph)");
  std::string rpca_x, rpca_config;
  double rpca_delta = 0.5;
  rp->add_option("--x", rpca_x, "Input data matrix CSV")->required();
  rp->add_option("--delta", rpca_delta, "Sparsity weight")->capture_default_str();
  rp->add_option("--config", rpca_config, "key=value solver config");
  rp->add_option("--out", g.out, "Output directory")->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "Benchmark sweeps with CSV outputs");
  std::string kind, sweep_config;
  int seeds = 5;
  double density = 0.1;
  sw->add_option("--kind", kind,
                 "table2 | table3 | step1_distortion | step2_distortion | sensitivity")
      ->required();
  sw->add_option("--config", sweep_config, "key=value solver config");
  sw->add_option("--seeds", seeds, "Runs per cell")->capture_default_str();
  sw->add_option("--density", density, "Data perturbation density where applicable")
      ->capture_default_str();
  sw->add_option("--out", g.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors are exit 1; --help/--version are 0
  }

  try {
    if (gen->parsed()) return cmd_gen(g, p, n, r, q, mu, d, amp, c, positive_amps);
    if (solve->parsed()) {
      lge::SolverConfig cfg = load_config(config_path);
      if (gamma_override >= 0) cfg.gamma = gamma_override;
      if (delta_override >= 0) cfg.delta = delta_override;
      if (beta_override >= 0) cfg.beta = beta_override;
      if (outer_override >= 1) cfg.outer_max_iter = outer_override;
      cfg.validate();
      return cmd_solve(g, x_path, graph_path, knn_k, cfg);
    }
    if (rp->parsed()) return cmd_rpca(g, rpca_x, rpca_delta, load_config(rpca_config));
    if (sw->parsed()) return cmd_sweep(g, kind, load_config(sweep_config), seeds, density);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
