#include "lge/graph.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lge {

GraphLaplacian laplacian_from_adjacency(const Adjacency& w) {
  const auto& m = w.weights;
  if (m.rows() != m.cols()) throw std::invalid_argument("laplacian_from_adjacency: not square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("laplacian_from_adjacency: asymmetric adjacency");
  if (m.minCoeff() < 0.0)
    throw std::invalid_argument("laplacian_from_adjacency: negative weight");
  if (m.diagonal().cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("laplacian_from_adjacency: nonzero diagonal");
  Eigen::VectorXd deg = m.rowwise().sum();
  GraphLaplacian out;
  out.matrix = Eigen::MatrixXd(deg.asDiagonal()) - m;
  return out;
}

Adjacency adjacency_from_laplacian(const GraphLaplacian& phi) {
  Adjacency w;
  w.weights = -phi.matrix;
  w.weights.diagonal().setZero();
  w.weights = w.weights.cwiseMax(0.0);
  return w;
}

bool is_valid_laplacian(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) > tol) return false;
  Eigen::VectorXd rowsum = m.rowwise().sum();
  return rowsum.cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

GraphLaplacian project_to_laplacian_set(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("project_to_laplacian_set: not square");
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      if (i != j) s(i, j) = std::min(s(i, j), 0.0);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double offsum = s.row(i).sum() - s(i, i);
    s(i, i) = -offsum;
  }
  return GraphLaplacian{std::move(s)};
}

Adjacency random_weighted_graph(int p, double q, Rng& rng) {
  if (p < 2) throw std::invalid_argument("random_weighted_graph: p must be >= 2");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("random_weighted_graph: q outside [0,1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (unit(rng) < q) {
        double weight = unit(rng);
        w(i, j) = weight;
        w(j, i) = weight;
      }
    }
  }
  return Adjacency{std::move(w)};
}

SmoothBasis smooth_basis(const GraphLaplacian& phi, int r) {
  const Eigen::Index p = phi.matrix.rows();
  if (r < 1 || r > p) throw std::invalid_argument("smooth_basis: r outside [1, p]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(phi.matrix);
  if (es.info() != Eigen::Success)
    throw std::invalid_argument("smooth_basis: eigendecomposition failed");
  SmoothBasis out;
  out.vectors = es.eigenvectors().leftCols(r);
  out.eigenvalues = es.eigenvalues().head(r);
  return out;
}

Adjacency knn_graph(const Eigen::MatrixXd& x, int k) {
  const int p = static_cast<int>(x.rows());
  if (k < 1 || k >= p) throw std::invalid_argument("knn_graph: need 1 <= k < p");

  Eigen::MatrixXd dist(p, p);
  for (int i = 0; i < p; ++i) {
    dist(i, i) = 0.0;
    for (int j = i + 1; j < p; ++j) {
      double d = (x.row(i) - x.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }

  std::vector<double> pairwise;
  pairwise.reserve(static_cast<size_t>(p) * (p - 1) / 2);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) pairwise.push_back(dist(i, j));
  std::sort(pairwise.begin(), pairwise.end());
  double sigma = pairwise[pairwise.size() / 2];
  if (sigma <= 0.0) sigma = 1.0;

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  std::vector<double> others;
  for (int i = 0; i < p; ++i) {
    others.clear();
    for (int j = 0; j < p; ++j)
      if (j != i) others.push_back(dist(i, j));
    std::nth_element(others.begin(), others.begin() + (k - 1), others.end());
    // All points tied at the k-th distance are kept as neighbors.
    double kth = others[static_cast<size_t>(k - 1)];
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      if (dist(i, j) <= kth * (1.0 + 1e-12)) {
        double weight = std::exp(-dist(i, j) * dist(i, j) / (sigma * sigma));
        w(i, j) = weight;
        w(j, i) = weight;  // union symmetrization
      }
    }
  }
  return Adjacency{std::move(w)};
}

GraphLaplacian distort_laplacian(const GraphLaplacian& phi0, const LaplacianDistortion& d,
                                 Rng& rng) {
  if (d.probability < 0.0 || d.probability > 1.0)
    throw std::invalid_argument("distort_laplacian: probability outside [0,1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd m = phi0.matrix;
  const Eigen::Index p = m.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      bool candidate = (d.mode == DistortionMode::topology) || phi0.matrix(i, j) != 0.0;
      if (!candidate) continue;
      // Fixed two draws per candidate: realizations for a shared stream are
      // nested in the probability, which keeps paired sweeps monotone.
      double u = unit(rng);
      double amp = unit(rng);
      if (u < d.probability) {
        m(i, j) -= amp;
        m(j, i) -= amp;
      }
    }
  }
  return project_to_laplacian_set(m);
}

namespace {

// Symmetric FIR convolution with 'same' output; zero phase by construction.
Eigen::VectorXd conv_same(const Eigen::VectorXd& x, const Eigen::VectorXd& kernel) {
  const Eigen::Index n = x.size();
  const Eigen::Index m = kernel.size();
  const Eigen::Index half = m / 2;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    double acc = 0.0;
    Eigen::Index lo = std::max<Eigen::Index>(0, t - half);
    Eigen::Index hi = std::min(n - 1, t + half);
    for (Eigen::Index s = lo; s <= hi; ++s) acc += x(s) * kernel(half + t - s);
    y(t) = acc;
  }
  return y;
}

Eigen::VectorXd bandpass_kernel(double f_lo, double f_hi, double fs, Eigen::Index taps) {
  const double pi = std::numbers::pi;
  Eigen::VectorXd h(taps);
  const Eigen::Index c = taps / 2;
  auto sinc = [pi](double x) { return x == 0.0 ? 1.0 : std::sin(pi * x) / (pi * x); };
  for (Eigen::Index i = 0; i < taps; ++i) {
    double n = static_cast<double>(i - c);
    double ideal =
        2.0 * f_hi / fs * sinc(2.0 * f_hi * n / fs) - 2.0 * f_lo / fs * sinc(2.0 * f_lo * n / fs);
    double hamming = 0.54 - 0.46 * std::cos(2.0 * pi * i / (taps - 1));
    h(i) = ideal * hamming;
  }
  // Unit response at the band center.
  double fc = 0.5 * (f_lo + f_hi);
  double re = 0.0, im = 0.0;
  for (Eigen::Index i = 0; i < taps; ++i) {
    double ang = 2.0 * pi * fc * static_cast<double>(i - c) / fs;
    re += h(i) * std::cos(ang);
    im += h(i) * std::sin(ang);
  }
  double gain = std::hypot(re, im);
  if (gain > 0.0) h /= gain;
  return h;
}

}  // namespace

Adjacency coherence_adjacency(const Eigen::MatrixXd& series, double f, double fs) {
  const int p = static_cast<int>(series.rows());
  const Eigen::Index T = series.cols();
  if (!(f > 0.0 && f < 0.5 * fs))
    throw std::invalid_argument("coherence_adjacency: need 0 < f < fs/2");
  if (static_cast<double>(T) < 4.0 * fs / f)
    throw std::invalid_argument("coherence_adjacency: series too short for the band filter");

  const double pi = std::numbers::pi;
  double f_lo = std::max(f - 5.0, 0.1 * f);
  double f_hi = std::min(f + 5.0, 0.499 * fs);
  Eigen::Index taps = 2 * static_cast<Eigen::Index>(fs / 3.0) + 1;
  taps = std::min(taps, (T % 2 == 0) ? T - 1 : T);
  taps = std::max<Eigen::Index>(taps, 5);
  Eigen::VectorXd fir = bandpass_kernel(f_lo, f_hi, fs, taps);

  // Complex Morlet, 7 cycles.
  const double sigma_t = 7.0 / (2.0 * pi * f);
  Eigen::Index half = static_cast<Eigen::Index>(std::ceil(3.5 * sigma_t * fs));
  half = std::min(half, T / 2);
  const Eigen::Index mlen = 2 * half + 1;
  Eigen::VectorXd mre(mlen), mim(mlen);
  for (Eigen::Index i = 0; i < mlen; ++i) {
    double t = static_cast<double>(i - half) / fs;
    double env = std::exp(-t * t / (2.0 * sigma_t * sigma_t));
    mre(i) = env * std::cos(2.0 * pi * f * t);
    mim(i) = env * std::sin(2.0 * pi * f * t);
  }

  Eigen::MatrixXd are(p, T), aim(p, T);
  for (int ch = 0; ch < p; ++ch) {
    Eigen::VectorXd filtered = conv_same(series.row(ch).transpose(), fir);
    are.row(ch) = conv_same(filtered, mre).transpose();
    aim.row(ch) = conv_same(filtered, mim).transpose();
  }

  Eigen::VectorXd energy(p);
  for (int ch = 0; ch < p; ++ch)
    energy(ch) = std::sqrt(are.row(ch).squaredNorm() + aim.row(ch).squaredNorm());

  // Constant channels carry no oscillation; the band filter leaves only
  // numerical residue, so flag them from the raw data, not the residue.
  std::vector<bool> degenerate(static_cast<size_t>(p));
  for (int ch = 0; ch < p; ++ch) {
    double span = series.row(ch).maxCoeff() - series.row(ch).minCoeff();
    double scale = series.row(ch).cwiseAbs().maxCoeff();
    degenerate[static_cast<size_t>(ch)] =
        span <= 1e-12 * std::max(scale, 1.0) || energy(ch) <= 1e-300;
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      if (degenerate[static_cast<size_t>(a)] || degenerate[static_cast<size_t>(b)]) continue;
      // |sum_t conj-free cross product| of the analytic signals.
      double re = are.row(a).dot(are.row(b)) + aim.row(a).dot(aim.row(b));
      double im = aim.row(a).dot(are.row(b)) - are.row(a).dot(aim.row(b));
      double coh = std::hypot(re, im) / (energy(a) * energy(b));
      coh = std::min(coh, 1.0);
      w(a, b) = coh;
      w(b, a) = coh;
    }
  }
  return Adjacency{std::move(w)};
}

}  // namespace lge
