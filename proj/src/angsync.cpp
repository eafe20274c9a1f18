#include "nfp/angsync.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <random>
#include <string>

#include "nfp/error.hpp"

namespace nfp {
namespace {

constexpr double kPhaseFloor = 1e-14;

Eigen::VectorXcd start_vector(std::size_t n) {
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = {re, im};
  }
  return v.normalized();
}

ComplexSignal unit_phases(const Eigen::VectorXcd& u) {
  ComplexSignal v(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) v[static_cast<std::size_t>(i)] = u(i);
  const double scale = u.norm();
  ComplexSignal rotated = fix_global_phase(v, kPhaseFloor * scale);
  for (auto& e : rotated) {
    const double r = std::abs(e);
    e = r < kPhaseFloor * scale ? cplx{1.0, 0.0} : e / r;
  }
  return rotated;
}

Eigen::MatrixXcd dense_phase_matrix(const BandedAutocorrelation& X) {
  return phase_only(symmetrize_band(X)).to_dense();
}

}  // namespace

BandedAutocorrelation symmetrize_band(const BandedAutocorrelation& X) {
  BandedAutocorrelation out(X.d(), X.delta());
  for (std::size_t i = 0; i < X.d(); ++i) {
    for (std::size_t s = 0; s < X.width(); ++s) {
      const auto ii = static_cast<std::int64_t>(i);
      const std::int64_t j = ii + X.offset(s);
      out.slot(i, s) = 0.5 * (X(ii, j) + std::conj(X(j, ii)));
    }
  }
  return out;
}

std::vector<double> estimate_magnitudes(const BandedAutocorrelation& X) {
  std::vector<double> mags(X.d());
  for (std::size_t j = 0; j < X.d(); ++j) mags[j] = std::sqrt(std::max(X.slot(j, 0).real(), 0.0));
  return mags;
}

BandedAutocorrelation phase_only(const BandedAutocorrelation& X) {
  BandedAutocorrelation out(X.d(), X.delta());
  for (std::size_t i = 0; i < X.d(); ++i) {
    for (std::size_t s = 0; s < X.width(); ++s) {
      const cplx v = X.slot(i, s);
      const double r = std::abs(v);
      out.slot(i, s) = r == 0.0 ? cplx{0.0, 0.0} : v / r;
    }
  }
  return out;
}

ComplexSignal sync_leading_eigenvector(const BandedAutocorrelation& X, const EigenIterationOptions& opts) {
  const Eigen::MatrixXcd P = dense_phase_matrix(X);
  if (P.cwiseAbs().maxCoeff() == 0.0) throw DegenerateInputError("sync: band has no nonzero entries");
  // Gershgorin shift makes P + cI positive semidefinite, so the dominant
  // eigenvector of the shifted matrix is the leading one of P.
  const double shift = P.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::VectorXcd v = start_vector(X.d());
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXcd Pv = P * v;
    const cplx rho = v.dot(Pv);
    residual = (Pv - rho * v).norm();
    if (residual <= opts.tolerance * shift) return unit_phases(v);
    v = (Pv + shift * v).normalized();
  }
  // Same fallback as the Laplacian solver when the top two eigenvalues are
  // too close for power iteration.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(P);
  if (eig.info() != Eigen::Success) {
    throw ConvergenceError("leading-eigenvector power iteration did not converge", residual);
  }
  return unit_phases(eig.eigenvectors().col(P.cols() - 1));
}

namespace {

Eigen::SparseMatrix<cplx> sparse_connection_laplacian(const BandedAutocorrelation& X) {
  const BandedAutocorrelation H = symmetrize_band(X);
  const auto n = static_cast<Eigen::Index>(H.d());
  std::vector<Eigen::Triplet<cplx>> entries;
  entries.reserve(H.d() * H.width() * 2);
  for (std::size_t i = 0; i < H.d(); ++i) {
    for (std::size_t s = 1; s < H.width(); ++s) {
      const cplx v = H.slot(i, s);
      const auto j = static_cast<Eigen::Index>(wrap(static_cast<std::int64_t>(i) + H.offset(s), H.d()));
      const auto ii = static_cast<Eigen::Index>(i);
      // W_ij * X_ij/|X_ij| = |X_ij| X_ij.
      entries.emplace_back(ii, j, -std::abs(v) * v);
      entries.emplace_back(ii, ii, std::norm(v));
    }
  }
  Eigen::SparseMatrix<cplx> L(n, n);
  L.setFromTriplets(entries.begin(), entries.end());
  return L;
}

}  // namespace

Eigen::MatrixXcd connection_laplacian(const BandedAutocorrelation& X) {
  return Eigen::MatrixXcd(sparse_connection_laplacian(X));
}

ComplexSignal sync_weighted_laplacian(const BandedAutocorrelation& X, const EigenIterationOptions& opts) {
  const SyncGraph graph = SyncGraph::from_band(symmetrize_band(X));
  if (!graph.is_connected()) {
    throw SynchronizationError("weighted synchronization needs a connected weight graph");
  }
  const auto n = static_cast<Eigen::Index>(X.d());
  if (n == 1) return ComplexSignal{cplx{1.0, 0.0}};
  const Eigen::SparseMatrix<cplx> L = sparse_connection_laplacian(X);
  double scale = std::numeric_limits<double>::min();
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, L.coeff(i, i).real());

  // Inverse iteration with a small positive shift; L is positive semidefinite.
  Eigen::SparseMatrix<cplx> I(n, n);
  I.setIdentity();
  const Eigen::SparseMatrix<cplx> shifted = L + (1e-10 * scale) * I;
  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<cplx>> ldlt(shifted);
  Eigen::VectorXcd v = start_vector(X.d());
  double residual = std::numeric_limits<double>::infinity();
  if (ldlt.info() == Eigen::Success) {
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
      v = ldlt.solve(v).normalized();
      const Eigen::VectorXcd Lv = L * v;
      const cplx rho = v.dot(Lv);
      residual = (Lv - rho * v).norm();
      if (!std::isfinite(residual)) break;
      if (residual <= opts.tolerance * scale) return unit_phases(v);
    }
  }
  // Slow convergence means a tiny gap between the two lowest eigenvalues;
  // fall back to a dense eigensolve.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(connection_laplacian(X));
  if (eig.info() != Eigen::Success) {
    throw ConvergenceError("weighted-Laplacian eigensolve did not converge", residual);
  }
  return unit_phases(eig.eigenvectors().col(0));
}

ComplexSignal assemble_estimate(const ComplexSignal& phases, const std::vector<double>& magnitudes) {
  if (phases.size() != magnitudes.size()) throw DimensionError("assemble_estimate: length mismatch");
  ComplexSignal x(phases.size());
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = magnitudes[n] * phases[n];
  return x;
}

ComplexSignal phases_of(const ComplexSignal& x) {
  ComplexSignal p(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double r = std::abs(x[n]);
    p[n] = r == 0.0 ? cplx{1.0, 0.0} : x[n] / r;
  }
  return p;
}

ComplexSignal fix_global_phase(const ComplexSignal& x, double floor) {
  for (const auto& v : x) {
    const double r = std::abs(v);
    if (r > floor) return (std::conj(v) / r) * x;
  }
  return x;
}

SyncGraph::SyncGraph(Eigen::MatrixXd weights, std::optional<std::size_t> band_delta)
    : w_(std::move(weights)), band_delta_(band_delta) {
  if (w_.rows() != w_.cols()) throw DimensionError("weight matrix must be square");
  if ((w_.array() < 0.0).any()) throw ConfigurationError("weights must be nonnegative");
  if (!w_.isApprox(w_.transpose(), 1e-12) && w_.size() > 0 && w_.norm() > 0.0) {
    throw ConfigurationError("weight matrix must be symmetric");
  }
  w_.diagonal().setZero();
}

SyncGraph SyncGraph::from_band(const BandedAutocorrelation& X) {
  const auto n = static_cast<Eigen::Index>(X.d());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < X.d(); ++i) {
    for (std::size_t s = 1; s < X.width(); ++s) {
      const auto j = static_cast<Eigen::Index>(wrap(static_cast<std::int64_t>(i) + X.offset(s), X.d()));
      W(static_cast<Eigen::Index>(i), j) = std::norm(X.slot(i, s));
    }
  }
  // Symmetrize in case the band was not Hermitian.
  const Eigen::MatrixXd Ws = 0.5 * (W + W.transpose());
  return SyncGraph(Ws, X.delta());
}

Eigen::VectorXd SyncGraph::degrees() const { return w_.rowwise().sum(); }

Eigen::MatrixXd SyncGraph::laplacian() const {
  Eigen::MatrixXd L = -w_;
  L.diagonal() = degrees();
  return L;
}

Eigen::MatrixXd SyncGraph::normalized_laplacian() const {
  const Eigen::VectorXd deg = degrees();
  Eigen::VectorXd inv_sqrt(deg.size());
  for (Eigen::Index i = 0; i < deg.size(); ++i) inv_sqrt(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
  return inv_sqrt.asDiagonal() * laplacian() * inv_sqrt.asDiagonal();
}

namespace {

std::vector<std::size_t> bfs_hops(const Eigen::MatrixXd& w, std::size_t source) {
  const auto n = static_cast<std::size_t>(w.rows());
  std::vector<std::size_t> hops(n, std::numeric_limits<std::size_t>::max());
  std::deque<std::size_t> queue{source};
  hops[source] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0 &&
          hops[v] == std::numeric_limits<std::size_t>::max()) {
        hops[v] = hops[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return hops;
}

}  // namespace

bool SyncGraph::is_connected() const {
  if (w_.rows() <= 1) return true;
  const auto hops = bfs_hops(w_, 0);
  return std::none_of(hops.begin(), hops.end(),
                      [](std::size_t h) { return h == std::numeric_limits<std::size_t>::max(); });
}

double SyncGraph::unweighted_diameter() const {
  std::size_t diam = 0;
  for (std::size_t s = 0; s < vertex_count(); ++s) {
    for (std::size_t h : bfs_hops(w_, s)) {
      if (h == std::numeric_limits<std::size_t>::max()) return std::numeric_limits<double>::infinity();
      diam = std::max(diam, h);
    }
  }
  return static_cast<double>(diam);
}

double SyncGraph::inverse_weighted_diameter() const {
  const std::size_t n = vertex_count();
  double diam = 0.0;
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0.0;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      const auto [du, u] = pq.top();
      pq.pop();
      if (du > dist[u]) continue;
      for (std::size_t v = 0; v < n; ++v) {
        const double wuv = w_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
        if (wuv <= 0.0) continue;
        const double cand = du + 1.0 / wuv;
        if (cand < dist[v]) {
          dist[v] = cand;
          pq.emplace(cand, v);
        }
      }
    }
    diam = std::max(diam, *std::max_element(dist.begin(), dist.end()));
  }
  return diam;
}

double SyncGraph::min_weight() const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    const double v = w_.data()[i];
    if (v > 0.0) m = std::min(m, v);
  }
  return m;
}

double SyncGraph::max_weight() const { return w_.size() ? w_.maxCoeff() : 0.0; }

double spectral_gap(const SyncGraph& g) {
  if (g.vertex_count() < 2) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.laplacian(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

GapBounds gap_lower_bounds(const SyncGraph& g, const ComplexSignal& x_est) {
  const std::size_t n = g.vertex_count();
  if (n < 2) throw ConfigurationError("gap bounds need at least two vertices");
  GapBounds b;
  if (g.band_delta()) {
    if (x_est.size() != n) throw DimensionError("gap bounds: estimate length differs from vertex count");
    double xmin = std::numeric_limits<double>::infinity();
    for (const auto& v : x_est) xmin = std::min(xmin, std::abs(v));
    const double xmax = norm_inf(x_est);
    const double dd = static_cast<double>(n);
    b.magnitude_bound = xmax > 0.0 ? std::pow(xmin, 4) / (xmax * xmax) * 4.0 *
                                         (static_cast<double>(*g.band_delta()) - 1.0) / (dd * dd)
                                   : 0.0;
  } else {
    b.magnitude_bound = std::numeric_limits<double>::quiet_NaN();
  }
  const double wmin = g.min_weight();
  const double wmax = g.max_weight();
  const double diam = g.unweighted_diameter();
  b.diameter_bound = (wmax > 0.0 && std::isfinite(diam))
                         ? 2.0 * wmin * wmin / (wmax * static_cast<double>(n - 1) * diam)
                         : 0.0;
  return b;
}

}  // namespace nfp
