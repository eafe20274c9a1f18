#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nfp/angsync.hpp"
#include "nfp/error.hpp"
#include "oracles.hpp"

using namespace nfp;

namespace {

// Distance between unit phase vectors modulo a global rotation.
double phase_error(const ComplexSignal& a, const ComplexSignal& b) {
  return phase_aligned_distance(a, b) / std::sqrt(static_cast<double>(a.size()));
}

Eigen::MatrixXd complete_graph(std::size_t n) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Ones(n, n);
  W.diagonal().setZero();
  return W;
}

}  // namespace

TEST_CASE("band helpers") {
  std::mt19937_64 rng(41);
  const ComplexSignal x = oracle::random_signal(12, rng);
  const BandedAutocorrelation X = BandedAutocorrelation::from_signal(x, 3);
  const auto mags = estimate_magnitudes(X);
  for (std::size_t n = 0; n < 12; ++n) CHECK(mags[n] == doctest::Approx(std::abs(x[n])).epsilon(1e-14));

  BandedAutocorrelation Y = X;
  Y.slot(0, 0) = {-1.0, 0.0};
  CHECK(estimate_magnitudes(Y)[0] == 0.0);

  BandedAutocorrelation skew = X;
  skew.set(0, 1, skew(0, 1) + cplx{0.0, 1.0});
  const BandedAutocorrelation S = symmetrize_band(skew);
  CHECK(std::abs(S(0, 1) - std::conj(S(1, 0))) < 1e-15);
  CHECK(std::abs(S(2, 3) - X(2, 3)) < 1e-15);

  const BandedAutocorrelation P = phase_only(X);
  for (std::int64_t i = 0; i < 12; ++i) {
    for (std::int64_t j = i - 2; j <= i + 2; ++j) CHECK(std::abs(std::abs(P(i, j)) - 1.0) < 1e-14);
  }
  BandedAutocorrelation Z(12, 3);
  CHECK(phase_only(Z)(0, 1) == cplx{0.0, 0.0});
}

TEST_CASE("phase helpers") {
  const ComplexSignal x{{0.0, 0.0}, {0.0, 2.0}, {-3.0, 0.0}};
  const ComplexSignal p = phases_of(x);
  CHECK(p[0] == cplx{1.0, 0.0});
  CHECK(std::abs(p[1] - cplx{0.0, 1.0}) < 1e-15);
  const ComplexSignal f = fix_global_phase(x);
  CHECK(std::abs(f[1] - cplx{2.0, 0.0}) < 1e-15);
  CHECK(std::abs(f[2] - cplx{0.0, 3.0}) < 1e-15);
  const ComplexSignal e = assemble_estimate(ComplexSignal{{0.0, 1.0}, 1.0}, {2.0, 3.0});
  CHECK(e[0] == cplx{0.0, 2.0});
  CHECK(e[1] == cplx{3.0, 0.0});
  CHECK_THROWS_AS(assemble_estimate(ComplexSignal(2), {1.0}), DimensionError);
}

TEST_CASE("synchronization recovers phases from an exact band") {
  std::mt19937_64 rng(42);
  for (std::size_t d : {5u, 15u, 64u}) {
    for (std::size_t delta : {2u, 3u}) {
      const ComplexSignal x = oracle::random_signal(d, rng);
      const BandedAutocorrelation X = BandedAutocorrelation::from_signal(x, delta);
      const ComplexSignal truth = phases_of(x);
      const ComplexSignal lead = sync_leading_eigenvector(X);
      const ComplexSignal lap = sync_weighted_laplacian(X);
      CHECK(phase_error(truth, lead) < 1e-8);
      CHECK(phase_error(truth, lap) < 1e-8);
      CHECK(lap[0].imag() == doctest::Approx(0.0));
      CHECK(lap[0].real() > 0.0);
    }
  }
}

TEST_CASE("connection Laplacian") {
  std::mt19937_64 rng(43);
  const ComplexSignal x = oracle::random_signal(10, rng);
  const BandedAutocorrelation X = BandedAutocorrelation::from_signal(x, 3);
  const Eigen::MatrixXcd L = connection_laplacian(X);
  CHECK((L - L.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::VectorXcd g(10);
  for (Eigen::Index i = 0; i < 10; ++i) g(i) = x[static_cast<std::size_t>(i)] / std::abs(x[static_cast<std::size_t>(i)]);
  CHECK((L * g).norm() < 1e-10 * L.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(L);
  CHECK(es.eigenvalues()(0) > -1e-10 * L.norm());
}

TEST_CASE("disconnected bands are rejected") {
  BandedAutocorrelation X(6, 2);
  for (std::size_t i = 0; i < 6; ++i) X.slot(i, 0) = 1.0;
  X.set(0, 1, 1.0);
  X.set(1, 0, 1.0);
  CHECK_THROWS_AS(sync_weighted_laplacian(X), SynchronizationError);
  CHECK_FALSE(SyncGraph::from_band(X).is_connected());
  CHECK_THROWS_AS(sync_leading_eigenvector(BandedAutocorrelation(6, 2)), DegenerateInputError);
}

TEST_CASE("spectral gaps of standard graphs") {
  for (std::size_t n = 3; n <= 10; ++n) {
    CHECK(spectral_gap(SyncGraph(complete_graph(n))) == doctest::Approx(double(n)).epsilon(1e-12));

    Eigen::MatrixXd path = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd cycle = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) path(i, i + 1) = path(i + 1, i) = 1.0;
    for (std::size_t i = 0; i < n; ++i) cycle(i, (i + 1) % n) = cycle((i + 1) % n, i) = 1.0;
    const double pi = std::numbers::pi;
    CHECK(spectral_gap(SyncGraph(path)) == doctest::Approx(2.0 - 2.0 * std::cos(pi / double(n))).epsilon(1e-12));
    CHECK(spectral_gap(SyncGraph(cycle)) == doctest::Approx(2.0 - 2.0 * std::cos(2.0 * pi / double(n))).epsilon(1e-12));
    CHECK(SyncGraph(path).unweighted_diameter() == double(n - 1));
    CHECK(SyncGraph(cycle).unweighted_diameter() == double(n / 2));
    CHECK(SyncGraph(complete_graph(n)).unweighted_diameter() == 1.0);
  }
}

TEST_CASE("graph queries") {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(4, 4);
  W(0, 1) = W(1, 0) = 2.0;
  W(1, 2) = W(2, 1) = 0.5;
  W(2, 3) = W(3, 2) = 4.0;
  W(0, 3) = W(3, 0) = 0.25;
  const SyncGraph g(W);
  CHECK(g.min_weight() == 0.25);
  CHECK(g.max_weight() == 4.0);
  CHECK(g.degrees()(1) == 2.5);
  CHECK(g.inverse_weighted_diameter() == doctest::Approx(2.75));
  const Eigen::MatrixXd N = g.normalized_laplacian();
  CHECK(N.diagonal().isOnes(1e-15));
  CHECK(std::isnan(gap_lower_bounds(g, ComplexSignal(4)).magnitude_bound));

  Eigen::MatrixXd bad = W;
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(SyncGraph{bad}, ConfigurationError);
  bad = -W;
  CHECK_THROWS_AS(SyncGraph{bad}, ConfigurationError);
  CHECK_THROWS_AS(SyncGraph{Eigen::MatrixXd::Zero(2, 3)}, DimensionError);
}

TEST_CASE("gap bounds hold on random bands") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t delta = 2 + trial % 4;
    const std::size_t d = 3 * (2 * delta - 1);
    const ComplexSignal x = oracle::random_signal(d, rng);
    const SyncGraph g = SyncGraph::from_band(BandedAutocorrelation::from_signal(x, delta));
    const double tau = spectral_gap(g);
    const GapBounds b = gap_lower_bounds(g, x);
    CHECK(tau >= b.magnitude_bound);
    CHECK(tau >= b.diameter_bound);
    CHECK(b.magnitude_bound > 0.0);
    CHECK(b.diameter_bound > 0.0);
  }
}
