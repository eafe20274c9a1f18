#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "nfp/band.hpp"
#include "nfp/core.hpp"

namespace nfp {

/// (X + X*)/2 on the band.
BandedAutocorrelation symmetrize_band(const BandedAutocorrelation& X);

/// sqrt(max(Re X_jj, 0)).
std::vector<double> estimate_magnitudes(const BandedAutocorrelation& X);

/// Entrywise phases X_jk/|X_jk|, zero where X_jk = 0.
BandedAutocorrelation phase_only(const BandedAutocorrelation& X);

struct EigenIterationOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
};

/// Phases of the leading eigenvector of the phase-only matrix, found by power
/// iteration (dense eigensolve when it stalls). Output is unit modulus with entry 0 rotated onto the positive
/// real axis.
ComplexSignal sync_leading_eigenvector(const BandedAutocorrelation& X,
                                       const EigenIterationOptions& opts = {});

/// Hermitian connection Laplacian D - W o X^(theta) with W_ij = |X_ij|^2.
Eigen::MatrixXcd connection_laplacian(const BandedAutocorrelation& X);

/// Phases of the eigenvector for the smallest eigenvalue of the connection
/// Laplacian (inverse iteration, with a dense eigensolve when it stalls).
/// Throws SynchronizationError when the weight graph is disconnected.
ComplexSignal sync_weighted_laplacian(const BandedAutocorrelation& X,
                                      const EigenIterationOptions& opts = {});

/// x_est = magnitudes o phases.
ComplexSignal assemble_estimate(const ComplexSignal& phases, const std::vector<double>& magnitudes);

/// Unit-modulus phases x_n/|x_n| (1 where x_n = 0).
ComplexSignal phases_of(const ComplexSignal& x);

/// Multiplies by the unit scalar that makes the first entry with modulus
/// above `floor` real and positive.
ComplexSignal fix_global_phase(const ComplexSignal& x, double floor = 1e-14);

/// Weighted undirected graph on d vertices with symmetric nonnegative
/// weights; edges are the pairs with positive weight.
class SyncGraph {
 public:
  explicit SyncGraph(Eigen::MatrixXd weights, std::optional<std::size_t> band_delta = std::nullopt);

  /// W_ij = |X_ij|^2 for 0 < |i-j| mod d < delta.
  static SyncGraph from_band(const BandedAutocorrelation& X);

  std::size_t vertex_count() const { return static_cast<std::size_t>(w_.rows()); }
  std::optional<std::size_t> band_delta() const { return band_delta_; }
  const Eigen::MatrixXd& weights() const { return w_; }
  Eigen::VectorXd degrees() const;
  Eigen::MatrixXd laplacian() const;
  Eigen::MatrixXd normalized_laplacian() const;

  bool is_connected() const;
  /// Hop diameter of the unweighted graph (infinity when disconnected).
  double unweighted_diameter() const;
  /// Maximum over vertex pairs of the least sum of 1/W along a path.
  double inverse_weighted_diameter() const;
  double min_weight() const;
  double max_weight() const;

 private:
  Eigen::MatrixXd w_;
  std::optional<std::size_t> band_delta_;
};

/// Second-smallest eigenvalue of the unnormalized Laplacian.
double spectral_gap(const SyncGraph& g);

struct GapBounds {
  /// |x_min|^4 / ||x||_inf^2 * 4(delta-1)/d^2; NaN for graphs without band
  /// structure.
  double magnitude_bound = 0.0;
  /// 2 W_min^2 / (W_max (n-1) diam(G_unw)).
  double diameter_bound = 0.0;
};

GapBounds gap_lower_bounds(const SyncGraph& g, const ComplexSignal& x_est);

}  // namespace nfp
