#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "nfp/band.hpp"
#include "nfp/core.hpp"
#include "nfp/masks.hpp"
#include "nfp/measure.hpp"

namespace nfp {

/// Index map of the near-to-far rearrangement: far value i is near value
/// perm[i]. Throws ConfigurationError when the grid does not meet either
/// rearrangement hypothesis (periodic PSF on the full grid, or a diagonal
/// band).
std::vector<std::size_t> near_to_far_permutation(const MeasurementGrid& near);

/// Rearranges NFP intensities into FFP form Y~ over [K]_0 x [L]_0 (noise is
/// permuted along with the values).
MeasurementGrid rearrange_near_to_far(const MeasurementGrid& near);

/// Lifted unknown: d blocks of 2delta-1 entries, block k slot j holding
/// x_k conj(x_{k+j}) for j < delta and x_k conj(x_{k+j-(2delta-1)}) above.
struct LiftedVector {
  std::size_t d = 0;
  std::size_t delta = 0;
  std::vector<cplx> z;
};

LiftedVector pack_lifted(const ComplexSignal& x, std::size_t delta);
BandedAutocorrelation unpack_lifted(const LiftedVector& z);

/// Block-circulant operator with first block row (M_0, ..., M_{delta-1}, 0, ...),
/// block row k shifted right by k blocks.
class LiftedOperator {
 public:
  LiftedOperator(std::size_t d, std::size_t delta, std::vector<Eigen::MatrixXcd> blocks);

  std::size_t d() const { return d_; }
  std::size_t delta() const { return delta_; }
  std::size_t width() const { return 2 * delta_ - 1; }
  std::size_t dimension() const { return d_ * width(); }
  const std::vector<Eigen::MatrixXcd>& blocks() const { return blocks_; }

  /// M z.
  std::vector<cplx> apply(const std::vector<cplx>& z) const;
  Eigen::MatrixXcd to_dense() const;
  /// sum_n M_n e^{2 pi i f n / d}: the f-th diagonal block after the block DFT.
  Eigen::MatrixXcd fourier_block(std::size_t f) const;

 private:
  std::size_t d_;
  std::size_t delta_;
  std::vector<Eigen::MatrixXcd> blocks_;
};

/// Lifted operator of a family of 2delta-1 masks supported in [delta]_0:
/// (M_n)_{l,j} = conj((m_l)_n) (m_l)_{n+s(j)} with s(j) the signed offset of
/// slot j, zero when n + s(j) leaves [delta]_0. Requires (2delta-1) | d.
LiftedOperator assemble_lifted(const DerivedMaskFamily& family, std::size_t d, std::size_t delta);

enum class SolveMethod { Fourier, Dense };

/// Largest lifted dimension accepted by the dense cross-check solver.
inline constexpr std::size_t kDenseSolveMaxDimension = 2000;

/// Fourier blocks whose estimated sigma_min falls below this fraction of the
/// largest block norm are rejected as singular.
inline constexpr double kSingularBlockRatio = 1e-12;

/// Solves M z = y. The Fourier method decouples the system into d dense
/// (2delta-1)-square solves; the dense method factors the assembled matrix.
LiftedVector solve_lifted(const LiftedOperator& M, const std::vector<cplx>& y,
                          SolveMethod method = SolveMethod::Fourier);

struct ConditioningReport {
  std::size_t d = 0;
  std::size_t delta = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double kappa = 0.0;
  double bound = 0.0;
};

/// max{144 e^2, 9 e^2 (delta-1)^2 / 4}.
double exponential_mask_condition_bound(std::size_t delta);

/// All singular values of M (union over Fourier blocks), ascending.
std::vector<double> singular_values(const LiftedOperator& M);

ConditioningReport conditioning(const LiftedOperator& M);

void write_conditioning_csv_header(std::ostream& os);
void write_conditioning_csv_row(std::ostream& os, const ConditioningReport& r);

}  // namespace nfp
