#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nfp/core.hpp"

namespace nfp {

/// d x d matrix supported on the circular band |i - j| mod d < delta.
///
/// Storage matches the lifted-vector layout: row i keeps 2delta-1 slots,
/// slot s (0 <= s < delta) holds entry (i, i+s) and slot s (delta <= s) holds
/// entry (i, i+s-(2delta-1)). Requires 2delta-1 <= d so no two slots alias.
class BandedAutocorrelation {
 public:
  BandedAutocorrelation(std::size_t d, std::size_t delta);
  BandedAutocorrelation(std::size_t d, std::size_t delta, std::vector<cplx> slots);

  /// band(x x*): entries x_i conj(x_j) on the band.
  static BandedAutocorrelation from_signal(const ComplexSignal& x, std::size_t delta);

  std::size_t d() const { return d_; }
  std::size_t delta() const { return delta_; }
  std::size_t width() const { return 2 * delta_ - 1; }

  /// Slot of (i, j) in row i, or nullopt when (i, j) is off the band.
  std::optional<std::size_t> slot_of(std::int64_t i, std::int64_t j) const;

  /// Entry (i, j), zero off band. Indices wrap.
  cplx operator()(std::int64_t i, std::int64_t j) const;
  /// Sets an on-band entry; throws DimensionError off band.
  void set(std::int64_t i, std::int64_t j, cplx v);

  cplx slot(std::size_t row, std::size_t s) const { return slots_[row * width() + s]; }
  cplx& slot(std::size_t row, std::size_t s) { return slots_[row * width() + s]; }
  /// Signed column offset of slot s, in (-delta, delta).
  std::int64_t offset(std::size_t s) const;

  const std::vector<cplx>& slots() const { return slots_; }

  Eigen::MatrixXcd to_dense() const;

 private:
  std::size_t d_;
  std::size_t delta_;
  std::vector<cplx> slots_;
};

}  // namespace nfp
