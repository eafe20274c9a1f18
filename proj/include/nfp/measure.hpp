#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "nfp/core.hpp"
#include "nfp/masks.hpp"

namespace nfp {

enum class IndexKind {
  FullGrid,      // [d]_0 x [2delta-1]_0 in NFP coordinates
  DiagonalBand,  // {(-k mod d, k-l mod d) : k in [K]_0, l in [L]_0}
  Rectangle,     // [K]_0 x [L]_0 in FFP coordinates
};

/// Ordered set of (shift, detector) index pairs. Entry i of a grid's values
/// belongs to pairs[i]; for every kind, i = k*L + l with (k, l) the
/// generating parameters.
struct IndexSet {
  IndexKind kind = IndexKind::Rectangle;
  std::size_t d = 0;
  std::size_t K = 0;
  std::size_t L = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  static IndexSet full_grid(std::size_t d, std::size_t delta);
  static IndexSet diagonal_band(std::size_t d, std::size_t K, std::size_t L);
  static IndexSet rectangle(std::size_t d, std::size_t K, std::size_t L);

  std::size_t size() const { return pairs.size(); }
};

struct MeasurementGrid {
  IndexSet index;
  std::vector<double> values;
  /// Additive noise that was mixed into `values`, if any.
  std::optional<std::vector<double>> noise;
  std::size_t delta = 0;
  /// Period of the PSF used to simulate the grid, when known.
  std::optional<std::size_t> psf_period;
  std::optional<double> snr_db;

  std::size_t d() const { return index.d; }
  std::size_t size() const { return values.size(); }
  /// Value at generating parameters (k, l).
  double at(std::size_t k, std::size_t l) const { return values[k * index.L + l]; }
};

struct NoiseSpec {
  double target_snr_db = 0.0;
  std::uint64_t seed = 0;
  /// The infinite-SNR limit: no noise is drawn.
  bool noiseless = false;

  static NoiseSpec none() { return NoiseSpec{0.0, 0, true}; }
};

/// Y_{k,l} = |(p * (S_k m o x))_l|^2 over the pairs of `idx`.
MeasurementGrid forward_nfp(const ComplexSignal& x, const PsfSpec& psf, const MaskSpec& mask,
                            const IndexSet& idx);

/// Y~_{k,l} = |<m_check_l, S_k x>|^2 over [K]_0 x [L]_0.
MeasurementGrid forward_ffp(const ComplexSignal& x, const DerivedMaskFamily& family, std::size_t K);

/// Adds i.i.d. Gaussian noise rescaled so that
/// 10 log10(||Y_clean||_F / ||N||_F) equals the target exactly.
MeasurementGrid add_noise(const MeasurementGrid& g, const NoiseSpec& spec);

/// 10 log10(||Y - N||_F / ||N||_F); +inf for a noiseless grid.
double measured_snr_db(const MeasurementGrid& g);

/// The noise-free intensities Y - N.
std::vector<double> clean_values(const MeasurementGrid& g);

/// CSV with header "k,l,value,noise".
void write_grid_csv(std::ostream& os, const MeasurementGrid& g);
/// Reads values/noise written by write_grid_csv; rows must follow `idx`.
MeasurementGrid read_grid_csv(std::istream& is, const IndexSet& idx);

}  // namespace nfp
