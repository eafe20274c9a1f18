#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nfp/core.hpp"

namespace nfp {

/// Illumination mask m with its nominal support length delta
/// (supp(m) is contained in [delta]_0; delta == d for global masks).
struct MaskSpec {
  ComplexSignal m;
  std::size_t delta = 0;

  std::size_t d() const { return m.size(); }
};

/// Point spread function, optionally claimed to be `period`-periodic.
struct PsfSpec {
  ComplexSignal p;
  std::optional<std::size_t> period;

  std::size_t d() const { return p.size(); }
};

/// FFP-type masks m_check_0 ... m_check_{L-1}.
struct DerivedMaskFamily {
  std::vector<ComplexSignal> masks;

  std::size_t count() const { return masks.size(); }
  std::size_t d() const { return masks.empty() ? 0 : masks.front().size(); }
  const ComplexSignal& operator[](std::size_t l) const { return masks[l]; }
};

struct AdmissiblePair {
  PsfSpec psf;
  MaskSpec mask;
};

/// Decay rate of the exponential masks: max{4, (delta-1)/2}.
double exponential_mask_rate(std::size_t delta);

/// Exponential mask with modulation index ell in [2delta-1]_0.
ComplexSignal build_fpr_mask(std::size_t d, std::size_t delta, std::size_t ell);

/// The 2delta-1 exponential masks, indexed by ell.
DerivedMaskFamily build_fpr_family(std::size_t d, std::size_t delta);

/// Quadratic-chirp PSF p_n = e^{-2 pi i ((-n) mod d)^2/(2delta-1)} together
/// with the locally supported mask whose derived masks are phase-modulated
/// exponential masks. When (2delta-1) | d the PSF is (2delta-1)-periodic and
/// equals e^{-2 pi i n^2/(2delta-1)}; otherwise it carries no period claim,
/// only the diagonal-band rearrangement applies, and d >= 3delta-2 is
/// required.
AdmissiblePair build_admissible_pair(std::size_t d, std::size_t delta);

/// m_check_l = conj(S_l(reversal(p)) o m) for l in [L]_0.
DerivedMaskFamily derive_masks(const PsfSpec& psf, const MaskSpec& mask, std::size_t L);

/// PSF whose DFT is the indicator of gamma consecutive frequencies,
/// p = idft(S_{-(gamma-1)/2} 1_gamma). gamma must be odd and <= d.
PsfSpec build_lowpass_psf(std::size_t d, std::size_t gamma);

/// Globally supported complex Gaussian mask, unit variance per entry.
MaskSpec build_random_mask(std::size_t d, std::uint64_t seed);

/// True if the PSF matches its periodicity claim to `tol` (vacuously true
/// without a claim).
bool satisfies_period_claim(const PsfSpec& psf, double tol = 1e-12);

/// Largest n + 1 with m_n != 0 (0 for the zero vector).
std::size_t support_extent(const ComplexSignal& x);

// Columnar text: one "index re im" line per entry, families prefixed by the
// mask index.
void write_signal(std::ostream& os, const ComplexSignal& x);
ComplexSignal read_signal(std::istream& is);
void write_family(std::ostream& os, const DerivedMaskFamily& family);
DerivedMaskFamily read_family(std::istream& is);

}  // namespace nfp
