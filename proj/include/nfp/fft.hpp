#pragma once

#include <complex>
#include <span>

namespace nfp::fft {

enum class Direction { Forward, Backward };

/// Out-of-place unnormalized transform of arbitrary length backed by FFTW.
/// Plans are cached per (length, direction); safe to call from several
/// threads.
void transform(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out, Direction dir);

}  // namespace nfp::fft
