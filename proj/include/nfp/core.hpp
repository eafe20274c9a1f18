#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace nfp {

using cplx = std::complex<double>;

/// Non-negative remainder of n modulo d (d > 0).
inline std::size_t wrap(std::int64_t n, std::size_t d) {
  const auto dd = static_cast<std::int64_t>(d);
  const std::int64_t r = n % dd;
  return static_cast<std::size_t>(r < 0 ? r + dd : r);
}

/// Length-d complex vector. All indexing through at() is taken modulo d.
class ComplexSignal {
 public:
  ComplexSignal() = default;
  explicit ComplexSignal(std::size_t d) : v_(d, cplx{0.0, 0.0}) {}
  explicit ComplexSignal(std::vector<cplx> values) : v_(std::move(values)) {}
  ComplexSignal(std::initializer_list<cplx> values) : v_(values) {}

  static ComplexSignal zeros(std::size_t d) { return ComplexSignal(d); }
  static ComplexSignal constant(std::size_t d, cplx c) {
    return ComplexSignal(std::vector<cplx>(d, c));
  }
  /// Standard basis vector e_j (indices wrap).
  static ComplexSignal unit(std::size_t d, std::int64_t j);

  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  cplx& operator[](std::size_t n) { return v_[n]; }
  const cplx& operator[](std::size_t n) const { return v_[n]; }

  /// Circular access: x_{n mod d}.
  const cplx& at(std::int64_t n) const { return v_[wrap(n, v_.size())]; }
  cplx& at(std::int64_t n) { return v_[wrap(n, v_.size())]; }

  std::span<const cplx> values() const { return v_; }
  std::span<cplx> values() { return v_; }
  const std::vector<cplx>& vec() const { return v_; }

  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }
  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }

  bool operator==(const ComplexSignal&) const = default;

 private:
  std::vector<cplx> v_;
};

ComplexSignal operator+(const ComplexSignal& x, const ComplexSignal& y);
ComplexSignal operator-(const ComplexSignal& x, const ComplexSignal& y);
ComplexSignal operator*(cplx c, const ComplexSignal& x);

/// (S_k x)_n = x_{n+k}.
ComplexSignal circular_shift(const ComplexSignal& x, std::int64_t k);

/// x~_n = x_{-n}.
ComplexSignal reversal(const ComplexSignal& x);

ComplexSignal conjugate(const ComplexSignal& x);

/// Pointwise product. Throws DimensionError on length mismatch.
ComplexSignal hadamard(const ComplexSignal& x, const ComplexSignal& y);

/// (x * y)_n = sum_k x_k y_{n-k}. Uses the DFT path above
/// kConvolutionDirectMax and the direct sum otherwise.
ComplexSignal circular_convolution(const ComplexSignal& x, const ComplexSignal& y);
ComplexSignal circular_convolution_direct(const ComplexSignal& x, const ComplexSignal& y);
ComplexSignal circular_convolution_fft(const ComplexSignal& x, const ComplexSignal& y);

inline constexpr std::size_t kConvolutionDirectMax = 64;

/// Unnormalized forward DFT, x^_n = sum_k x_k e^{-2 pi i nk/d}.
ComplexSignal dft(const ComplexSignal& x);
/// Inverse DFT with the 1/d factor.
ComplexSignal idft(const ComplexSignal& x);

/// <x, y> = sum_n x_n conj(y_n).
cplx inner(const ComplexSignal& x, const ComplexSignal& y);

double norm2(const ComplexSignal& x);
double norm2_squared(const ComplexSignal& x);
double norm_inf(const ComplexSignal& x);

/// Entrywise magnitudes |x_n|.
std::vector<double> magnitudes(const ComplexSignal& x);

/// min over phi of ||x - e^{i phi} y||_2, in closed form.
double phase_aligned_distance(const ComplexSignal& x, const ComplexSignal& y);

}  // namespace nfp
