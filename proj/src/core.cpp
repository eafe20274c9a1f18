#include "nfp/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nfp/error.hpp"
#include "nfp/fft.hpp"

namespace nfp {
namespace {

void require_same_length(const ComplexSignal& x, const ComplexSignal& y, const char* op) {
  if (x.size() != y.size()) {
    throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()) + ")");
  }
}

}  // namespace

ComplexSignal ComplexSignal::unit(std::size_t d, std::int64_t j) {
  ComplexSignal e(d);
  e.at(j) = 1.0;
  return e;
}

ComplexSignal operator+(const ComplexSignal& x, const ComplexSignal& y) {
  require_same_length(x, y, "add");
  ComplexSignal r(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) r[n] = x[n] + y[n];
  return r;
}

ComplexSignal operator-(const ComplexSignal& x, const ComplexSignal& y) {
  require_same_length(x, y, "subtract");
  ComplexSignal r(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) r[n] = x[n] - y[n];
  return r;
}

ComplexSignal operator*(cplx c, const ComplexSignal& x) {
  ComplexSignal r(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) r[n] = c * x[n];
  return r;
}

ComplexSignal circular_shift(const ComplexSignal& x, std::int64_t k) {
  const std::size_t d = x.size();
  ComplexSignal r(d);
  if (d == 0) return r;
  const std::size_t s = wrap(k, d);
  for (std::size_t n = 0; n < d; ++n) r[n] = x[(n + s) % d];
  return r;
}

ComplexSignal reversal(const ComplexSignal& x) {
  const std::size_t d = x.size();
  ComplexSignal r(d);
  for (std::size_t n = 0; n < d; ++n) r[n] = x[(d - n) % d];
  return r;
}

ComplexSignal conjugate(const ComplexSignal& x) {
  ComplexSignal r(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) r[n] = std::conj(x[n]);
  return r;
}

ComplexSignal hadamard(const ComplexSignal& x, const ComplexSignal& y) {
  require_same_length(x, y, "hadamard");
  ComplexSignal r(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) r[n] = x[n] * y[n];
  return r;
}

ComplexSignal circular_convolution_direct(const ComplexSignal& x, const ComplexSignal& y) {
  require_same_length(x, y, "circular_convolution");
  const std::size_t d = x.size();
  ComplexSignal r(d);
  for (std::size_t n = 0; n < d; ++n) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < d; ++k) acc += x[k] * y[(n + d - k) % d];
    r[n] = acc;
  }
  return r;
}

ComplexSignal circular_convolution_fft(const ComplexSignal& x, const ComplexSignal& y) {
  require_same_length(x, y, "circular_convolution");
  return idft(hadamard(dft(x), dft(y)));
}

ComplexSignal circular_convolution(const ComplexSignal& x, const ComplexSignal& y) {
  if (x.size() > kConvolutionDirectMax) return circular_convolution_fft(x, y);
  return circular_convolution_direct(x, y);
}

ComplexSignal dft(const ComplexSignal& x) {
  ComplexSignal r(x.size());
  fft::transform(x.values(), r.values(), fft::Direction::Forward);
  return r;
}

ComplexSignal idft(const ComplexSignal& x) {
  ComplexSignal r(x.size());
  fft::transform(x.values(), r.values(), fft::Direction::Backward);
  const double scale = x.empty() ? 1.0 : 1.0 / static_cast<double>(x.size());
  for (auto& v : r) v *= scale;
  return r;
}

cplx inner(const ComplexSignal& x, const ComplexSignal& y) {
  require_same_length(x, y, "inner");
  cplx acc{0.0, 0.0};
  for (std::size_t n = 0; n < x.size(); ++n) acc += x[n] * std::conj(y[n]);
  return acc;
}

double norm2_squared(const ComplexSignal& x) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return acc;
}

double norm2(const ComplexSignal& x) { return std::sqrt(norm2_squared(x)); }

double norm_inf(const ComplexSignal& x) {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> magnitudes(const ComplexSignal& x) {
  std::vector<double> r(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) r[n] = std::abs(x[n]);
  return r;
}

double phase_aligned_distance(const ComplexSignal& x, const ComplexSignal& y) {
  // ||x - e^{i phi} y||^2 is minimised at phi = arg <x, y>. The residual is
  // summed directly since the expanded form cancels catastrophically.
  if (x.size() != y.size()) throw DimensionError("phase_aligned_distance: length mismatch");
  const cplx ip = inner(x, y);
  const double r = std::abs(ip);
  const cplx rot = r > 0.0 ? ip / r : cplx{1.0, 0.0};
  double sq = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) sq += std::norm(x[n] - rot * y[n]);
  return std::sqrt(sq);
}

}  // namespace nfp
