#include "nfp/band.hpp"

#include <string>

#include "nfp/error.hpp"

namespace nfp {

BandedAutocorrelation::BandedAutocorrelation(std::size_t d, std::size_t delta)
    : BandedAutocorrelation(d, delta, std::vector<cplx>(d * (delta == 0 ? 0 : 2 * delta - 1))) {}

BandedAutocorrelation::BandedAutocorrelation(std::size_t d, std::size_t delta, std::vector<cplx> slots)
    : d_(d), delta_(delta), slots_(std::move(slots)) {
  if (delta == 0) throw ConfigurationError("band needs delta >= 1");
  if (2 * delta - 1 > d) {
    throw ConfigurationError("band width 2*delta-1 = " + std::to_string(2 * delta - 1) +
                             " exceeds d = " + std::to_string(d));
  }
  if (slots_.size() != d * width()) {
    throw DimensionError("band storage has " + std::to_string(slots_.size()) + " entries, expected " +
                         std::to_string(d * width()));
  }
}

BandedAutocorrelation BandedAutocorrelation::from_signal(const ComplexSignal& x, std::size_t delta) {
  BandedAutocorrelation X(x.size(), delta);
  for (std::size_t i = 0; i < X.d(); ++i) {
    for (std::size_t s = 0; s < X.width(); ++s) {
      X.slot(i, s) = x[i] * std::conj(x.at(static_cast<std::int64_t>(i) + X.offset(s)));
    }
  }
  return X;
}

std::int64_t BandedAutocorrelation::offset(std::size_t s) const {
  const auto si = static_cast<std::int64_t>(s);
  return s < delta_ ? si : si - static_cast<std::int64_t>(width());
}

std::optional<std::size_t> BandedAutocorrelation::slot_of(std::int64_t i, std::int64_t j) const {
  const std::size_t diff = wrap(j - i, d_);
  if (diff < delta_) return diff;
  if (d_ - diff < delta_) return width() - (d_ - diff);
  return std::nullopt;
}

cplx BandedAutocorrelation::operator()(std::int64_t i, std::int64_t j) const {
  const auto s = slot_of(i, j);
  return s ? slot(wrap(i, d_), *s) : cplx{0.0, 0.0};
}

void BandedAutocorrelation::set(std::int64_t i, std::int64_t j, cplx v) {
  const auto s = slot_of(i, j);
  if (!s) throw DimensionError("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is off the band");
  slot(wrap(i, d_), *s) = v;
}

Eigen::MatrixXcd BandedAutocorrelation::to_dense() const {
  const auto n = static_cast<Eigen::Index>(d_);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::size_t s = 0; s < width(); ++s) {
      const std::size_t j = wrap(static_cast<std::int64_t>(i) + offset(s), d_);
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = slot(i, s);
    }
  }
  return A;
}

}  // namespace nfp
