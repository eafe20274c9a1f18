#include "nfp/masks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "nfp/error.hpp"

namespace nfp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{2 pi i s n^2 / q} with n^2 reduced mod q in integer arithmetic, so the
// result is exactly q-periodic in n.
cplx quadratic_chirp(std::size_t n, std::size_t q, double sign) {
  const std::size_t r = static_cast<std::size_t>((static_cast<unsigned __int128>(n) * n) % q);
  return std::polar(1.0, sign * kTwoPi * static_cast<double>(r) / static_cast<double>(q));
}

void check_delta(std::size_t d, std::size_t delta) {
  if (delta == 0) throw ConfigurationError("mask support delta must be positive");
  if (delta > d) {
    throw DimensionError("mask support delta = " + std::to_string(delta) +
                         " exceeds signal length d = " + std::to_string(d));
  }
}

}  // namespace

double exponential_mask_rate(std::size_t delta) {
  return std::max(4.0, (static_cast<double>(delta) - 1.0) / 2.0);
}

ComplexSignal build_fpr_mask(std::size_t d, std::size_t delta, std::size_t ell) {
  check_delta(d, delta);
  const std::size_t q = 2 * delta - 1;
  if (ell >= q) {
    throw ConfigurationError("modulation index " + std::to_string(ell) + " outside [0, " +
                             std::to_string(q) + ")");
  }
  const double a = exponential_mask_rate(delta);
  const double norm = std::pow(static_cast<double>(q), 0.25);
  ComplexSignal m(d);
  for (std::size_t n = 0; n < delta; ++n) {
    const std::size_t phase = (n * ell) % q;
    m[n] = std::exp(-(static_cast<double>(n) + 1.0) / a) / norm *
           std::polar(1.0, kTwoPi * static_cast<double>(phase) / static_cast<double>(q));
  }
  return m;
}

DerivedMaskFamily build_fpr_family(std::size_t d, std::size_t delta) {
  check_delta(d, delta);
  DerivedMaskFamily family;
  for (std::size_t l = 0; l < 2 * delta - 1; ++l) family.masks.push_back(build_fpr_mask(d, delta, l));
  return family;
}

AdmissiblePair build_admissible_pair(std::size_t d, std::size_t delta) {
  check_delta(d, delta);
  const std::size_t q = 2 * delta - 1;
  if (d % q != 0 && d < 3 * delta - 2) {
    throw ConfigurationError("admissible pair needs 2*delta-1 = " + std::to_string(q) + " to divide d = " +
                             std::to_string(d) + " or d >= 3*delta-2");
  }
  const double a = exponential_mask_rate(delta);
  const double norm = std::pow(static_cast<double>(q), 0.25);

  AdmissiblePair pair;
  pair.psf.p = ComplexSignal(d);
  // Indexed through -n so that p_{-t} is the chirp at t for every t < d.
  for (std::size_t n = 0; n < d; ++n) pair.psf.p[n] = quadratic_chirp((d - n) % d, q, -1.0);
  if (d % q == 0) pair.psf.period = q;

  pair.mask.m = ComplexSignal(d);
  pair.mask.delta = delta;
  for (std::size_t n = 0; n < delta; ++n) {
    pair.mask.m[n] = std::exp(-(static_cast<double>(n) + 1.0) / a) / norm * quadratic_chirp(n, q, 1.0);
  }
  return pair;
}

DerivedMaskFamily derive_masks(const PsfSpec& psf, const MaskSpec& mask, std::size_t L) {
  if (L == 0) throw ConfigurationError("derive_masks: L must be at least 1");
  if (psf.d() != mask.d()) {
    throw DimensionError("derive_masks: PSF length " + std::to_string(psf.d()) +
                         " differs from mask length " + std::to_string(mask.d()));
  }
  const ComplexSignal p_rev = reversal(psf.p);
  DerivedMaskFamily family;
  family.masks.reserve(L);
  for (std::size_t l = 0; l < L; ++l) {
    family.masks.push_back(conjugate(hadamard(circular_shift(p_rev, static_cast<std::int64_t>(l)), mask.m)));
  }
  return family;
}

PsfSpec build_lowpass_psf(std::size_t d, std::size_t gamma) {
  if (gamma == 0 || gamma > d) {
    throw ConfigurationError("low-pass width gamma = " + std::to_string(gamma) +
                             " must lie in [1, d = " + std::to_string(d) + "]");
  }
  if (gamma % 2 == 0) {
    throw ConfigurationError("low-pass width gamma = " + std::to_string(gamma) +
                             " must be odd to be centred");
  }
  ComplexSignal indicator(d);
  for (std::size_t n = 0; n < gamma; ++n) indicator[n] = 1.0;
  const auto half = static_cast<std::int64_t>((gamma - 1) / 2);
  PsfSpec psf;
  psf.p = idft(circular_shift(indicator, -half));
  return psf;
}

MaskSpec build_random_mask(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  MaskSpec mask;
  mask.m = ComplexSignal(d);
  mask.delta = d;
  for (std::size_t n = 0; n < d; ++n) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    mask.m[n] = {re, im};
  }
  return mask;
}

bool satisfies_period_claim(const PsfSpec& psf, double tol) {
  if (!psf.period) return true;
  const std::size_t q = *psf.period;
  if (q == 0) return false;
  const auto d = static_cast<std::int64_t>(psf.d());
  for (std::int64_t n = 0; n < d; ++n) {
    if (std::abs(psf.p.at(n + static_cast<std::int64_t>(q)) - psf.p.at(n)) > tol) return false;
  }
  return true;
}

std::size_t support_extent(const ComplexSignal& x) {
  for (std::size_t n = x.size(); n > 0; --n) {
    if (x[n - 1] != cplx{0.0, 0.0}) return n;
  }
  return 0;
}

void write_signal(std::ostream& os, const ComplexSignal& x) {
  os << "# index re im\n" << std::setprecision(17);
  for (std::size_t n = 0; n < x.size(); ++n) os << n << ' ' << x[n].real() << ' ' << x[n].imag() << '\n';
}

void write_family(std::ostream& os, const DerivedMaskFamily& family) {
  os << "# mask index re im\n" << std::setprecision(17);
  for (std::size_t l = 0; l < family.count(); ++l) {
    for (std::size_t n = 0; n < family[l].size(); ++n) {
      os << l << ' ' << n << ' ' << family[l][n].real() << ' ' << family[l][n].imag() << '\n';
    }
  }
}

namespace {

// Yields the numeric columns of each non-comment line.
template <typename F>
void for_each_row(std::istream& is, std::size_t columns, F&& f) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row(columns);
    for (auto& v : row) {
      if (!(ls >> v)) throw IoError("malformed row at line " + std::to_string(lineno));
    }
    f(row, lineno);
  }
}

std::size_t as_index(double v, std::size_t lineno) {
  if (v < 0 || v != std::floor(v)) throw IoError("bad index at line " + std::to_string(lineno));
  return static_cast<std::size_t>(v);
}

}  // namespace

ComplexSignal read_signal(std::istream& is) {
  std::vector<cplx> values;
  for_each_row(is, 3, [&](const std::vector<double>& row, std::size_t lineno) {
    if (as_index(row[0], lineno) != values.size()) {
      throw IoError("non-contiguous index at line " + std::to_string(lineno));
    }
    values.emplace_back(row[1], row[2]);
  });
  return ComplexSignal(std::move(values));
}

DerivedMaskFamily read_family(std::istream& is) {
  std::vector<std::vector<cplx>> masks;
  for_each_row(is, 4, [&](const std::vector<double>& row, std::size_t lineno) {
    const std::size_t l = as_index(row[0], lineno);
    const std::size_t n = as_index(row[1], lineno);
    if (l == masks.size() && n == 0) masks.emplace_back();
    if (masks.empty() || l != masks.size() - 1 || n != masks.back().size()) {
      throw IoError("non-contiguous mask/index at line " + std::to_string(lineno));
    }
    masks.back().emplace_back(row[2], row[3]);
  });
  DerivedMaskFamily family;
  for (auto& m : masks) {
    if (!family.masks.empty() && m.size() != family.d()) throw IoError("masks of unequal length");
    family.masks.emplace_back(std::move(m));
  }
  return family;
}

}  // namespace nfp
