#include "nfp/lift.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "nfp/error.hpp"
#include "nfp/fft.hpp"

namespace nfp {

std::vector<std::size_t> near_to_far_permutation(const MeasurementGrid& near) {
  const IndexSet& idx = near.index;
  const std::size_t d = idx.d;
  std::vector<std::size_t> perm(idx.size());
  switch (idx.kind) {
    case IndexKind::FullGrid: {
      const std::size_t q = idx.L;
      if (d % q != 0) {
        throw ConfigurationError("rearrangement needs 2*delta-1 = " + std::to_string(q) +
                                 " to divide d = " + std::to_string(d));
      }
      if (!near.psf_period || *near.psf_period == 0 || q % *near.psf_period != 0) {
        throw ConfigurationError("full-grid rearrangement needs a PSF that is " + std::to_string(q) +
                                 "-periodic");
      }
      for (std::size_t k = 0; k < d; ++k) {
        const auto ki = static_cast<std::int64_t>(k);
        const std::size_t row = wrap(-ki, d);
        for (std::size_t l = 0; l < q; ++l) {
          perm[k * q + l] = row * q + wrap(ki - static_cast<std::int64_t>(l), q);
        }
      }
      return perm;
    }
    case IndexKind::DiagonalBand:
      // Values are already stored in generating order (k, l).
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      return perm;
    case IndexKind::Rectangle:
      break;
  }
  throw ConfigurationError("grid is already in far-field coordinates");
}

MeasurementGrid rearrange_near_to_far(const MeasurementGrid& near) {
  const auto perm = near_to_far_permutation(near);
  MeasurementGrid far;
  far.index = IndexSet::rectangle(near.index.d, near.index.K, near.index.L);
  far.delta = near.delta;
  far.psf_period = near.psf_period;
  far.snr_db = near.snr_db;
  far.values.resize(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) far.values[i] = near.values[perm[i]];
  if (near.noise) {
    std::vector<double> noise(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) noise[i] = (*near.noise)[perm[i]];
    far.noise = std::move(noise);
  }
  return far;
}

LiftedVector pack_lifted(const ComplexSignal& x, std::size_t delta) {
  const BandedAutocorrelation X = BandedAutocorrelation::from_signal(x, delta);
  return LiftedVector{x.size(), delta, X.slots()};
}

BandedAutocorrelation unpack_lifted(const LiftedVector& z) {
  return BandedAutocorrelation(z.d, z.delta, z.z);
}

LiftedOperator::LiftedOperator(std::size_t d, std::size_t delta, std::vector<Eigen::MatrixXcd> blocks)
    : d_(d), delta_(delta), blocks_(std::move(blocks)) {
  if (delta == 0 || d == 0) throw ConfigurationError("lifted operator needs d, delta >= 1");
  if (blocks_.size() != delta) {
    throw DimensionError("lifted operator expects " + std::to_string(delta) + " blocks, got " +
                         std::to_string(blocks_.size()));
  }
  const auto q = static_cast<Eigen::Index>(width());
  for (const auto& b : blocks_) {
    if (b.rows() != q || b.cols() != q) throw DimensionError("lifted block has wrong shape");
  }
}

std::vector<cplx> LiftedOperator::apply(const std::vector<cplx>& z) const {
  if (z.size() != dimension()) throw DimensionError("lifted apply: vector length mismatch");
  const std::size_t q = width();
  std::vector<cplx> y(dimension(), cplx{0.0, 0.0});
  for (std::size_t k = 0; k < d_; ++k) {
    Eigen::Map<Eigen::VectorXcd> out(y.data() + k * q, static_cast<Eigen::Index>(q));
    for (std::size_t n = 0; n < delta_; ++n) {
      const std::size_t col = (k + n) % d_;
      Eigen::Map<const Eigen::VectorXcd> in(z.data() + col * q, static_cast<Eigen::Index>(q));
      out.noalias() += blocks_[n] * in;
    }
  }
  return y;
}

Eigen::MatrixXcd LiftedOperator::to_dense() const {
  const auto q = static_cast<Eigen::Index>(width());
  const auto D = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(D, D);
  for (std::size_t k = 0; k < d_; ++k) {
    for (std::size_t n = 0; n < delta_; ++n) {
      const auto col = static_cast<Eigen::Index>((k + n) % d_);
      A.block(static_cast<Eigen::Index>(k) * q, col * q, q, q) += blocks_[n];
    }
  }
  return A;
}

Eigen::MatrixXcd LiftedOperator::fourier_block(std::size_t f) const {
  const auto q = static_cast<Eigen::Index>(width());
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(q, q);
  for (std::size_t n = 0; n < delta_; ++n) {
    const std::size_t phase = (f * n) % d_;
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(d_));
    B += w * blocks_[n];
  }
  return B;
}

LiftedOperator assemble_lifted(const DerivedMaskFamily& family, std::size_t d, std::size_t delta) {
  if (delta == 0) throw ConfigurationError("assemble_lifted: delta must be positive");
  const std::size_t q = 2 * delta - 1;
  if (family.count() != q) {
    throw ConfigurationError("assemble_lifted: need " + std::to_string(q) + " masks, got " +
                             std::to_string(family.count()));
  }
  if (family.d() != d) throw DimensionError("assemble_lifted: mask length differs from d");
  if (d < q) {
    throw ConfigurationError("assemble_lifted: 2*delta-1 = " + std::to_string(q) +
                             " exceeds d = " + std::to_string(d));
  }
  for (std::size_t l = 0; l < q; ++l) {
    if (support_extent(family[l]) > delta) {
      throw ConfigurationError("assemble_lifted: mask " + std::to_string(l) + " is not supported in [0, " +
                               std::to_string(delta) + ")");
    }
  }
  const auto qi = static_cast<Eigen::Index>(q);
  const auto di = static_cast<std::int64_t>(delta);
  std::vector<Eigen::MatrixXcd> blocks(delta, Eigen::MatrixXcd::Zero(qi, qi));
  for (std::size_t n = 0; n < delta; ++n) {
    for (std::size_t l = 0; l < q; ++l) {
      const cplx lead = std::conj(family[l][n]);
      for (std::size_t j = 0; j < q; ++j) {
        const std::int64_t s = j < delta ? static_cast<std::int64_t>(j) : static_cast<std::int64_t>(j) - static_cast<std::int64_t>(q);
        const std::int64_t partner = static_cast<std::int64_t>(n) + s;
        if (partner < 0 || partner >= di) continue;
        blocks[n](static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
            lead * family[l][static_cast<std::size_t>(partner)];
      }
    }
  }
  return LiftedOperator(d, delta, std::move(blocks));
}

namespace {

// Applies the length-d DFT along the block index of a d x q block vector.
std::vector<cplx> block_transform(const std::vector<cplx>& v, std::size_t d, std::size_t q, fft::Direction dir) {
  std::vector<cplx> out(v.size());
  std::vector<cplx> seq(d), spec(d);
  for (std::size_t c = 0; c < q; ++c) {
    for (std::size_t k = 0; k < d; ++k) seq[k] = v[k * q + c];
    fft::transform(seq, spec, dir);
    for (std::size_t k = 0; k < d; ++k) out[k * q + c] = spec[k];
  }
  return out;
}

std::vector<Eigen::VectorXd> block_singular_values(const LiftedOperator& M) {
  std::vector<Eigen::VectorXd> sv(M.d());
  for (std::size_t f = 0; f < M.d(); ++f) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M.fourier_block(f));
    sv[f] = svd.singularValues();
  }
  return sv;
}

}  // namespace

LiftedVector solve_lifted(const LiftedOperator& M, const std::vector<cplx>& y, SolveMethod method) {
  if (y.size() != M.dimension()) throw DimensionError("solve_lifted: right-hand side length mismatch");
  const std::size_t d = M.d();
  const std::size_t q = M.width();
  LiftedVector out{d, M.delta(), {}};

  if (method == SolveMethod::Dense) {
    if (M.dimension() > kDenseSolveMaxDimension) {
      throw ConfigurationError("dense lifted solve limited to dimension " +
                               std::to_string(kDenseSolveMaxDimension));
    }
    const Eigen::MatrixXcd A = M.to_dense();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) throw IllPosedOperatorError(0, 0.0);
    Eigen::Map<const Eigen::VectorXcd> rhs(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::VectorXcd z = lu.solve(rhs);
    out.z.assign(z.data(), z.data() + z.size());
    return out;
  }

  // Factor every block first; each block's smallest singular value is
  // estimated from the LU condition estimate, 1/||B^-1||_1, and compared with
  // the largest block norm.
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lus;
  lus.reserve(d);
  std::vector<double> sigma_min(d);
  double global_max = 0.0;
  for (std::size_t f = 0; f < d; ++f) {
    const Eigen::MatrixXcd B = M.fourier_block(f);
    const double norm1 = B.cwiseAbs().colwise().sum().maxCoeff();
    global_max = std::max(global_max, norm1);
    lus.emplace_back(B);
    sigma_min[f] = lus.back().rcond() * norm1;
  }
  for (std::size_t f = 0; f < d; ++f) {
    if (!(sigma_min[f] >= kSingularBlockRatio * global_max) || global_max == 0.0) {
      throw IllPosedOperatorError(f, sigma_min[f]);
    }
  }

  std::vector<cplx> spec = block_transform(y, d, q, fft::Direction::Forward);
  const auto qi = static_cast<Eigen::Index>(q);
  for (std::size_t f = 0; f < d; ++f) {
    Eigen::Map<Eigen::VectorXcd> b(spec.data() + f * q, qi);
    const Eigen::VectorXcd sol = lus[f].solve(b);
    b = sol;
  }
  out.z = block_transform(spec, d, q, fft::Direction::Backward);
  const double scale = 1.0 / static_cast<double>(d);
  for (auto& v : out.z) v *= scale;
  return out;
}

double exponential_mask_condition_bound(std::size_t delta) {
  const double e2 = std::exp(2.0);
  const double dm1 = static_cast<double>(delta) - 1.0;
  return std::max(144.0 * e2, 9.0 * e2 * dm1 * dm1 / 4.0);
}

std::vector<double> singular_values(const LiftedOperator& M) {
  std::vector<double> all;
  all.reserve(M.dimension());
  for (const auto& s : block_singular_values(M)) all.insert(all.end(), s.data(), s.data() + s.size());
  std::sort(all.begin(), all.end());
  return all;
}

ConditioningReport conditioning(const LiftedOperator& M) {
  const auto sv = singular_values(M);
  ConditioningReport r;
  r.d = M.d();
  r.delta = M.delta();
  r.sigma_min = sv.front();
  r.sigma_max = sv.back();
  r.kappa = r.sigma_min > 0.0 ? r.sigma_max / r.sigma_min : std::numeric_limits<double>::infinity();
  r.bound = exponential_mask_condition_bound(M.delta());
  return r;
}

void write_conditioning_csv_header(std::ostream& os) { os << "delta,d,sigma_min,sigma_max,kappa,bound\n"; }

void write_conditioning_csv_row(std::ostream& os, const ConditioningReport& r) {
  os << std::setprecision(17) << r.delta << ',' << r.d << ',' << r.sigma_min << ',' << r.sigma_max << ','
     << r.kappa << ',' << r.bound << '\n';
}

}  // namespace nfp
