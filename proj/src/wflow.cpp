#include "nfp/wflow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "nfp/error.hpp"

namespace nfp {
namespace {

Eigen::VectorXcd to_eigen(const ComplexSignal& x) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t n = 0; n < x.size(); ++n) v(static_cast<Eigen::Index>(n)) = x[n];
  return v;
}

ComplexSignal from_eigen(const Eigen::VectorXcd& v) {
  ComplexSignal x(static_cast<std::size_t>(v.size()));
  for (Eigen::Index n = 0; n < v.size(); ++n) x[static_cast<std::size_t>(n)] = v(n);
  return x;
}

Eigen::Map<const Eigen::VectorXd> measurements(const WFProblem& prob) {
  return {prob.y.data(), static_cast<Eigen::Index>(prob.y.size())};
}

// Residuals r_n = |a_n* z|^2 - y_n for the amplitudes Az.
Eigen::VectorXd residuals(const WFProblem& prob, const Eigen::VectorXcd& Az) {
  return Az.cwiseAbs2() - measurements(prob);
}

void check_length(const WFProblem& prob, const ComplexSignal& z) {
  if (z.size() != prob.d) throw DimensionError("Wirtinger flow: iterate length differs from d");
}

}  // namespace

ComplexSignal WFProblem::sensing_vector(std::size_t n) const {
  const Eigen::VectorXcd row = sensing_adjoint.row(static_cast<Eigen::Index>(n)).conjugate().transpose();
  return from_eigen(row);
}

double default_stepsize(std::size_t tau) {
  return std::min(1.0 - std::exp(-static_cast<double>(tau) / 330.0), 0.4);
}

WFProblem vectorize_measurements(const MeasurementGrid& far, const DerivedMaskFamily& family) {
  if (far.index.kind != IndexKind::Rectangle) {
    throw DimensionError("vectorize_measurements: grid must be in far-field [K]x[L] form");
  }
  const std::size_t K = far.index.K;
  const std::size_t L = far.index.L;
  const std::size_t d = far.d();
  if (family.count() < L) {
    throw DimensionError("vectorize_measurements: family has " + std::to_string(family.count()) +
                         " masks, grid needs " + std::to_string(L));
  }
  if (family.d() != d) throw DimensionError("vectorize_measurements: mask length differs from d");
  if (far.values.size() != K * L) throw DimensionError("vectorize_measurements: grid size is not K*L");

  WFProblem prob;
  prob.d = d;
  prob.K = K;
  prob.L = L;
  prob.y = far.values;
  prob.sensing_adjoint.resize(static_cast<Eigen::Index>(K * L), static_cast<Eigen::Index>(d));
  for (std::size_t n = 0; n < K * L; ++n) {
    const auto shift = -static_cast<std::int64_t>(n / L);
    const ComplexSignal a = circular_shift(family[n % L], shift);
    for (std::size_t j = 0; j < d; ++j) {
      prob.sensing_adjoint(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = std::conj(a[j]);
    }
  }
  return prob;
}

double wf_loss(const WFProblem& prob, const ComplexSignal& z) {
  check_length(prob, z);
  const Eigen::VectorXcd Az = prob.sensing_adjoint * to_eigen(z);
  return residuals(prob, Az).squaredNorm() / static_cast<double>(prob.size());
}

ComplexSignal wf_gradient(const WFProblem& prob, const ComplexSignal& z) {
  check_length(prob, z);
  const Eigen::VectorXcd Az = prob.sensing_adjoint * to_eigen(z);
  const Eigen::VectorXcd weighted = residuals(prob, Az).cwiseProduct(Az);
  const Eigen::VectorXcd g = (2.0 / static_cast<double>(prob.size())) * (prob.sensing_adjoint.adjoint() * weighted);
  return from_eigen(g);
}

namespace {

struct SpectralMatrix {
  Eigen::MatrixXcd Y;
  // Upper bound on the magnitude of the negative part of Y.
  double shift = 0.0;
  double lambda = 0.0;
};

SpectralMatrix spectral_matrix(const WFProblem& prob) {
  if (prob.size() == 0) throw ConfigurationError("spectral_init: no measurements");
  const auto y = measurements(prob);
  const double sum_a = prob.sensing_adjoint.squaredNorm();
  if (sum_a == 0.0) throw DegenerateInputError("spectral_init: all sensing vectors vanish");
  SpectralMatrix s;
  s.lambda = std::sqrt(std::max(0.0, static_cast<double>(prob.d) * y.sum() / sum_a));
  if (s.lambda == 0.0) return s;
  const double inv_m = 1.0 / static_cast<double>(prob.size());
  const Eigen::MatrixXcd& A = prob.sensing_adjoint;
  s.Y = inv_m * (A.adjoint() * (y.asDiagonal() * A));
  const Eigen::VectorXd row_norms = A.rowwise().squaredNorm();
  s.shift = inv_m * (-y.array().min(0.0)).matrix().dot(row_norms);
  return s;
}

// Power iteration on Y + shift I; returns the unit top eigenvector of Y and
// its eigenvalue.
std::pair<Eigen::VectorXcd, double> top_eigenpair(const SpectralMatrix& s, const SpectralInitOptions& opts) {
  const Eigen::Index n = s.Y.rows();
  Eigen::VectorXcd v(n);
  // Constant start with a small fixed ramp so it is not orthogonal to the
  // target by symmetry.
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(1.0, 1e-3 * static_cast<double>(i));
  v.normalize();
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXcd Yv = s.Y * v;
    const double rho = v.dot(Yv).real();
    residual = (Yv - rho * v).norm();
    if (residual <= opts.tolerance * std::abs(rho)) return {v, rho};
    v = (Yv + s.shift * v).normalized();
  }
  throw ConvergenceError("spectral initialization power iteration did not converge", residual);
}

}  // namespace

ComplexSignal spectral_init(const WFProblem& prob, const SpectralInitOptions& opts) {
  const SpectralMatrix s = spectral_matrix(prob);
  if (s.lambda == 0.0) return ComplexSignal(prob.d);
  return from_eigen(s.lambda * top_eigenpair(s, opts).first);
}

double calibrate_sensing_scale(WFProblem& prob, const SpectralInitOptions& opts) {
  const SpectralMatrix s = spectral_matrix(prob);
  if (s.lambda == 0.0) return 1.0;
  const double rho = top_eigenpair(s, opts).second;
  if (!(rho > 0.0)) throw DegenerateInputError("calibrate_sensing_scale: spectral matrix has no positive eigenvalue");
  // Y scales as c^4 while lambda is invariant.
  const double c2 = std::sqrt(2.0 * s.lambda * s.lambda / rho);
  prob.sensing_adjoint *= std::sqrt(c2);
  for (auto& v : prob.y) v *= c2;
  return c2;
}

WFResult run_wf(const WFProblem& prob, const WFConfig& cfg, const std::optional<ComplexSignal>& truth) {
  WFResult result;
  result.initial = cfg.initial ? *cfg.initial : spectral_init(prob);
  check_length(prob, result.initial);
  const double z0_norm2 = norm2_squared(result.initial);
  if (z0_norm2 == 0.0) throw DegenerateInputError("Wirtinger flow: initial point is zero");
  double truth_norm = 0.0;
  if (truth) {
    check_length(prob, *truth);
    truth_norm = norm2(*truth);
    if (truth_norm == 0.0) throw DegenerateInputError("Wirtinger flow: truth is zero");
  }

  const Eigen::MatrixXcd& A = prob.sensing_adjoint;
  const double inv_m = 1.0 / static_cast<double>(prob.size());
  Eigen::VectorXcd z = to_eigen(result.initial);
  result.trace.reserve(cfg.iterations + 1);

  auto record = [&](std::size_t tau, const Eigen::VectorXd& r) {
    WFTraceEntry e{tau, r.squaredNorm() * inv_m, std::nullopt};
    if (!std::isfinite(e.loss)) throw DivergenceError(tau);
    if (truth) e.relative_error = phase_aligned_distance(*truth, from_eigen(z)) / truth_norm;
    result.trace.push_back(e);
  };

  Eigen::VectorXcd Az = A * z;
  Eigen::VectorXd r = residuals(prob, Az);
  record(0, r);
  for (std::size_t tau = 0; tau < cfg.iterations; ++tau) {
    // Half the Wirtinger gradient: the step rule is stated for
    // (1/KL) sum_n r_n a_n a_n* z.
    const Eigen::VectorXcd step_dir = inv_m * (A.adjoint() * r.cwiseProduct(Az));
    z -= (cfg.stepsize(tau + 1) / z0_norm2) * step_dir;
    Az.noalias() = A * z;
    r = residuals(prob, Az);
    record(tau + 1, r);
  }
  result.estimate = from_eigen(z);
  return result;
}

void write_trace_csv(std::ostream& os, const std::vector<WFTraceEntry>& trace) {
  os << "iteration,loss,relative_error\n" << std::setprecision(17);
  for (const auto& e : trace) {
    os << e.iteration << ',' << e.loss << ',';
    if (e.relative_error) os << *e.relative_error;
    os << '\n';
  }
}

}  // namespace nfp
