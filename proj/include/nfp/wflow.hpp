#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nfp/core.hpp"
#include "nfp/masks.hpp"
#include "nfp/measure.hpp"

namespace nfp {

/// Vectorized phaseless problem y_n = |a_n* z|^2, n in [KL]_0, with sensing
/// vectors a_n = S_{-floor(n/L)} m_check_{n mod L}.
struct WFProblem {
  std::size_t d = 0;
  std::size_t K = 0;
  std::size_t L = 0;
  std::vector<double> y;
  /// Row n holds a_n* so that (A z)_n = a_n* z.
  Eigen::MatrixXcd sensing_adjoint;

  std::size_t size() const { return y.size(); }
  /// a_n as a signal.
  ComplexSignal sensing_vector(std::size_t n) const;
};

/// mu_tau = min(1 - e^{-tau/330}, 0.4).
double default_stepsize(std::size_t tau);

struct WFConfig {
  std::size_t iterations = 2000;
  std::function<double(std::size_t)> stepsize = default_stepsize;
  /// Starting point; the spectral initializer is used when absent.
  std::optional<ComplexSignal> initial;
};

struct WFTraceEntry {
  std::size_t iteration = 0;
  double loss = 0.0;
  /// Relative phase-aligned error against a known truth, if supplied.
  std::optional<double> relative_error;
};

struct WFResult {
  ComplexSignal estimate;
  ComplexSignal initial;
  std::vector<WFTraceEntry> trace;
};

/// Reshapes far-field intensities over [K]_0 x [L]_0 into a WFProblem.
WFProblem vectorize_measurements(const MeasurementGrid& far, const DerivedMaskFamily& family);

/// f(z) = (1/KL) sum_n (|a_n* z|^2 - y_n)^2.
double wf_loss(const WFProblem& prob, const ComplexSignal& z);

/// Wirtinger gradient df/dconj(z) = (2/KL) sum_n (|a_n* z|^2 - y_n) a_n a_n* z,
/// so that the directional derivative of f along h is 2 Re <grad, h>.
ComplexSignal wf_gradient(const WFProblem& prob, const ComplexSignal& z);

struct SpectralInitOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 5000;
};

/// lambda v with v the unit top eigenvector of (1/KL) sum_n y_n a_n a_n*
/// and lambda = sqrt(d sum_n y_n / sum_n ||a_n||^2).
ComplexSignal spectral_init(const WFProblem& prob, const SpectralInitOptions& opts = {});

/// Rescales a_n -> c a_n and y_n -> c^2 y_n, which leaves the solution set
/// unchanged, so that the top eigenvalue of (1/KL) sum_n y_n a_n a_n* equals
/// 2 lambda^2, its expected value for isotropic complex Gaussian sensing
/// vectors. This puts the step rule mu/||z_0||^2 on the scale it was designed
/// for. Returns c^2 (1 when all intensities vanish).
double calibrate_sensing_scale(WFProblem& prob, const SpectralInitOptions& opts = {});

/// z_{tau+1} = z_tau - mu_{tau+1}/||z_0||^2 g(z_tau) for tau in [T]_0, with
/// g = (1/KL) sum_n (|a_n* z|^2 - y_n) a_n a_n* z, half of wf_gradient. The
/// default step rule is tuned for this scaling; with the full gradient it
/// diverges even on i.i.d. Gaussian sensing vectors.
WFResult run_wf(const WFProblem& prob, const WFConfig& cfg,
                const std::optional<ComplexSignal>& truth = std::nullopt);

/// CSV with header "iteration,loss,relative_error" (empty cell when unknown).
void write_trace_csv(std::ostream& os, const std::vector<WFTraceEntry>& trace);

}  // namespace nfp
