#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nfp/core.hpp"

namespace nfp {

/// 10 log10(min_phi ||x - e^{i phi} x_est||^2 / ||x||^2), or -infinity when
/// the residual is below rounding level.
double error_metric(const ComplexSignal& x, const ComplexSignal& x_est);

/// Signal with i.i.d. N(0, 1) real and imaginary parts.
ComplexSignal random_gaussian_signal(std::size_t d, std::uint64_t seed);

/// Independent stream seed for trial `trial_index` of a sweep seeded by `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial_index, std::uint64_t stream = 0);

struct TrialResult {
  double error_db = 0.0;
  double runtime_seconds = 0.0;
  std::string algorithm;
  std::uint64_t seed = 0;
};

/// Seeds of the random draws inside one trial.
struct TrialSeeds {
  std::uint64_t signal = 0;
  std::uint64_t noise = 0;
  std::uint64_t mask = 0;
  static TrialSeeds from(std::uint64_t seed);
};

/// Block phase retrieval on local measurements with the chirp PSF/mask
/// pair: the full grid when 2delta-1 divides d, the diagonal band with
/// d shifts otherwise. An infinite snr_db means noiseless data.
TrialResult run_alg1_trial(std::size_t d, std::size_t delta, double snr_db, std::uint64_t seed);

enum class MaskKind { Global, Local };

/// Wirtinger flow on shifts k in [K]_0 and detector pixels [L]_0. Global
/// masks use the low-pass PSF (gamma = d/3 + 1) and a Gaussian mask; local
/// masks use the chirp pair with delta = (L + 1)/2.
TrialResult run_wf_trial(std::size_t d, std::size_t K, std::size_t L, double snr_db, std::size_t T,
                         MaskKind mask_kind, std::uint64_t seed);

enum class ExperimentKind { Alg1DeltaSweep, Alg1VsAlg2, WfGlobalMask };

std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Alg1DeltaSweep;
  std::size_t d = 0;
  std::vector<std::size_t> deltas;
  std::vector<std::size_t> shifts;
  std::vector<double> snr_db;
  std::vector<std::size_t> iterations;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t threads = 0;
  /// When false the runtime column is written as "nan", making the whole
  /// file reproducible byte for byte.
  bool record_runtime = true;

  /// Throws ConfigurationError when the grid is empty or inconsistent.
  void validate() const;
};

struct SweepRow {
  std::string experiment;
  std::size_t d = 0;
  std::size_t delta_or_K = 0;
  double snr_db = 0.0;
  /// Wirtinger flow iterations; 0 for block phase retrieval rows.
  std::size_t T = 0;
  double mean_error_db = 0.0;
  double mean_runtime_s = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool record_runtime = true);

/// Runs the sweep and writes it to `path`; throws IoError if the file cannot
/// be written.
void run_sweep(const ExperimentConfig& cfg, const std::string& path);

/// Conditioning of the exponential-mask operator at d = multiple * (2delta-1)
/// for each delta, as CSV.
void write_conditioning_sweep(std::ostream& os, const std::vector<std::size_t>& deltas, std::size_t multiple = 3);

}  // namespace nfp
