#include "nfp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "nfp/angsync.hpp"
#include "nfp/error.hpp"
#include "nfp/lift.hpp"
#include "nfp/masks.hpp"
#include "nfp/measure.hpp"
#include "nfp/wflow.hpp"

namespace nfp {
namespace {

using Clock = std::chrono::steady_clock;

// Squared relative residuals at or below this are rounding noise.
constexpr double kExactRatio = 64.0 * std::numeric_limits<double>::epsilon() * std::numeric_limits<double>::epsilon();

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

NoiseSpec noise_for(double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return NoiseSpec::none();
  return NoiseSpec{snr_db, seed, false};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// One (grid point, trial) unit of work.
struct Job {
  std::size_t row = 0;
  std::size_t trial = 0;
};

struct RowPlan {
  SweepRow row;
  std::size_t delta = 0;
  std::size_t K = 0;
  std::size_t L = 0;
  bool wirtinger = false;
  MaskKind mask = MaskKind::Local;
};

std::vector<RowPlan> plan_rows(const ExperimentConfig& cfg) {
  std::vector<RowPlan> plans;
  auto base = [&](const std::string& name, std::size_t param, double snr, std::size_t T) {
    RowPlan p;
    p.row.experiment = name;
    p.row.d = cfg.d;
    p.row.delta_or_K = param;
    p.row.snr_db = snr;
    p.row.T = T;
    p.row.trials = cfg.trials;
    p.row.seed = cfg.seed;
    return p;
  };
  switch (cfg.kind) {
    case ExperimentKind::Alg1DeltaSweep:
      for (std::size_t delta : cfg.deltas) {
        for (double snr : cfg.snr_db) {
          RowPlan p = base("alg1_delta_sweep", delta, snr, 0);
          p.delta = delta;
          plans.push_back(p);
        }
      }
      break;
    case ExperimentKind::Alg1VsAlg2:
      for (std::size_t delta : cfg.deltas) {
        for (double snr : cfg.snr_db) {
          RowPlan p = base("alg1_vs_alg2_blockpr", delta, snr, 0);
          p.delta = delta;
          plans.push_back(p);
          for (std::size_t T : cfg.iterations) {
            RowPlan w = base("alg1_vs_alg2_wf", delta, snr, T);
            w.wirtinger = true;
            w.K = cfg.d;
            w.L = 2 * delta - 1;
            w.mask = MaskKind::Local;
            plans.push_back(w);
          }
        }
      }
      break;
    case ExperimentKind::WfGlobalMask:
      for (std::size_t K : cfg.shifts) {
        for (double snr : cfg.snr_db) {
          for (std::size_t T : cfg.iterations) {
            RowPlan w = base("wf_global_mask", K, snr, T);
            w.wirtinger = true;
            w.K = K;
            w.L = cfg.d;
            w.mask = MaskKind::Global;
            plans.push_back(w);
          }
        }
      }
      break;
  }
  return plans;
}

}  // namespace

double error_metric(const ComplexSignal& x, const ComplexSignal& x_est) {
  const double nx = norm2_squared(x);
  if (nx == 0.0) throw DegenerateInputError("error metric: reference signal is zero");
  const double dist = phase_aligned_distance(x, x_est);
  const double ratio = dist * dist / nx;
  if (ratio <= kExactRatio) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ratio);
}

ComplexSignal random_gaussian_signal(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexSignal x(d);
  for (auto& v : x) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v = {re, im};
  }
  return x;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial_index, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ trial_index) ^ (stream * 0x2545f4914f6cdd1dULL));
}

TrialSeeds TrialSeeds::from(std::uint64_t seed) {
  return TrialSeeds{trial_seed(seed, 0, 1), trial_seed(seed, 0, 2), trial_seed(seed, 0, 3)};
}

TrialResult run_alg1_trial(std::size_t d, std::size_t delta, double snr_db, std::uint64_t seed) {
  const std::size_t q = 2 * delta - 1;
  if (delta == 0 || (d % q != 0 && d < 3 * delta - 2)) {
    throw ConfigurationError("block phase retrieval needs 2*delta-1 to divide d or d >= 3*delta-2 (d = " +
                             std::to_string(d) + ", delta = " + std::to_string(delta) + ")");
  }
  const TrialSeeds seeds = TrialSeeds::from(seed);
  const ComplexSignal x = random_gaussian_signal(d, seeds.signal);
  const AdmissiblePair pair = build_admissible_pair(d, delta);
  // Without a period the full grid cannot be rearranged; use the band.
  const IndexSet index = d % q == 0 ? IndexSet::full_grid(d, delta) : IndexSet::diagonal_band(d, d, q);
  const MeasurementGrid clean = forward_nfp(x, pair.psf, pair.mask, index);
  const MeasurementGrid noisy = add_noise(clean, noise_for(snr_db, seeds.noise));

  const auto start = Clock::now();
  const MeasurementGrid far = rearrange_near_to_far(noisy);
  const DerivedMaskFamily family = derive_masks(pair.psf, pair.mask, q);
  const LiftedOperator M = assemble_lifted(family, d, delta);
  const std::vector<cplx> rhs(far.values.begin(), far.values.end());
  const BandedAutocorrelation X = unpack_lifted(solve_lifted(M, rhs));
  const std::vector<double> mags = estimate_magnitudes(X);
  const ComplexSignal phases = sync_weighted_laplacian(X, EigenIterationOptions{1e-10, 500});
  const ComplexSignal x_est = assemble_estimate(phases, mags);
  const double runtime = seconds_since(start);

  return TrialResult{error_metric(x, x_est), runtime, "alg1", seed};
}

TrialResult run_wf_trial(std::size_t d, std::size_t K, std::size_t L, double snr_db, std::size_t T,
                         MaskKind mask_kind, std::uint64_t seed) {
  const TrialSeeds seeds = TrialSeeds::from(seed);
  const ComplexSignal x = random_gaussian_signal(d, seeds.signal);
  PsfSpec psf;
  MaskSpec mask;
  if (mask_kind == MaskKind::Global) {
    psf = build_lowpass_psf(d, d / 3 + 1);
    mask = build_random_mask(d, seeds.mask);
  } else {
    if (L % 2 == 0) throw ConfigurationError("local masks need an odd detector count L = 2*delta-1");
    AdmissiblePair pair = build_admissible_pair(d, (L + 1) / 2);
    psf = std::move(pair.psf);
    mask = std::move(pair.mask);
  }
  const MeasurementGrid clean = forward_nfp(x, psf, mask, IndexSet::diagonal_band(d, K, L));
  const MeasurementGrid noisy = add_noise(clean, noise_for(snr_db, seeds.noise));

  const auto start = Clock::now();
  const MeasurementGrid far = rearrange_near_to_far(noisy);
  WFProblem prob = vectorize_measurements(far, derive_masks(psf, mask, L));
  calibrate_sensing_scale(prob);
  WFConfig cfg;
  cfg.iterations = T;
  const WFResult res = run_wf(prob, cfg);
  const double runtime = seconds_since(start);

  return TrialResult{error_metric(x, res.estimate), runtime, "alg2", seed};
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Alg1DeltaSweep:
      return "alg1_delta_sweep";
    case ExperimentKind::Alg1VsAlg2:
      return "alg1_vs_alg2";
    case ExperimentKind::WfGlobalMask:
      return "wf_global_mask";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw ConfigurationError("trials must be at least 1");
  if (d == 0) throw ConfigurationError("d must be positive");
  if (snr_db.empty()) throw ConfigurationError("at least one SNR value is required");
  for (double s : snr_db) {
    if (std::isnan(s)) throw ConfigurationError("SNR values must be numbers");
  }
  if (kind == ExperimentKind::WfGlobalMask) {
    if (shifts.empty()) throw ConfigurationError("at least one shift count K is required");
    for (std::size_t K : shifts) {
      if (K == 0 || K > d) throw ConfigurationError("shift count K must lie in [1, d]");
    }
    if (d / 3 + 1 > d || (d / 3 + 1) % 2 == 0) {
      throw ConfigurationError("low-pass width d/3 + 1 must be odd; got d = " + std::to_string(d));
    }
  } else {
    if (deltas.empty()) throw ConfigurationError("at least one delta is required");
    for (std::size_t delta : deltas) {
      if (delta < 2) throw ConfigurationError("delta must be at least 2");
      if (d % (2 * delta - 1) != 0 && d < 3 * delta - 2) {
        throw ConfigurationError("2*delta-1 = " + std::to_string(2 * delta - 1) + " does not divide d = " +
                                 std::to_string(d) + " and d < 3*delta-2");
      }
    }
  }
  if (kind != ExperimentKind::Alg1DeltaSweep && iterations.empty()) {
    throw ConfigurationError("at least one iteration count T is required");
  }
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<RowPlan> plans = plan_rows(cfg);
  std::vector<Job> jobs;
  jobs.reserve(plans.size() * cfg.trials);
  for (std::size_t r = 0; r < plans.size(); ++r) {
    for (std::size_t t = 0; t < cfg.trials; ++t) jobs.push_back({r, t});
  }

  std::vector<TrialResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const RowPlan& p = plans[jobs[i].row];
        // Trials share their seed across grid points so that every row sees
        // the same signals.
        const std::uint64_t s = trial_seed(cfg.seed, jobs[i].trial);
        results[i] = p.wirtinger ? run_wf_trial(cfg.d, p.K, p.L, p.row.snr_db, p.row.T, p.mask, s)
                                 : run_alg1_trial(cfg.d, p.delta, p.row.snr_db, s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  rows.reserve(plans.size());
  for (std::size_t r = 0; r < plans.size(); ++r) {
    SweepRow row = plans[r].row;
    double err = 0.0;
    double time = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      err += results[r * cfg.trials + t].error_db;
      time += results[r * cfg.trials + t].runtime_seconds;
    }
    row.mean_error_db = err / static_cast<double>(cfg.trials);
    row.mean_runtime_s = cfg.record_runtime ? time / static_cast<double>(cfg.trials)
                                            : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool record_runtime) {
  os << "experiment,d,delta_or_K,snr_db,T,mean_error_db,mean_runtime_s,trials,seed\n";
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.d << ',' << r.delta_or_K << ',' << format_double(r.snr_db) << ',' << r.T << ','
       << format_double(r.mean_error_db) << ','
       << (record_runtime ? format_double(r.mean_runtime_s) : std::string("nan")) << ',' << r.trials << ','
       << r.seed << '\n';
  }
}

void run_sweep(const ExperimentConfig& cfg, const std::string& path) {
  const auto rows = run_sweep(cfg);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_sweep_csv(out, rows, cfg.record_runtime);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_conditioning_sweep(std::ostream& os, const std::vector<std::size_t>& deltas, std::size_t multiple) {
  if (multiple == 0) throw ConfigurationError("conditioning sweep: multiple must be positive");
  write_conditioning_csv_header(os);
  for (std::size_t delta : deltas) {
    if (delta < 2) throw ConfigurationError("conditioning sweep: delta must be at least 2");
    const std::size_t d = multiple * (2 * delta - 1);
    write_conditioning_csv_row(os, conditioning(assemble_lifted(build_fpr_family(d, delta), d, delta)));
  }
}

}  // namespace nfp
