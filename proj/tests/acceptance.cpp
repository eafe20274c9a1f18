// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nfp/angsync.hpp"
#include "nfp/harness.hpp"
#include "nfp/lift.hpp"
#include "nfp/masks.hpp"
#include "nfp/measure.hpp"
#include "nfp/wflow.hpp"
#include "oracles.hpp"

using namespace nfp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Noiseless block phase retrieval from the chirp pair, returning x_est.
ComplexSignal alg1_pipeline(const ComplexSignal& x, std::size_t delta) {
  const std::size_t d = x.size();
  const std::size_t q = 2 * delta - 1;
  const AdmissiblePair pair = build_admissible_pair(d, delta);
  // Full grid when the chirp is periodic on Z_d, otherwise the diagonal band.
  const IndexSet index = d % q == 0 ? IndexSet::full_grid(d, delta) : IndexSet::diagonal_band(d, d, q);
  const MeasurementGrid far = rearrange_near_to_far(forward_nfp(x, pair.psf, pair.mask, index));
  const LiftedOperator M = assemble_lifted(derive_masks(pair.psf, pair.mask, q), d, delta);
  const BandedAutocorrelation X =
      unpack_lifted(solve_lifted(M, std::vector<cplx>(far.values.begin(), far.values.end())));
  return assemble_estimate(sync_weighted_laplacian(X), estimate_magnitudes(X));
}

Outcome exact_recovery() {
  Outcome o;
  std::mt19937_64 rng(101);
  double worst = 0.0;
  std::string per_pair;
  const auto start = Clock::now();
  for (auto [d, delta] : {std::pair<std::size_t, std::size_t>{15, 3}, {45, 8}, {105, 13}}) {
    double pair_worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      ComplexSignal x = oracle::random_signal(d, rng);
      while (*std::min_element(x.begin(), x.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }) ==
             cplx{0.0, 0.0}) {
        x = oracle::random_signal(d, rng);
      }
      const double rel = phase_aligned_distance(x, alg1_pipeline(x, delta)) / norm2(x);
      pair_worst = std::max(pair_worst, rel);
    }
    worst = std::max(worst, pair_worst);
    per_pair += " (" + std::to_string(d) + "," + std::to_string(delta) + ")" + fmt(" %.1e", pair_worst);
  }
  const double elapsed = seconds_since(start);
  o.pass = worst < 1e-7 && elapsed < 10.0;
  o.detail = "max relative error" + per_pair + ", " + fmt("%.2f", elapsed) + " s";
  return o;
}

Outcome rearrangement() {
  Outcome o;
  std::mt19937_64 rng(102);
  const std::size_t d = 15, delta = 3, q = 5;
  const ComplexSignal x = oracle::random_signal(d, rng);
  const AdmissiblePair pair = build_admissible_pair(d, delta);
  const MeasurementGrid far =
      rearrange_near_to_far(forward_nfp(x, pair.psf, pair.mask, IndexSet::full_grid(d, delta)));
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < q; ++l) {
      const double ref = oracle::ffp_value(x, oracle::derived_mask(pair.psf.p, pair.mask.m, l), k);
      worst = std::max(worst, std::abs(far.at(k, l) - ref));
      ++count;
    }
  }
  o.pass = count == 75 && worst <= 1e-10;
  o.detail = std::to_string(count) + " entries, max deviation " + fmt("%.3e", worst);
  return o;
}

Outcome modulation_identity() {
  Outcome o;
  double worst = 0.0;
  for (std::size_t delta : {2u, 3u, 5u, 8u}) {
    const std::size_t q = 2 * delta - 1;
    const std::size_t d = 3 * q;
    const AdmissiblePair pair = build_admissible_pair(d, delta);
    const DerivedMaskFamily fam = derive_masks(pair.psf, pair.mask, q);
    for (std::size_t l = 0; l < q; ++l) {
      const cplx phase = std::polar(1.0, 2.0 * std::numbers::pi * double((l * l) % q) / double(q));
      for (std::size_t n = 0; n < d; ++n) {
        worst = std::max(worst, std::abs(fam[l][n] - phase * oracle::fpr_entry(delta, (2 * l) % q, n)));
      }
    }
  }
  o.pass = worst <= 1e-12;
  o.detail = "max deviation " + fmt("%.3e", worst);
  return o;
}

Outcome operator_equivalence() {
  Outcome o;
  double sv_gap = 0.0, row_gap = 0.0, dense_gap = 0.0;
  for (std::size_t delta : {2u, 3u, 4u, 5u, 8u}) {
    const std::size_t q = 2 * delta - 1;
    const std::size_t d = 3 * q;
    const AdmissiblePair pair = build_admissible_pair(d, delta);
    const LiftedOperator pm = assemble_lifted(derive_masks(pair.psf, pair.mask, q), d, delta);
    const LiftedOperator fpr = assemble_lifted(build_fpr_family(d, delta), d, delta);
    const auto a = singular_values(pm);
    const auto b = singular_values(fpr);
    for (std::size_t i = 0; i < a.size(); ++i) sv_gap = std::max(sv_gap, std::abs(a[i] - b[i]));
    for (std::size_t n = 0; n < delta; ++n) {
      for (std::size_t i = 0; i < q; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const auto r2 = static_cast<Eigen::Index>((2 * i) % q);
        row_gap = std::max(row_gap, (pm.blocks()[n].row(r) - fpr.blocks()[n].row(r2)).cwiseAbs().maxCoeff());
      }
    }
    if (pm.dimension() <= 600) {
      // Independent check of the Fourier-block singular values.
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(oracle::lifted_matrix(
          std::vector<ComplexSignal>(derive_masks(pair.psf, pair.mask, q).masks), d, delta));
      const Eigen::VectorXd s = svd.singularValues();
      for (std::size_t i = 0; i < a.size(); ++i) {
        dense_gap = std::max(dense_gap, std::abs(a[i] - s(static_cast<Eigen::Index>(a.size() - 1 - i))));
      }
    }
  }
  o.pass = sv_gap <= 1e-9 && row_gap <= 1e-12 && dense_gap <= 1e-9;
  o.detail = "singular value gap " + fmt("%.3e", sv_gap) + ", permuted row gap " + fmt("%.3e", row_gap) +
             ", dense SVD gap " + fmt("%.3e", dense_gap);
  return o;
}

Outcome conditioning_bound() {
  Outcome o;
  double worst_ratio = 0.0;
  for (std::size_t delta = 2; delta <= 13; ++delta) {
    const std::size_t d = 3 * (2 * delta - 1);
    const ConditioningReport r = conditioning(assemble_lifted(build_fpr_family(d, delta), d, delta));
    const double bound = std::max(144.0 * std::exp(2.0), 9.0 * std::exp(2.0) * double((delta - 1) * (delta - 1)) / 4.0);
    worst_ratio = std::max(worst_ratio, r.kappa / bound);
  }
  std::mt19937_64 rng(105);
  const LiftedOperator M = assemble_lifted(build_fpr_family(15, 3), 15, 3);
  std::vector<cplx> y(M.dimension());
  for (auto& v : y) v = oracle::random_signal(1, rng)[0];
  const auto zf = solve_lifted(M, y, SolveMethod::Fourier).z;
  const auto zd = solve_lifted(M, y, SolveMethod::Dense).z;
  double solve_gap = 0.0;
  for (std::size_t i = 0; i < zf.size(); ++i) solve_gap = std::max(solve_gap, std::abs(zf[i] - zd[i]));
  o.pass = worst_ratio <= 1.0 && solve_gap <= 1e-8;
  o.detail = "max kappa/bound " + fmt("%.4f", worst_ratio) + ", FFT vs dense " + fmt("%.3e", solve_gap);
  return o;
}

Outcome gap_bounds() {
  Outcome o;
  std::mt19937_64 rng(106);
  double worst_mag = std::numeric_limits<double>::infinity();
  double worst_diam = std::numeric_limits<double>::infinity();
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t delta = 2 + t % 6;
    const std::size_t q = 2 * delta - 1;
    const std::size_t d = q * (2 + t % 3);
    const ComplexSignal x = oracle::random_signal(d, rng);
    const AdmissiblePair pair = build_admissible_pair(d, delta);
    const MeasurementGrid far =
        rearrange_near_to_far(forward_nfp(x, pair.psf, pair.mask, IndexSet::full_grid(d, delta)));
    const LiftedOperator M = assemble_lifted(derive_masks(pair.psf, pair.mask, q), d, delta);
    const BandedAutocorrelation X =
        unpack_lifted(solve_lifted(M, std::vector<cplx>(far.values.begin(), far.values.end())));
    const SyncGraph g = SyncGraph::from_band(X);
    ComplexSignal x_mag(d);
    const auto mags = estimate_magnitudes(X);
    for (std::size_t n = 0; n < d; ++n) x_mag[n] = mags[n];
    const double tau = spectral_gap(g);
    const GapBounds b = gap_lower_bounds(g, x_mag);
    if (!(tau >= b.magnitude_bound) || !(tau >= b.diameter_bound)) ++violations;
    worst_mag = std::min(worst_mag, tau / b.magnitude_bound);
    worst_diam = std::min(worst_diam, tau / b.diameter_bound);
  }
  double kn_gap = 0.0;
  for (std::size_t n = 3; n <= 10; ++n) {
    Eigen::MatrixXd W = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    W.diagonal().setZero();
    kn_gap = std::max(kn_gap, std::abs(spectral_gap(SyncGraph(W)) - double(n)));
  }
  o.pass = violations == 0 && kn_gap <= 1e-9;
  o.detail = std::to_string(violations) + " violations in 100 instances, min tau/bound " + fmt("%.3g", worst_mag) +
             " and " + fmt("%.3g", worst_diam) + ", K_n deviation " + fmt("%.1e", kn_gap);
  return o;
}

Outcome appendix_identities() {
  Outcome o;
  std::mt19937_64 rng(107);
  double w1 = 0.0, w2 = 0.0, w3 = 0.0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t d = 2 + rng() % 63;
    const ComplexSignal x = oracle::random_signal(d, rng);
    const ComplexSignal y = oracle::random_signal(d, rng);
    const ComplexSignal z = oracle::random_signal(d, rng);
    const std::int64_t k = static_cast<std::int64_t>(rng() % (4 * d)) - 2 * static_cast<std::int64_t>(d);
    const double s2 = norm2(x) * norm2(y);
    const double s3 = s2 * norm2(z);

    w1 = std::max(w1, std::abs(std::norm(inner(x, conjugate(y))) - std::norm(inner(conjugate(x), y))) / (s2 * s2));
    w2 = std::max(w2, std::abs(inner(x, hadamard(y, z)) - inner(hadamard(x, conjugate(y)), z)) / s3);

    const ComplexSignal conv = circular_convolution(x, y);
    const std::size_t kk = wrap(k, d);
    w3 = std::max(w3, std::abs(conv[kk] - inner(circular_shift(reversal(x), -k), conjugate(y))) / s2);
    w3 = std::max(w3, oracle::max_abs_diff(hadamard(x, circular_shift(y, k)),
                                           circular_shift(hadamard(circular_shift(x, -k), y), k)) / s2);
    w3 = std::max(w3, std::abs(inner(circular_shift(x, k), y) - inner(x, circular_shift(y, -k))) / s2);
  }
  o.pass = w1 <= 1e-12 && w2 <= 1e-12 && w3 <= 1e-12;
  o.detail = "300 instances, relative deviations " + fmt("%.2e", w1) + ", " + fmt("%.2e", w2) + ", " +
             fmt("%.2e", w3);
  return o;
}

Outcome gradient_check() {
  Outcome o;
  std::mt19937_64 rng(108);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 16;
    const std::size_t K = 1 + rng() % d;
    const std::size_t L = 1 + rng() % d;
    const ComplexSignal x = oracle::random_signal(d, rng);
    const PsfSpec p{oracle::random_signal(d, rng), std::nullopt};
    const MaskSpec m{oracle::random_signal(d, rng), d};
    const DerivedMaskFamily fam = derive_masks(p, m, L);
    const WFProblem prob = vectorize_measurements(forward_ffp(x, fam, K), fam);
    const ComplexSignal z = oracle::random_signal(d, rng);
    const ComplexSignal g = wf_gradient(prob, z);
    ComplexSignal fd(d);
    const double h = 1e-6;
    for (std::size_t j = 0; j < d; ++j) {
      ComplexSignal a = z, b = z;
      a[j] += h;
      b[j] -= h;
      const double dre = (wf_loss(prob, a) - wf_loss(prob, b)) / (2.0 * h);
      a = z;
      b = z;
      a[j] += cplx{0.0, h};
      b[j] -= cplx{0.0, h};
      const double dim = (wf_loss(prob, a) - wf_loss(prob, b)) / (2.0 * h);
      fd[j] = 0.5 * cplx{dre, dim};
    }
    worst = std::max(worst, norm2(g - fd) / norm2(g));
  }
  o.pass = worst < 1e-4;
  o.detail = "max relative error " + fmt("%.3e", worst);
  return o;
}

std::string csv(const ExperimentConfig& cfg) {
  std::ostringstream os;
  write_sweep_csv(os, run_sweep(cfg), cfg.record_runtime);
  return os.str();
}

Outcome trend_alg1() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Alg1DeltaSweep;
  cfg.d = 945;
  cfg.deltas = {8};
  cfg.snr_db = {10, 20, 30, 40, 50, 60, 70, 80};
  cfg.trials = 100;
  cfg.seed = 9;
  const auto start = Clock::now();
  const auto rows = run_sweep(cfg);
  const double elapsed = seconds_since(start);
  bool monotone = true;
  std::string series;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].mean_error_db > rows[i - 1].mean_error_db) monotone = false;
    series += (i ? " " : "") + fmt("%.1f", rows[i].mean_error_db);
  }
  o.pass = monotone && elapsed <= 300.0;
  o.detail = "d=945 delta=8 mean error dB [" + series + "], " + fmt("%.0f", elapsed) + " s";
  return o;
}

Outcome trend_wf_shifts() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::WfGlobalMask;
  cfg.d = 102;
  cfg.shifts = {2, 4, 6, 8};
  cfg.snr_db = {80};
  cfg.iterations = {2000};
  cfg.trials = 50;
  cfg.seed = 9;
  const auto start = Clock::now();
  const auto rows = run_sweep(cfg);
  const double elapsed = seconds_since(start);
  bool decreasing = true;
  double best = std::numeric_limits<double>::infinity();
  std::string series;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(rows[i].mean_error_db < rows[i - 1].mean_error_db)) decreasing = false;
    best = std::min(best, rows[i].mean_error_db);
    series += (i ? " " : "") + fmt("%.1f", rows[i].mean_error_db);
  }
  o.pass = decreasing && best < -20.0 && elapsed <= 300.0;
  o.detail = "K=2,4,6,8 mean error dB [" + series + "], best " + fmt("%.1f", best) + ", " + fmt("%.0f", elapsed) +
             " s";
  return o;
}

Outcome trend_alg1_vs_wf() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Alg1VsAlg2;
  cfg.d = 102;
  cfg.deltas = {26};
  cfg.snr_db = {50, 60, 70, 80};
  cfg.iterations = {500};
  cfg.trials = 20;
  cfg.seed = 9;
  const auto start = Clock::now();
  const auto rows = run_sweep(cfg);
  const double elapsed = seconds_since(start);
  bool ok = true;
  std::string series;
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    const SweepRow& a = rows[i];
    const SweepRow& w = rows[i + 1];
    if (!(a.mean_error_db <= w.mean_error_db) || !(a.mean_runtime_s < w.mean_runtime_s)) ok = false;
    series += (i ? "; " : "") + fmt("SNR %.0f:", a.snr_db) + fmt(" %.1f", a.mean_error_db) + fmt(" vs %.1f dB,", w.mean_error_db) +
              fmt(" %.3f", a.mean_runtime_s) + fmt(" vs %.3f s", w.mean_runtime_s);
  }
  o.pass = ok && elapsed <= 300.0;
  o.detail = "BlockPR vs WF T=500 [" + series + "], " + fmt("%.0f", elapsed) + " s";
  return o;
}

Outcome trends() {
  Outcome o;
  const std::pair<const char*, Outcome (*)()> parts[] = {
      {"(a)", trend_alg1}, {"(b)", trend_wf_shifts}, {"(c)", trend_alg1_vs_wf}};
  for (const auto& [tag, fn] : parts) {
    Outcome p;
    try {
      p = fn();
    } catch (const std::exception& e) {
      p.pass = false;
      p.detail = std::string("exception: ") + e.what();
    }
    o.pass = o.pass && p.pass;
    o.detail += std::string(o.detail.empty() ? "" : " | ") + tag + (p.pass ? " pass: " : " FAIL: ") + p.detail;
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  ExperimentConfig a;
  a.kind = ExperimentKind::Alg1DeltaSweep;
  a.d = 105;
  a.deltas = {3, 8};
  a.snr_db = {20, 60};
  a.trials = 5;
  a.seed = 3;
  a.record_runtime = false;
  ExperimentConfig b;
  b.kind = ExperimentKind::Alg1VsAlg2;
  b.d = 102;
  b.deltas = {26};
  b.snr_db = {50};
  b.iterations = {50};
  b.trials = 3;
  b.seed = 3;
  b.record_runtime = false;
  ExperimentConfig c;
  c.kind = ExperimentKind::WfGlobalMask;
  c.d = 102;
  c.shifts = {4};
  c.snr_db = {80};
  c.iterations = {200};
  c.trials = 3;
  c.seed = 3;
  c.record_runtime = false;

  bool same = true;
  for (ExperimentConfig cfg : {a, b, c}) {
    cfg.threads = 1;
    const std::string first = csv(cfg);
    cfg.threads = 3;
    same = same && first == csv(cfg);
  }

  // The command-line tool writing to a file.
  const auto dir = std::filesystem::temp_directory_path();
  const std::string f1 = (dir / "nfp_accept_1.csv").string();
  const std::string f2 = (dir / "nfp_accept_2.csv").string();
  auto run = [&](const std::string& out) {
    const std::string cmd = std::string(NFP_CLI_PATH) +
                            " alg1-sweep --d 105 --delta 3 8 --snr 20 60 --trials 4 --seed 5 --no-timing --out " + out;
    return std::system(cmd.c_str()) == 0;
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const bool ran = run(f1) && run(f2);
  const std::string s1 = slurp(f1);
  const bool cli_same = ran && !s1.empty() && s1 == slurp(f2);
  std::filesystem::remove(f1);
  std::filesystem::remove(f2);

  o.pass = same && cli_same;
  o.detail = std::string("library sweeps ") + (same ? "identical" : "differ") + ", CLI output " +
             (cli_same ? "identical" : "differs");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"noiseless exact recovery", exact_recovery},
      {"near-to-far rearrangement", rearrangement},
      {"mask modulation identity", modulation_identity},
      {"operator equivalence", operator_equivalence},
      {"conditioning bound and FFT solve", conditioning_bound},
      {"spectral gap bounds", gap_bounds},
      {"shift and inner product identities", appendix_identities},
      {"Wirtinger gradient vs finite differences", gradient_check},
      {"experiment trends", trends},
      {"sweep determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
