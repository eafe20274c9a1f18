// Command-line driver for the reconstruction experiments.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nfp/error.hpp"
#include "nfp/harness.hpp"

namespace {

struct CommonFlags {
  std::size_t d = 0;
  std::vector<double> snr;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool no_timing = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--d", f.d, "Signal length")->capture_default_str();
  cmd->add_option("--snr", f.snr, "SNR values in dB (inf for noiseless)")->capture_default_str();
  cmd->add_option("--trials", f.trials, "Random trials per grid point")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_flag("--no-timing", f.no_timing, "Write nan for runtimes so output is reproducible");
  cmd->add_option("--out", f.out, "Output CSV path (stdout when omitted)");
}

void emit(const nfp::ExperimentConfig& cfg, const std::string& out) {
  if (out.empty()) {
    nfp::write_sweep_csv(std::cout, nfp::run_sweep(cfg), cfg.record_runtime);
  } else {
    nfp::run_sweep(cfg, out);
  }
}

nfp::ExperimentConfig base_config(nfp::ExperimentKind kind, const CommonFlags& f) {
  nfp::ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.d = f.d;
  cfg.snr_db = f.snr;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.threads = f.threads;
  cfg.record_runtime = !f.no_timing;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field ptychography reconstruction experiments"};
  app.require_subcommand(1);

  const std::vector<double> snr_grid{10, 20, 30, 40, 50, 60, 70, 80};

  CommonFlags alg1{945, snr_grid};
  std::vector<std::size_t> alg1_deltas{8, 14, 23};
  auto* alg1_cmd = app.add_subcommand("alg1-sweep", "Block phase retrieval error and runtime over delta and SNR");
  add_common(alg1_cmd, alg1);
  alg1_cmd->add_option("--delta", alg1_deltas, "Mask support sizes; 2*delta-1 must divide d")->capture_default_str();

  CommonFlags cmp{102, snr_grid};
  std::vector<std::size_t> cmp_deltas{26};
  std::vector<std::size_t> cmp_iters{100, 500, 2000};
  auto* cmp_cmd = app.add_subcommand("compare", "Block phase retrieval against Wirtinger flow on local masks");
  add_common(cmp_cmd, cmp);
  cmp_cmd->add_option("--delta", cmp_deltas, "Mask support sizes")->capture_default_str();
  cmp_cmd->add_option("--iters", cmp_iters, "Wirtinger flow iteration counts")->capture_default_str();

  CommonFlags wf{102, {80}};
  std::vector<std::size_t> wf_shifts{2, 4, 6, 8};
  std::vector<std::size_t> wf_iters{2000};
  auto* wf_cmd = app.add_subcommand("wf-global", "Wirtinger flow with a global mask and few shifts");
  add_common(wf_cmd, wf);
  wf_cmd->add_option("--K", wf_shifts, "Shift counts")->capture_default_str();
  wf_cmd->add_option("--iters", wf_iters, "Iteration counts")->capture_default_str();

  std::vector<std::size_t> cond_deltas{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
  std::size_t cond_multiple = 3;
  std::string cond_out;
  auto* cond_cmd = app.add_subcommand("conditioning", "Condition numbers of the exponential-mask operator");
  cond_cmd->add_option("--delta", cond_deltas, "Mask support sizes")->capture_default_str();
  cond_cmd->add_option("--multiple", cond_multiple, "d = multiple * (2*delta-1)")->capture_default_str();
  cond_cmd->add_option("--out", cond_out, "Output CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*alg1_cmd) {
      auto cfg = base_config(nfp::ExperimentKind::Alg1DeltaSweep, alg1);
      cfg.deltas = alg1_deltas;
      emit(cfg, alg1.out);
    } else if (*cmp_cmd) {
      auto cfg = base_config(nfp::ExperimentKind::Alg1VsAlg2, cmp);
      cfg.deltas = cmp_deltas;
      cfg.iterations = cmp_iters;
      emit(cfg, cmp.out);
    } else if (*wf_cmd) {
      auto cfg = base_config(nfp::ExperimentKind::WfGlobalMask, wf);
      cfg.shifts = wf_shifts;
      cfg.iterations = wf_iters;
      emit(cfg, wf.out);
    } else if (*cond_cmd) {
      if (cond_out.empty()) {
        nfp::write_conditioning_sweep(std::cout, cond_deltas, cond_multiple);
      } else {
        std::ofstream os(cond_out);
        if (!os) throw nfp::IoError("cannot open '" + cond_out + "' for writing");
        nfp::write_conditioning_sweep(os, cond_deltas, cond_multiple);
        if (!os.flush()) throw nfp::IoError("failed writing '" + cond_out + "'");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
