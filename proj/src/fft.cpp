#include "nfp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace nfp::fft {
namespace {

// fftw_plan_* is not thread-safe, fftw_execute_dft is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, Direction dir) {
    std::lock_guard lock(mu_);
    const auto key = std::make_pair(n, dir == Direction::Forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<fftw_complex> a(n), b(n);
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(n), a.data(), b.data(),
        dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void transform(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out, Direction dir) {
  const std::size_t n = in.size();
  if (n == 0) return;
  fftw_plan plan = cache().get(n, dir);
  // std::complex<double> is layout-compatible with fftw_complex.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, src, dst);
}

}  // namespace nfp::fft
