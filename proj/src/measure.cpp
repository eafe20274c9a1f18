#include "nfp/measure.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "nfp/error.hpp"

namespace nfp {
namespace {

void check_extent(std::size_t d, std::size_t K, std::size_t L) {
  if (d == 0) throw ConfigurationError("index set over empty signal");
  if (K == 0 || L == 0) throw ConfigurationError("index set needs K >= 1 and L >= 1");
  if (K > d || L > d) {
    throw ConfigurationError("index set K = " + std::to_string(K) + ", L = " + std::to_string(L) +
                             " exceeds d = " + std::to_string(d));
  }
}

double frobenius(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

IndexSet IndexSet::full_grid(std::size_t d, std::size_t delta) {
  if (delta == 0) throw ConfigurationError("full grid needs delta >= 1");
  const std::size_t q = 2 * delta - 1;
  check_extent(d, d, q);
  IndexSet s{IndexKind::FullGrid, d, d, q, {}};
  s.pairs.reserve(d * q);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < q; ++l) s.pairs.emplace_back(k, l);
  return s;
}

IndexSet IndexSet::diagonal_band(std::size_t d, std::size_t K, std::size_t L) {
  check_extent(d, K, L);
  IndexSet s{IndexKind::DiagonalBand, d, K, L, {}};
  s.pairs.reserve(K * L);
  for (std::size_t k = 0; k < K; ++k) {
    const auto ki = static_cast<std::int64_t>(k);
    for (std::size_t l = 0; l < L; ++l) {
      s.pairs.emplace_back(wrap(-ki, d), wrap(ki - static_cast<std::int64_t>(l), d));
    }
  }
  return s;
}

IndexSet IndexSet::rectangle(std::size_t d, std::size_t K, std::size_t L) {
  if (d == 0 || K == 0 || L == 0) throw ConfigurationError("rectangle needs d, K, L >= 1");
  if (K > d) throw ConfigurationError("rectangle K exceeds d");
  IndexSet s{IndexKind::Rectangle, d, K, L, {}};
  s.pairs.reserve(K * L);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t l = 0; l < L; ++l) s.pairs.emplace_back(k, l);
  return s;
}

MeasurementGrid forward_nfp(const ComplexSignal& x, const PsfSpec& psf, const MaskSpec& mask,
                            const IndexSet& idx) {
  const std::size_t d = x.size();
  if (psf.d() != d || mask.d() != d || idx.d != d) {
    throw DimensionError("forward_nfp: inconsistent lengths (x " + std::to_string(d) + ", p " +
                         std::to_string(psf.d()) + ", m " + std::to_string(mask.d()) +
                         ", index set " + std::to_string(idx.d) + ")");
  }
  if (idx.kind == IndexKind::Rectangle) {
    throw ConfigurationError("forward_nfp: rectangle index sets are FFP coordinates");
  }
  MeasurementGrid g;
  g.index = idx;
  g.delta = mask.delta;
  g.psf_period = psf.period;
  g.values.resize(idx.size());

  // Pairs arrive grouped by shift, so one convolution per distinct shift.
  std::optional<std::size_t> cached_shift;
  ComplexSignal field;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto [k, l] = idx.pairs[i];
    if (cached_shift != k) {
      field = circular_convolution(psf.p, hadamard(circular_shift(mask.m, static_cast<std::int64_t>(k)), x));
      cached_shift = k;
    }
    g.values[i] = std::norm(field[l]);
  }
  return g;
}

MeasurementGrid forward_ffp(const ComplexSignal& x, const DerivedMaskFamily& family, std::size_t K) {
  const std::size_t d = x.size();
  if (family.count() == 0) throw ConfigurationError("forward_ffp: empty mask family");
  if (family.d() != d) throw DimensionError("forward_ffp: mask length differs from signal length");
  MeasurementGrid g;
  g.index = IndexSet::rectangle(d, K, family.count());
  std::size_t extent = 0;
  for (const auto& m : family.masks) extent = std::max(extent, support_extent(m));
  g.delta = extent;
  g.values.resize(K * family.count());
  for (std::size_t k = 0; k < K; ++k) {
    const ComplexSignal shifted = circular_shift(x, static_cast<std::int64_t>(k));
    for (std::size_t l = 0; l < family.count(); ++l) {
      g.values[k * family.count() + l] = std::norm(inner(family[l], shifted));
    }
  }
  return g;
}

MeasurementGrid add_noise(const MeasurementGrid& g, const NoiseSpec& spec) {
  if (g.noise) throw ConfigurationError("add_noise: grid already carries noise");
  MeasurementGrid out = g;
  if (spec.noiseless) {
    out.noise = std::vector<double>(g.size(), 0.0);
    out.snr_db = std::numeric_limits<double>::infinity();
    return out;
  }
  if (!std::isfinite(spec.target_snr_db)) throw ConfigurationError("add_noise: target SNR must be finite");
  const double signal = frobenius(g.values);
  if (signal == 0.0) throw DegenerateInputError("add_noise: cannot reach a finite SNR on an all-zero grid");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(g.size());
  for (auto& v : noise) v = gauss(rng);
  double raw = frobenius(noise);
  if (raw == 0.0) {
    // Measure-zero event; fall back to a flat draw so the SNR is reachable.
    std::fill(noise.begin(), noise.end(), 1.0);
    raw = frobenius(noise);
  }
  const double scale = signal / (raw * std::pow(10.0, spec.target_snr_db / 10.0));
  for (std::size_t i = 0; i < noise.size(); ++i) {
    noise[i] *= scale;
    out.values[i] = g.values[i] + noise[i];
  }
  out.noise = std::move(noise);
  out.snr_db = spec.target_snr_db;
  return out;
}

std::vector<double> clean_values(const MeasurementGrid& g) {
  std::vector<double> clean = g.values;
  if (g.noise) {
    for (std::size_t i = 0; i < clean.size(); ++i) clean[i] -= (*g.noise)[i];
  }
  return clean;
}

double measured_snr_db(const MeasurementGrid& g) {
  if (!g.noise) return std::numeric_limits<double>::infinity();
  const double n = frobenius(*g.noise);
  if (n == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(frobenius(clean_values(g)) / n);
}

void write_grid_csv(std::ostream& os, const MeasurementGrid& g) {
  os << "k,l,value,noise\n" << std::setprecision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << g.index.pairs[i].first << ',' << g.index.pairs[i].second << ',' << g.values[i] << ','
       << (g.noise ? (*g.noise)[i] : 0.0) << '\n';
  }
}

MeasurementGrid read_grid_csv(std::istream& is, const IndexSet& idx) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("k,l,value,noise", 0) != 0) {
    throw IoError("measurement CSV: missing header k,l,value,noise");
  }
  MeasurementGrid g;
  g.index = idx;
  std::vector<double> noise;
  bool any_noise = false;
  std::size_t i = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::size_t k = 0, l = 0;
    double value = 0.0, n = 0.0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ls >> k >> c1 >> l >> c2 >> value >> c3 >> n) || c1 != ',' || c2 != ',' || c3 != ',') {
      throw IoError("measurement CSV: malformed row " + std::to_string(i + 2));
    }
    if (i >= idx.size() || idx.pairs[i] != std::make_pair(k, l)) {
      throw IoError("measurement CSV: row " + std::to_string(i + 2) + " does not match the index set");
    }
    g.values.push_back(value);
    noise.push_back(n);
    any_noise = any_noise || n != 0.0;
    ++i;
  }
  if (i != idx.size()) throw IoError("measurement CSV: expected " + std::to_string(idx.size()) + " rows");
  if (any_noise) g.noise = std::move(noise);
  return g;
}

}  // namespace nfp
