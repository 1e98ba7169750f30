#include "anistat/synthesis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "anistat/error.hpp"

namespace anistat {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool smooth_size(std::size_t n) {
  for (std::size_t p : {2u, 3u, 5u, 7u})
    while (n % p == 0) n /= p;
  return n == 1;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Partial Fisher-Yates: first `count` entries of a random permutation of [0, n).
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

std::size_t padded_side(const CovarianceModel& model, const GridSpec& spec) {
  const double reach = std::fmax(6.0 * model.xi_max(), decay_distance(model, 1e-3));
  std::size_t p = spec.side + static_cast<std::size_t>(std::ceil(reach / spec.spacing));
  if (p % 2) ++p;
  while (!smooth_size(p)) p += 2;
  return p;
}

GridField generate(const CovarianceModel& model, const GridSpec& spec, std::uint64_t seed) {
  model.validate();
  spec.validate(16);
  const double extent = static_cast<double>(spec.side) * spec.spacing;
  if (model.xi_max() >= extent / 2.0)
    throw DomainError("correlation length " + std::to_string(model.xi_max()) +
                      " is not below half the grid extent " + std::to_string(extent / 2.0));

  const std::size_t P = padded_side(model, spec);
  const std::size_t half = P / 2 + 1;
  const int n = static_cast<int>(P);

  std::unique_ptr<double, FftwFree> real(fftw_alloc_real(P * P));
  std::unique_ptr<fftw_complex, FftwFree> spec_buf(fftw_alloc_complex(P * half));
  fftw_plan forward;
  fftw_plan backward;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward = fftw_plan_dft_r2c_2d(n, n, real.get(), spec_buf.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(n, n, spec_buf.get(), real.get(), FFTW_ESTIMATE);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < P * P; ++k) real.get()[k] = normal(rng);

  fftw_execute(forward);

  // A real, even filter keeps the spectrum Hermitian, so the inverse is real.
  const double a = spec.spacing;
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(P) * a);
  const double norm = 1.0 / (a * static_cast<double>(P) * static_cast<double>(P));
  for (std::size_t r = 0; r < P; ++r) {
    const double ky = dk * (r <= P / 2 ? static_cast<double>(r) : static_cast<double>(r) - static_cast<double>(P));
    for (std::size_t c = 0; c < half; ++c) {
      const double kx = dk * static_cast<double>(c);
      const double filt = std::sqrt(spectral_density(model, {kx, ky})) * norm;
      spec_buf.get()[r * half + c][0] *= filt;
      spec_buf.get()[r * half + c][1] *= filt;
    }
  }

  fftw_execute(backward);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  GridField out{spec, std::vector<double>(spec.size()), {}};
  for (std::size_t i = 0; i < spec.side; ++i)
    for (std::size_t j = 0; j < spec.side; ++j) out.at(i, j) = real.get()[i * P + j];
  return out;
}

ScatteredSample subsample_scattered(const GridField& field, std::size_t count, std::uint64_t seed) {
  field.validate();
  const std::size_t n = field.values.size();
  if (count == 0 || count > n)
    throw InvalidInput("subsample count must be in [1, " + std::to_string(n) + "], got " + std::to_string(count));
  std::vector<std::size_t> candidates;
  candidates.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    if (field.mask.empty() || field.mask[k]) candidates.push_back(k);
  if (count > candidates.size()) throw InvalidInput("subsample count exceeds the number of valid nodes");

  std::mt19937_64 rng(seed);
  const auto picks = choose_distinct(candidates.size(), count, rng);
  ScatteredSample out;
  out.reserve(count);
  const double a = field.spec.spacing;
  for (std::size_t p : picks) {
    const std::size_t k = candidates[p];
    const std::size_t i = k / field.spec.side;
    const std::size_t j = k % field.spec.side;
    out.push_back({static_cast<double>(j) * a, static_cast<double>(i) * a, field.values[k]});
  }
  return out;
}

std::vector<ScatteredSample> resample_subsets(const ScatteredSample& sample, std::size_t subset_size,
                                              std::size_t repeats, std::uint64_t seed) {
  if (subset_size == 0 || subset_size > sample.size())
    throw InvalidInput("subset size must be in [1, " + std::to_string(sample.size()) + "]");
  if (repeats == 0) throw InvalidInput("repeats must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<ScatteredSample> out;
  out.reserve(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto picks = choose_distinct(sample.size(), subset_size, rng);
    ScatteredSample subset;
    subset.reserve(subset_size);
    for (std::size_t p : picks) subset.push_back(sample[p]);
    out.push_back(std::move(subset));
  }
  return out;
}

}  // namespace anistat
