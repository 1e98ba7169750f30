#pragma once

#include <cstdint>
#include <vector>

#include "anistat/covariance.hpp"
#include "anistat/grid.hpp"

namespace anistat {

/// Side of the periodic synthesis grid used for a requested output grid:
/// side + max(6 xi_max, distance where rho < 1e-3) / a, rounded up to a
/// 2-3-5-7 smooth size.
std::size_t padded_side(const CovarianceModel& model, const GridSpec& spec);

/// Fourier Filtering Method: real white noise (mt19937_64 seeded with `seed`,
/// std::normal_distribution) is filtered by sqrt(C(k)) / a on the padded
/// periodic grid and the top-left side x side block is returned.
/// Throws DomainError when xi_max >= side * a / 2.
GridField generate(const CovarianceModel& model, const GridSpec& spec, std::uint64_t seed);

/// `count` distinct grid nodes drawn uniformly, with their values.
ScatteredSample subsample_scattered(const GridField& field, std::size_t count, std::uint64_t seed);

/// `repeats` subsets of `subset_size` points, each drawn without replacement.
std::vector<ScatteredSample> resample_subsets(const ScatteredSample& sample, std::size_t subset_size,
                                              std::size_t repeats, std::uint64_t seed);

}  // namespace anistat
