#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace anistat {

/// Square lattice: side x side nodes with spacing a. Node (i, j) sits at
/// x = j * a, y = i * a; i indexes rows.
struct GridSpec {
  std::size_t side = 0;
  double spacing = 1.0;

  std::size_t size() const { return side * side; }
  void validate(std::size_t min_side = 1) const;
};

/// Row-major field values. An empty mask means every node is valid; otherwise
/// mask[k] == 0 marks node k as missing (e.g. outside an interpolation hull).
struct GridField {
  GridSpec spec;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;

  double& at(std::size_t i, std::size_t j) { return values[i * spec.side + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * spec.side + j]; }
  bool valid(std::size_t i, std::size_t j) const {
    return mask.empty() || mask[i * spec.side + j] != 0;
  }
  std::size_t valid_count() const;
  void validate() const;
};

struct ScatteredPoint {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

using ScatteredSample = std::vector<ScatteredPoint>;

/// Checks finiteness and pairwise-distinct locations.
void validate_sample(const ScatteredSample& sample);

/// Rotates a field by 90 degrees counter-clockwise in the (x, y) frame.
GridField rotate90(const GridField& field);

/// Sample skewness and excess kurtosis of the valid values.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};
Moments moments(const std::vector<double>& values);
Moments field_moments(const GridField& field);

}  // namespace anistat
