#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "anistat/grid.hpp"
#include "anistat/tensor.hpp"

namespace anistat {

inline constexpr const char* kFlagIsotropicDegenerate = "isotropic-degenerate";

struct AnisotropyEstimate {
  double R_hat = 1.0;
  double theta_hat = 0.0;
  std::size_t n_effective = 0;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const;
};

/// Central differences on the interior nodes. The returned fields have side
/// (side - 2); a gradient node is valid only if the node and its four
/// neighbours are valid.
std::pair<GridField, GridField> gradients(const GridField& field);

/// Spatial average of gradient products over valid interior nodes; n is set.
SlopeTensor slope_tensor_estimate(const GridField& field);

/// Throws DegenerateSample when q11 <= 0.
SlopeRatios ratios(const SlopeTensor& q);

/// Forward map (R, theta) -> (qd, qo).
SlopeRatios ratios_from_anisotropy(double R, double theta);

/// Inverts (qd, qo) to canonical (R_hat, theta_hat). At exact isotropy returns
/// R_hat = 1, theta_hat = 0 with the isotropic-degenerate flag.
AnisotropyEstimate invert_to_anisotropy(const SlopeRatios& r);

/// Slope tensor, ratios and inversion in one step. Rank-deficient tensors
/// (constant or one-dimensional fields) throw DegenerateSample.
AnisotropyEstimate estimate_from_tensor(const SlopeTensor& q);
AnisotropyEstimate estimate_from_grid(const GridField& field);

/// Element-wise average of per-field slope tensors, then inversion.
AnisotropyEstimate mean_slope_estimate(const std::vector<GridField>& fields);
SlopeTensor mean_tensor(const std::vector<SlopeTensor>& tensors);

}  // namespace anistat
