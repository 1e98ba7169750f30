#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "anistat/covariance.hpp"
#include "anistat/estimation.hpp"
#include "anistat/geometry.hpp"
#include "anistat/grid.hpp"
#include "anistat/sampling_distribution.hpp"

namespace anistat {

/// Inverse chi-square CDF with two degrees of freedom: -2 ln(1 - p).
double chi2_inv_2dof(double p);

/// Throws InfeasibleSampleSize unless n > ceil(2 l_p).
void require_feasible(std::size_t n, double p);

enum class RegionKind { ExactWindowed, NonParametric };

std::string region_kind_name(RegionKind k);

struct RegionRequest {
  double R = 1.0;
  double theta = 0.0;
  std::size_t n = 0;
  double p = 0.95;
  RegionKind kind = RegionKind::NonParametric;
  // ExactWindowed only; the truth is then taken from the model.
  std::optional<CovarianceModel> model;
  std::optional<GridSpec> grid;
  double window_factor = 3.0;
  std::size_t rays = 720;
};

struct RegionVertex {
  double R_hat;
  double theta_hat;  // canonical, radians
};

/// Confidence region of (R_hat, theta_hat). The region is the set
///   x(q)^2 - C(q)/2 >= ln(1 - p)
/// in the plane of slope ratios q = (qd, qo), which is a global chart of the
/// folded (R_hat, theta_hat) domain. It is traced along rays from the truth
/// point; vertices are stored both in that chart and as canonical (R_hat, theta_hat).
struct ConfidenceRegion {
  double p = 0.95;
  RegionKind kind = RegionKind::NonParametric;
  double R = 1.0;
  double theta = 0.0;
  std::size_t n = 0;
  SlopeTensor mean_q;
  QqqCovariance cqq;

  std::vector<double> ray_angle;     // direction in the (qd, qo) plane
  std::vector<double> ray_distance;  // distance from the truth to the boundary
  Polygon ratio_polygon;             // (qd, qo) vertices
  std::vector<RegionVertex> contour;
  bool truncated = false;  // some rays left the admissible cone before crossing the boundary
  std::size_t skipped_rays = 0;

  /// ln(1-p) subtracted from x^2 - C/2; positive inside, zero on the boundary.
  double implicit(const SlopeRatios& q) const;
  double implicit(double R_hat, double theta_hat) const;
  bool contains(double R_hat, double theta_hat) const;

  /// Vertices mapped to (ln R cos 2theta, ln R sin 2theta), a continuous chart
  /// with isotropy at the origin.
  Polygon embedded_polygon() const;
  double min_R_hat() const;
  double max_R_hat() const;
};

ConfidenceRegion confidence_region(const RegionRequest& req);

struct IsotropyInterval {
  double p = 0.95;
  std::size_t n = 0;
  double lower = 1.0;
  double upper = 1.0;
};

/// R_hat^2 = (1 -+ 2 sqrt(a (1 - a))) / (1 - 2a), a = l_p / N.
IsotropyInterval isotropy_interval(std::size_t n, double p);

struct IsotropyDecision {
  bool reject_isotropy = false;
  double R_hat = 1.0;
  IsotropyInterval interval;
};

IsotropyDecision isotropy_test(const AnisotropyEstimate& estimate, double p);

struct ChangeDecision {
  bool significant_change = false;
  bool regions_intersect = true;
  ConfidenceRegion region_a;
  ConfidenceRegion region_b;
};

/// Non-parametric regions centred at both estimates; a change is significant
/// when the regions are disjoint.
ChangeDecision change_detect(const AnisotropyEstimate& a, std::size_t n_a, const AnisotropyEstimate& b,
                             std::size_t n_b, double p, std::size_t rays = 720);

}  // namespace anistat
