#pragma once

#include <array>
#include <string>

#include "anistat/tensor.hpp"

namespace anistat {

using Vec2 = std::array<double, 2>;

/// Geometric anisotropy of a correlation ellipse. R = xi2 / xi1 and theta is
/// the tilt of the principal frame, kept in [-pi/4, pi/4).
struct AnisotropyParams {
  double R = 1.0;
  double theta = 0.0;
  double xi1 = 1.0;

  double xi2() const { return R * xi1; }
  void validate() const;
};

/// Maps (R, theta) into the canonical domain theta in [-pi/4, pi/4) using the
/// identification (R, theta) ~ (1/R, theta -+ pi/2). Idempotent.
void canonicalize(double& R, double& theta);

enum class Family { Gaussian, Matern };

Family parse_family(const std::string& name);
std::string family_name(Family f);

struct CovarianceModel {
  Family family = Family::Gaussian;
  double sigma2 = 1.0;
  AnisotropyParams aniso{};
  double nu = 2.0;  // Matern only

  void validate() const;
  double xi_max() const;
  double xi_min() const;
};

/// -d^2 c / dr_i dr_j, symmetric.
struct HessianMatrix {
  double h11 = 0.0;
  double h22 = 0.0;
  double h12 = 0.0;
};

/// Metric tensor M = Rot^T diag(1/xi1^2, 1/xi2^2) Rot, so that u^2 = r^T M r.
struct Metric {
  double m11, m22, m12;
};
Metric anisotropy_metric(const AnisotropyParams& a);

double correlation(const CovarianceModel& model, const Vec2& lag);
double covariance(const CovarianceModel& model, const Vec2& lag);
HessianMatrix hessian(const CovarianceModel& model, const Vec2& lag);
SlopeTensor theoretical_slope_tensor(const CovarianceModel& model);

/// Two-dimensional Fourier transform of the covariance,
/// C(k) = integral c(r) exp(-i k.r) d^2r.
double spectral_density(const CovarianceModel& model, const Vec2& k);

/// Integral scale factor: pi (Gaussian), 2 sqrt(pi nu) (Matern). The rescaled
/// length is xi / integral_scale_factor.
double integral_scale_factor(const CovarianceModel& model);

/// Lag distance (along the major axis) beyond which |rho| < threshold.
double decay_distance(const CovarianceModel& model, double threshold);

}  // namespace anistat
