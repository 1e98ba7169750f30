#include "anistat/covariance.hpp"

#include <cmath>
#include <numbers>

#include "anistat/error.hpp"
#include "anistat/special_functions.hpp"

namespace anistat {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(const Vec2& v, const char* what) {
  if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
    throw InvalidInput(std::string(what) + " must be finite");
}

bool is_half_or_integer(double nu) {
  const double twice = 2.0 * nu;
  return std::fabs(twice - std::round(twice)) < 1e-12;
}

double matern_norm(double nu) { return std::pow(2.0, 1.0 - nu) / std::tgamma(nu); }

double matern_rho(double nu, double u) {
  if (u < 1e-300) return 1.0;
  if (u > 745.0) return 0.0;
  return matern_norm(nu) * std::pow(u, nu) * bessel_k(nu, u);
}

}  // namespace

void AnisotropyParams::validate() const {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("anisotropy ratio R must be positive and finite");
  if (!(xi1 > 0.0) || !std::isfinite(xi1)) throw InvalidInput("correlation length xi1 must be positive and finite");
  if (!std::isfinite(theta) || theta < -kPi / 4 || theta >= kPi / 4)
    throw InvalidInput("orientation theta must lie in [-pi/4, pi/4)");
}

void canonicalize(double& R, double& theta) {
  if (!(R > 0.0) || !std::isfinite(R) || !std::isfinite(theta))
    throw InvalidInput("canonicalize: R must be positive and theta finite");
  theta = std::remainder(theta, kPi);  // [-pi/2, pi/2]
  if (theta >= kPi / 4) {
    theta -= kPi / 2;
    R = 1.0 / R;
  } else if (theta < -kPi / 4) {
    theta += kPi / 2;
    R = 1.0 / R;
  }
  if (theta >= kPi / 4) theta = -kPi / 4;
}

Family parse_family(const std::string& name) {
  if (name == "gaussian" || name == "Gaussian") return Family::Gaussian;
  if (name == "matern" || name == "Matern") return Family::Matern;
  throw InvalidInput("unknown covariance family '" + name + "' (expected gaussian or matern)");
}

std::string family_name(Family f) { return f == Family::Gaussian ? "gaussian" : "matern"; }

void CovarianceModel::validate() const {
  aniso.validate();
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidInput("variance sigma2 must be positive and finite");
  if (family == Family::Matern) {
    if (!(nu > 0.0) || !is_half_or_integer(nu))
      throw InvalidInput("Matern smoothness nu must be a positive integer or half-integer");
  }
}

double CovarianceModel::xi_max() const { return std::fmax(aniso.xi1, aniso.xi2()); }
double CovarianceModel::xi_min() const { return std::fmin(aniso.xi1, aniso.xi2()); }

Metric anisotropy_metric(const AnisotropyParams& a) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  const double l1 = 1.0 / (a.xi1 * a.xi1);
  const double l2 = 1.0 / (a.xi2() * a.xi2());
  return {c * c * l1 + s * s * l2, s * s * l1 + c * c * l2, c * s * (l1 - l2)};
}

double correlation(const CovarianceModel& model, const Vec2& lag) {
  require_finite(lag, "lag");
  model.validate();
  const Metric m = anisotropy_metric(model.aniso);
  const double u2 = m.m11 * lag[0] * lag[0] + 2.0 * m.m12 * lag[0] * lag[1] + m.m22 * lag[1] * lag[1];
  if (model.family == Family::Gaussian) return std::exp(-u2);
  return matern_rho(model.nu, std::sqrt(std::fmax(u2, 0.0)));
}

double covariance(const CovarianceModel& model, const Vec2& lag) {
  return model.sigma2 * correlation(model, lag);
}

HessianMatrix hessian(const CovarianceModel& model, const Vec2& lag) {
  require_finite(lag, "lag");
  model.validate();
  const Metric m = anisotropy_metric(model.aniso);
  const double mr1 = m.m11 * lag[0] + m.m12 * lag[1];
  const double mr2 = m.m12 * lag[0] + m.m22 * lag[1];
  const double u2 = std::fmax(lag[0] * mr1 + lag[1] * mr2, 0.0);

  // -d2rho = -(g M + h (Mr)(Mr)^T) with family-specific g and h.
  double g = 0.0;
  double h = 0.0;
  if (model.family == Family::Gaussian) {
    const double rho = std::exp(-u2);
    g = -2.0 * rho;
    h = 4.0 * rho;
  } else {
    const double nu = model.nu;
    const double u = std::sqrt(u2);
    if (u < 1e-12) {
      if (nu <= 1.0)
        throw DomainError("Matern covariance with nu <= 1 is not twice differentiable at lag 0");
      g = -1.0 / (2.0 * (nu - 1.0));
      h = 0.0;
    } else if (u > 745.0) {
      g = 0.0;
      h = 0.0;
    } else {
      const double cn = matern_norm(nu);
      g = -cn * std::pow(u, nu - 1.0) * bessel_k(nu - 1.0, u);
      h = cn * std::pow(u, nu - 2.0) * bessel_k(nu - 2.0, u);
    }
  }
  const double s2 = model.sigma2;
  return {-s2 * (g * m.m11 + h * mr1 * mr1), -s2 * (g * m.m22 + h * mr2 * mr2),
          -s2 * (g * m.m12 + h * mr1 * mr2)};
}

SlopeTensor theoretical_slope_tensor(const CovarianceModel& model) {
  const HessianMatrix h = hessian(model, {0.0, 0.0});
  return {h.h11, h.h22, h.h12, 0};
}

double spectral_density(const CovarianceModel& model, const Vec2& k) {
  require_finite(k, "wavevector");
  model.validate();
  const auto& a = model.aniso;
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  const double k1 = c * k[0] + s * k[1];
  const double k2 = -s * k[0] + c * k[1];
  const double xi1 = a.xi1;
  const double xi2 = a.xi2();
  const double q = k1 * k1 * xi1 * xi1 + k2 * k2 * xi2 * xi2;
  if (model.family == Family::Gaussian)
    return model.sigma2 * kPi * xi1 * xi2 * std::exp(-q / 4.0);
  return model.sigma2 * 4.0 * kPi * model.nu * xi1 * xi2 / std::pow(1.0 + q, model.nu + 1.0);
}

double integral_scale_factor(const CovarianceModel& model) {
  if (model.family == Family::Gaussian) return kPi;
  return 2.0 * std::sqrt(kPi * model.nu);
}

double decay_distance(const CovarianceModel& model, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("decay threshold must be in (0, 1)");
  model.validate();
  double u = 0.0;
  if (model.family == Family::Gaussian) {
    u = std::sqrt(-std::log(threshold));
  } else {
    // rho is monotone decreasing in u; bracket then bisect.
    double lo = 0.0;
    double hi = 1.0;
    while (matern_rho(model.nu, hi) > threshold) hi *= 2.0;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (matern_rho(model.nu, mid) > threshold ? lo : hi) = mid;
    }
    u = hi;
  }
  return u * model.xi_max();
}

}  // namespace anistat
