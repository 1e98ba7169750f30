#include "anistat/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "anistat/error.hpp"

namespace anistat {

namespace {

constexpr double kPi = std::numbers::pi;

bool admissible(const SlopeRatios& q) { return q.qd > 0.0 && q.qo * q.qo < q.qd; }

}  // namespace

double chi2_inv_2dof(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidInput("confidence level p must lie in [0, 1)");
  return -2.0 * std::log1p(-p);
}

void require_feasible(std::size_t n, double p) {
  const double lp = chi2_inv_2dof(p);
  const double bound = std::ceil(2.0 * lp);
  if (!(static_cast<double>(n) > bound))
    throw InfeasibleSampleSize("sample size N = " + std::to_string(n) + " is too small for p = " +
                               std::to_string(p) + "; need N > " + std::to_string(static_cast<long>(bound)));
}

std::string region_kind_name(RegionKind k) {
  return k == RegionKind::ExactWindowed ? "exact-windowed" : "non-parametric";
}

double ConfidenceRegion::implicit(const SlopeRatios& q) const {
  const RatioDensity rd(mean_q, cqq);
  const PdfCoefficients c = rd.coefficients(q);
  return c.x * c.x - 0.5 * c.C - std::log1p(-p);
}

double ConfidenceRegion::implicit(double R_hat, double theta_hat) const {
  return implicit(ratios_from_anisotropy(R_hat, theta_hat));
}

bool ConfidenceRegion::contains(double R_hat, double theta_hat) const { return implicit(R_hat, theta_hat) >= 0.0; }

Polygon ConfidenceRegion::embedded_polygon() const {
  Polygon out;
  out.reserve(contour.size());
  for (const auto& v : contour) {
    const double l = std::log(v.R_hat);
    out.push_back({l * std::cos(2.0 * v.theta_hat), l * std::sin(2.0 * v.theta_hat)});
  }
  return out;
}

double ConfidenceRegion::min_R_hat() const {
  double m = INFINITY;
  for (const auto& v : contour) m = std::min(m, v.R_hat);
  return m;
}

double ConfidenceRegion::max_R_hat() const {
  double m = 0.0;
  for (const auto& v : contour) m = std::max(m, v.R_hat);
  return m;
}

ConfidenceRegion confidence_region(const RegionRequest& req) {
  if (!(req.p > 0.0 && req.p < 1.0)) throw InvalidInput("confidence level p must lie in (0, 1)");
  if (req.rays < 360) throw InvalidInput("contour tracing needs at least 360 rays");

  ConfidenceRegion region;
  region.p = req.p;
  region.kind = req.kind;
  if (req.kind == RegionKind::NonParametric) {
    require_feasible(req.n, req.p);
    double R = req.R;
    double theta = req.theta;
    canonicalize(R, theta);
    const SlopeRatios q = ratios_from_anisotropy(R, theta);
    region.R = R;
    region.theta = theta;
    region.n = req.n;
    region.mean_q = {1.0, q.qd, q.qo, 0};
    region.cqq = cqq_leading(region.mean_q, req.n);
  } else {
    if (!req.model || !req.grid) throw InvalidInput("exact-windowed regions need a covariance model and grid");
    region.R = req.model->aniso.R;
    region.theta = req.model->aniso.theta;
    region.mean_q = theoretical_slope_tensor(*req.model);
    region.cqq = cqq_exact(*req.model, *req.grid, req.window_factor);
    region.n = region.cqq.n;
  }

  const RatioDensity rd(region.mean_q, region.cqq);
  const double log1mp = std::log1p(-req.p);
  const auto G = [&](const SlopeRatios& q) {
    const PdfCoefficients c = rd.coefficients(q);
    return c.x * c.x - 0.5 * c.C - log1mp;
  };

  const SlopeRatios centre{region.mean_q.q22 / region.mean_q.q11, region.mean_q.q12 / region.mean_q.q11};
  const double step0 = 1e-4 * std::max(1.0, centre.qd);
  for (std::size_t k = 0; k < req.rays; ++k) {
    const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(req.rays);
    const double dx = std::cos(phi);
    const double dy = std::sin(phi);
    const auto at = [&](double t) { return SlopeRatios{centre.qd + t * dx, centre.qo + t * dy}; };

    double lo = 0.0;
    double hi = step0;
    bool bracketed = false;
    for (int it = 0; it < 200; ++it) {
      const SlopeRatios q = at(hi);
      if (!admissible(q)) break;
      if (G(q) < 0.0) {
        bracketed = true;
        break;
      }
      lo = hi;
      hi *= 2.0;
    }
    if (!bracketed) {
      region.truncated = true;
      ++region.skipped_rays;
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (G(at(mid)) >= 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const SlopeRatios q = at(t);
    const AnisotropyEstimate e = invert_to_anisotropy(q);
    region.ray_angle.push_back(phi);
    region.ray_distance.push_back(t);
    region.ratio_polygon.push_back({q.qd, q.qo});
    region.contour.push_back({e.R_hat, e.theta_hat});
  }
  if (region.contour.size() < 3)
    throw Error("confidence region tracing failed: fewer than three rays crossed the boundary");
  return region;
}

IsotropyInterval isotropy_interval(std::size_t n, double p) {
  require_feasible(n, p);
  const double alpha = chi2_inv_2dof(p) / static_cast<double>(n);
  const double root = 2.0 * std::sqrt(alpha * (1.0 - alpha));
  const double den = 1.0 - 2.0 * alpha;
  return {p, n, std::sqrt((1.0 - root) / den), std::sqrt((1.0 + root) / den)};
}

IsotropyDecision isotropy_test(const AnisotropyEstimate& estimate, double p) {
  if (!(estimate.R_hat > 0.0) || !std::isfinite(estimate.R_hat))
    throw InvalidInput("isotropy test needs a positive, finite R_hat");
  IsotropyDecision d;
  d.R_hat = estimate.R_hat;
  d.interval = isotropy_interval(estimate.n_effective, p);
  d.reject_isotropy = estimate.R_hat < d.interval.lower || estimate.R_hat > d.interval.upper;
  return d;
}

ChangeDecision change_detect(const AnisotropyEstimate& a, std::size_t n_a, const AnisotropyEstimate& b,
                             std::size_t n_b, double p, std::size_t rays) {
  RegionRequest ra;
  ra.R = a.R_hat;
  ra.theta = a.theta_hat;
  ra.n = n_a;
  ra.p = p;
  ra.rays = rays;
  RegionRequest rb = ra;
  rb.R = b.R_hat;
  rb.theta = b.theta_hat;
  rb.n = n_b;

  ChangeDecision d;
  d.region_a = confidence_region(ra);
  d.region_b = confidence_region(rb);
  d.regions_intersect = polygons_intersect(d.region_a.ratio_polygon, d.region_b.ratio_polygon);
  d.significant_change = !d.regions_intersect;
  return d;
}

}  // namespace anistat
