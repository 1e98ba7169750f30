#include <doctest.h>

#include <cmath>

#include "anistat/error.hpp"
#include "anistat/geometry.hpp"
#include "anistat/inference.hpp"
#include "test_util.hpp"

using namespace anistat;
using namespace testutil;

namespace {

ConfidenceRegion np_region(double R, double theta, std::size_t n, double p, std::size_t rays = 720) {
  RegionRequest req;
  req.R = R;
  req.theta = theta;
  req.n = n;
  req.p = p;
  req.rays = rays;
  return confidence_region(req);
}

AnisotropyEstimate estimate(double R, double theta, std::size_t n) {
  AnisotropyEstimate e;
  e.R_hat = R;
  e.theta_hat = theta;
  e.n_effective = n;
  return e;
}

}  // namespace

TEST_CASE("chi-square quantile with two degrees of freedom") {
  CHECK(chi2_inv_2dof(0.0) == 0.0);
  CHECK(chi2_inv_2dof(0.95) == doctest::Approx(5.99146).epsilon(1e-6));
  CHECK(chi2_inv_2dof(1.0 - std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(chi2_inv_2dof(1.0), InvalidInput);
  CHECK_THROWS_AS(chi2_inv_2dof(-0.1), InvalidInput);
}

TEST_CASE("feasibility bound") {
  CHECK_THROWS_AS(require_feasible(12, 0.95), InfeasibleSampleSize);
  CHECK_NOTHROW(require_feasible(13, 0.95));
  CHECK_THROWS_AS(isotropy_interval(12, 0.95), InfeasibleSampleSize);
  CHECK_THROWS_AS(np_region(1.0, 0.0, 12, 0.95), InfeasibleSampleSize);
  const IsotropyInterval i = isotropy_interval(13, 0.95);
  CHECK(std::isfinite(i.upper));
  CHECK(i.lower > 0.0);
}

TEST_CASE("isotropy interval values") {
  IsotropyInterval i = isotropy_interval(100, 0.95);
  CHECK(i.lower == doctest::Approx(0.7726).epsilon(1e-4));
  CHECK(i.upper == doctest::Approx(1.2943).epsilon(1e-4));
  i = isotropy_interval(1000, 0.95);
  CHECK(std::fabs(i.lower - 0.925) <= 0.001);
  CHECK(std::fabs(i.upper - 1.081) <= 0.001);
  // Roots of N (R^2 - 1)^2 = 2 l (R^4 + 1).
  const double l = chi2_inv_2dof(0.95);
  for (double r : {i.lower, i.upper}) {
    const double r2 = r * r;
    CHECK(1000 * (r2 - 1) * (r2 - 1) == doctest::Approx(2 * l * (r2 * r2 + 1)).epsilon(1e-10));
  }
}

TEST_CASE("isotropy interval shrinks with N") {
  double prev = INFINITY;
  for (std::size_t n : {20, 50, 100, 500, 1000, 5000}) {
    const IsotropyInterval i = isotropy_interval(n, 0.95);
    CHECK(i.lower < 1.0);
    CHECK(i.upper > 1.0);
    CHECK(i.upper - i.lower < prev);
    prev = i.upper - i.lower;
  }
}

TEST_CASE("isotropy test decisions") {
  CHECK_FALSE(isotropy_test(estimate(1.0, 0.0, 100), 0.95).reject_isotropy);
  CHECK_FALSE(isotropy_test(estimate(1.0, 0.0, 20), 0.5).reject_isotropy);
  const IsotropyDecision d = isotropy_test(estimate(1.5, 0.0, 1000), 0.95);
  CHECK(d.reject_isotropy);
  CHECK(d.interval.n == 1000);
  CHECK(isotropy_test(estimate(0.6, 0.2, 1000), 0.95).reject_isotropy);
  CHECK_THROWS_AS(isotropy_test(estimate(1.2, 0.0, 12), 0.95), InfeasibleSampleSize);
  CHECK_THROWS_AS(isotropy_test(estimate(0.0, 0.0, 100), 0.95), InvalidInput);
}

TEST_CASE("isotropy test is calibrated for leading-order slope tensors") {
  // Draws with exactly the leading-order covariance; the interval is conservative.
  const SlopeTensor q{1.0, 1.0, 0.0, 0};
  QhatSampler s(q, cqq_leading(q, 100), 8);
  int rejected = 0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    AnisotropyEstimate e = estimate_from_tensor(s.next());
    e.n_effective = 100;
    rejected += isotropy_test(e, 0.95).reject_isotropy;
  }
  CHECK(static_cast<double>(rejected) / draws <= 0.05);
}

TEST_CASE("isotropic non-parametric region is the isotropy band") {
  for (std::size_t n : {100, 1000}) {
    const ConfidenceRegion r = np_region(1.0, 0.0, n, 0.95);
    const IsotropyInterval i = isotropy_interval(n, 0.95);
    CHECK(r.min_R_hat() == doctest::Approx(i.lower).epsilon(1e-9));
    CHECK(r.max_R_hat() == doctest::Approx(i.upper).epsilon(1e-9));
    CHECK_FALSE(r.truncated);
    for (const auto& v : r.contour) {
      const double m = std::max(v.R_hat, 1.0 / v.R_hat);
      CHECK(m == doctest::Approx(i.upper).epsilon(1e-9));
    }
  }
  const ConfidenceRegion r = np_region(1.0, 0.0, 100, 0.95);
  CHECK(std::fabs(r.min_R_hat() - 0.77) <= 0.01);
  CHECK(std::fabs(r.max_R_hat() - 1.29) <= 0.01);
}

TEST_CASE("region invariants") {
  for (auto [R, theta, n] : {std::tuple{1.2, 20 * kDeg, 100}, std::tuple{3.0, 10 * kDeg, 100},
                             std::tuple{1.5, -30 * kDeg, 500}, std::tuple{0.6, 0.7, 200}}) {
    const ConfidenceRegion r = np_region(R, theta, n, 0.95);
    CAPTURE(R);
    CHECK(r.contour.size() + r.skipped_rays == 720);
    CHECK(r.contains(R, theta));
    CHECK(polygon_is_simple(r.ratio_polygon));
    const SlopeRatios t = ratios_from_anisotropy(R, theta);
    CHECK(point_in_polygon({t.qd, t.qo}, r.ratio_polygon));
    double worst = 0.0;
    for (const auto& v : r.ratio_polygon) worst = std::max(worst, std::fabs(r.implicit({v[0], v[1]})));
    CHECK(worst < 1e-8);
    for (const auto& v : r.contour) {
      CHECK(v.theta_hat >= -kPi / 4);
      CHECK(v.theta_hat < kPi / 4);
    }
  }
}

TEST_CASE("regions nest in the confidence level") {
  const ConfidenceRegion small = np_region(1.2, 20 * kDeg, 100, 0.5);
  const ConfidenceRegion large = np_region(1.2, 20 * kDeg, 100, 0.95);
  for (std::size_t k = 0; k < small.ratio_polygon.size(); ++k) {
    CHECK(point_in_polygon(small.ratio_polygon[k], large.ratio_polygon));
    CHECK(small.ray_distance[k] < large.ray_distance[k]);
  }
  const ConfidenceRegion tiny = np_region(1.2, 20 * kDeg, 100, 1e-6);
  for (const auto& v : tiny.contour) {
    CHECK(v.R_hat == doctest::Approx(1.2).epsilon(1e-3));
    CHECK(v.theta_hat == doctest::Approx(20 * kDeg).epsilon(1e-2));
  }
}

TEST_CASE("regions of relabelled truths coincide") {
  const ConfidenceRegion a = np_region(1.5, 0.3, 200, 0.95);
  const ConfidenceRegion b = np_region(1.0 / 1.5, 0.3 - kPi / 2, 200, 0.95);
  CHECK(b.R == doctest::Approx(1.5));
  CHECK(b.theta == doctest::Approx(0.3));
  REQUIRE(a.contour.size() == b.contour.size());
  for (std::size_t k = 0; k < a.contour.size(); ++k)
    CHECK(b.contour[k].R_hat == doctest::Approx(a.contour[k].R_hat).epsilon(1e-9));
}

TEST_CASE("region mass matches the confidence level") {
  const double R = 1.2, theta = 20 * kDeg;
  const std::size_t n = 100;
  for (double p : {0.5, 0.9, 0.95}) {
    const ConfidenceRegion r = np_region(R, theta, n, p);
    const RatioDensity rd(r.mean_q, r.cqq);
    const double log1mp = std::log1p(-p);
    // Midpoint sum in (ln R_hat, theta_hat) with the region indicator.
    const int nt = 800, na = 800;
    const double t0 = -1.0, t1 = 1.2, ht = (t1 - t0) / nt, ha = (kPi / 2) / na;
    double mass = 0.0;
    for (int a = 0; a < nt; ++a)
      for (int b = 0; b < na; ++b) {
        const double Rh = std::exp(t0 + (a + 0.5) * ht);
        const double th = -kPi / 4 + (b + 0.5) * ha;
        const PdfCoefficients c = rd.coefficients(ratios_from_anisotropy(Rh, th));
        if (c.x * c.x - 0.5 * c.C < log1mp) continue;
        mass += Rh * jpdf_nonparametric(Rh, th, R, theta, n);
      }
    mass *= ht * ha;
    CAPTURE(p);
    CHECK(std::fabs(mass - p) < 0.01);
  }
}

TEST_CASE("non-parametric region covers leading-order draws") {
  const double R = 1.5, theta = -30 * kDeg;
  const ConfidenceRegion r = np_region(R, theta, 200, 0.95);
  QhatSampler s(r.mean_q, r.cqq, 4);
  int inside = 0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    const SlopeTensor q = s.next();
    const SlopeRatios qr{q.q22 / q.q11, q.q12 / q.q11};
    inside += point_in_polygon({qr.qd, qr.qo}, r.ratio_polygon);
  }
  const double frac = static_cast<double>(inside) / draws;
  CHECK(frac == doctest::Approx(0.95).epsilon(0.01));
}

TEST_CASE("exact-windowed region") {
  RegionRequest req;
  req.kind = RegionKind::ExactWindowed;
  req.model = gaussian(1.5, -30 * kDeg, 4.0);
  req.grid = GridSpec{100, 1.0};
  req.p = 0.95;
  const ConfidenceRegion r = confidence_region(req);
  CHECK(r.kind == RegionKind::ExactWindowed);
  CHECK(r.n == 98 * 98);
  CHECK(r.cqq.provenance == CqqProvenance::ExactWindowed);
  CHECK(r.contains(1.5, -30 * kDeg));
  CHECK(polygon_is_simple(r.ratio_polygon));
  double worst = 0.0;
  for (const auto& v : r.ratio_polygon) worst = std::max(worst, std::fabs(r.implicit({v[0], v[1]})));
  CHECK(worst < 1e-8);

  req.model.reset();
  CHECK_THROWS_AS(confidence_region(req), InvalidInput);
  RegionRequest bad;
  bad.n = 100;
  bad.rays = 100;
  CHECK_THROWS_AS(confidence_region(bad), InvalidInput);
  bad.rays = 360;
  bad.p = 1.0;
  CHECK_THROWS_AS(confidence_region(bad), InvalidInput);
}

TEST_CASE("change detection") {
  SUBCASE("identical estimates") {
    const ChangeDecision d = change_detect(estimate(1.3, 0.2, 500), 500, estimate(1.3, 0.2, 500), 500, 0.95);
    CHECK(d.regions_intersect);
    CHECK_FALSE(d.significant_change);
  }
  SUBCASE("nearby estimates") {
    const ChangeDecision d = change_detect(estimate(1.18, 7.36 * kDeg, 1008), 1008,
                                           estimate(1.181, 7.36 * kDeg, 1008), 1008, 0.95);
    CHECK_FALSE(d.significant_change);
  }
  SUBCASE("two-scenario estimates") {
    const ChangeDecision d = change_detect(estimate(1.18, 7.36 * kDeg, 1008), 1008,
                                           estimate(0.45, -0.75 * kDeg, 1008), 1008, 0.95);
    CHECK_FALSE(d.regions_intersect);
    CHECK(d.significant_change);
    CHECK(d.region_a.contains(1.18, 7.36 * kDeg));
    CHECK_FALSE(d.region_a.contains(0.45, -0.75 * kDeg));
  }
  SUBCASE("infeasible sizes") {
    CHECK_THROWS_AS(change_detect(estimate(1.2, 0, 12), 12, estimate(1.2, 0, 100), 100, 0.95), InfeasibleSampleSize);
  }
}

TEST_CASE("polygon geometry") {
  const Polygon square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_area(square) == doctest::Approx(1.0));
  CHECK(polygon_is_simple(square));
  CHECK(point_in_polygon({0.5, 0.5}, square));
  CHECK_FALSE(point_in_polygon({1.5, 0.5}, square));
  CHECK_FALSE(polygon_is_simple({{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
  CHECK(segments_intersect({0, 0}, {1, 1}, {0, 1}, {1, 0}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  const Polygon inner{{0.4, 0.4}, {0.6, 0.4}, {0.6, 0.6}};
  CHECK(polygons_intersect(square, inner));
  CHECK(polygons_intersect(inner, square));
  const Polygon shifted{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
  CHECK(polygons_intersect(square, shifted));
  const Polygon far{{3, 3}, {4, 3}, {4, 4}};
  CHECK_FALSE(polygons_intersect(square, far));
}
