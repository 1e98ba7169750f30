// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "anistat/error.hpp"
#include "anistat/estimation.hpp"
#include "anistat/experiment.hpp"
#include "anistat/inference.hpp"
#include "anistat/interpolation.hpp"
#include "anistat/sampling_distribution.hpp"
#include "anistat/synthesis.hpp"
#include "test_util.hpp"

using namespace anistat;
using namespace testutil;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s | %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

ConfidenceRegion np_region(double R, double theta, std::size_t n, double p, std::size_t rays) {
  RegionRequest req;
  req.R = R;
  req.theta = theta;
  req.n = n;
  req.p = p;
  req.rays = rays;
  return confidence_region(req);
}

// 1 ------------------------------------------------------------------------
Outcome isotropy_interval_values() {
  const auto t0 = Clock::now();
  const int reps = 10000;
  IsotropyInterval a{}, b{};
  for (int k = 0; k < reps; ++k) {
    a = isotropy_interval(100, 0.95);
    b = isotropy_interval(1000, 0.95);
  }
  const double us = elapsed(t0) / (2.0 * reps) * 1e6;
  const bool ok = std::fabs(a.lower - 0.77) <= 0.01 && std::fabs(a.upper - 1.29) <= 0.01 &&
                  std::fabs(b.lower - 0.925) <= 0.001 && std::fabs(b.upper - 1.081) <= 0.001 && us < 100.0;
  return {ok, fmt("N=100 (%.5f, %.5f); N=1000 (%.6f, %.6f); %.3f us per call", a.lower, a.upper, b.lower, b.upper, us)};
}

// 2 ------------------------------------------------------------------------
Outcome feasibility_bound() {
  bool threw12 = false, threw_region12 = false;
  try {
    isotropy_interval(12, 0.95);
  } catch (const InfeasibleSampleSize&) {
    threw12 = true;
  }
  try {
    np_region(1.0, 0.0, 12, 0.95, 360);
  } catch (const InfeasibleSampleSize&) {
    threw_region12 = true;
  }
  const IsotropyInterval i13 = isotropy_interval(13, 0.95);
  const ConfidenceRegion r13 = np_region(1.0, 0.0, 13, 0.95, 360);
  const bool ok = threw12 && threw_region12 && std::isfinite(i13.upper) && i13.lower > 0.0 && !r13.contour.empty();
  return {ok, fmt("N=12 interval %s, region %s; N=13 interval (%.4f, %.4f)", threw12 ? "infeasible" : "accepted",
                  threw_region12 ? "infeasible" : "accepted", i13.lower, i13.upper)};
}

// 3 ------------------------------------------------------------------------
Outcome asymptotic_ratio_pdf() {
  const auto t0 = Clock::now();
  const SlopeTensor q{1.0, 1.0, 0.0, 0};
  double worst[2] = {0.0, 0.0};
  const std::size_t ns[2] = {30, 50};
  for (int k = 0; k < 2; ++k) {
    const RatioDensity rd(q, cqq_leading(q, ns[k]));
    for (int a = 0; a < 21; ++a)
      for (int b = 0; b < 21; ++b) {
        // R_hat log-spaced on [1/3, 3], theta_hat uniform on [-pi/4, pi/4).
        const double Rh = std::exp(std::log(3.0) * (2.0 * a / 20.0 - 1.0));
        const double th = -kPi / 4 + (kPi / 2) * b / 21.0;
        const SlopeRatios r = ratios_from_anisotropy(Rh, th);
        worst[k] = std::max(worst[k], std::fabs(rd.asymptotic(r) / rd.exact(r) - 1.0));
      }
  }
  const double s = elapsed(t0);
  const bool ok = worst[0] < 1e-6 && worst[1] < 1e-9 && s < 1.0;
  return {ok, fmt("max rel err N=30 %.3g, N=50 %.3g over 21x21 grid (R_hat in [1/3, 3]); %.3f s", worst[0], worst[1], s)};
}

// 4 ------------------------------------------------------------------------
Outcome degenerate_peak() {
  const auto t0 = Clock::now();
  const auto density = [](double R, double theta) {
    return [=](double Rh, double th) { return jpdf_nonparametric(Rh, th, R, theta, 100); };
  };
  const JointDensity fa = density(1.2, 20 * kDeg);
  const JointDensity fb = density(3.0, 10 * kDeg);
  const DensityGrid ga = evaluate_density(fa, 0.1, 10.0, 300, 360);
  const DensityGrid gb = evaluate_density(fb, 0.1, 10.0, 300, 360);
  const auto ma = find_modes(ga, fa, 0.1);
  const auto mb = find_modes(gb, fb, 0.1);
  bool near = false;
  Mode sec{};
  if (ma.size() == 2) {
    sec = refine_mode_unfolded(fa, ma[1]);
    near = std::fabs(sec.R_hat - 0.83) <= 0.1 && std::fabs(sec.theta_hat / kDeg + 70.0) <= 5.0;
  }
  const bool ok = ma.size() == 2 && near && mb.size() == 1;
  return {ok, fmt("(1.2, 20 deg): %zu modes, secondary unfolded at (%.3f, %.1f deg); (3, 10 deg): %zu mode(s); %.2f s",
                  ma.size(), sec.R_hat, sec.theta_hat / kDeg, mb.size(), elapsed(t0))};
}

// 5 ------------------------------------------------------------------------
Outcome normalization() {
  const auto t0 = Clock::now();
  struct Case {
    double R, theta;
    std::size_t n;
  };
  double worst = 0.0;
  std::string masses;
  for (const Case& c : {Case{1.0, 0.0, 100}, Case{1.0, 0.6, 100}, Case{1.2, 20 * kDeg, 500}, Case{3.0, 10 * kDeg, 500}}) {
    const double m = mass_log_r([&](double Rh, double th) { return jpdf_nonparametric(Rh, th, c.R, c.theta, c.n); },
                                -4.0, 4.0, 1e-10);
    worst = std::max(worst, std::fabs(m - 1.0));
    masses += fmt("%.7f ", m);
  }
  return {worst < 1e-3, fmt("masses %s(max |1 - mass| %.2g); %.2f s", masses.c_str(), worst, elapsed(t0))};
}

// 6 ------------------------------------------------------------------------
Outcome monte_carlo_coverage() {
  const auto t0 = Clock::now();
  struct Scenario {
    const char* name;
    CovarianceModel model;
  };
  const Scenario scenarios[] = {{"gaussian xi=4 iso", gaussian(1.0, 0.0, 4.0)},
                                {"matern nu=2 xi=2.51 iso", matern(2.0, 1.0, 0.0, 2.51)},
                                {"matern nu=2 xi=2.51 (1.5, -30 deg)", matern(2.0, 1.5, -30 * kDeg, 2.51)}};
  const GridSpec spec{100, 1.0};
  const std::size_t n = 98 * 98;
  const std::size_t M = 1000;
  bool ok = true;
  std::string detail;
  for (const Scenario& s : scenarios) {
    const ConfidenceRegion region = np_region(s.model.aniso.R, s.model.aniso.theta, n, 0.95, 720);
    std::vector<char> inside(M, 0);
    parallel_for(M, 0, [&](std::size_t i) {
      const AnisotropyEstimate e = estimate_from_grid(generate(s.model, spec, 1 + i));
      inside[i] = region.contains(e.R_hat, e.theta_hat);
    });
    std::size_t hits = 0;
    for (char c : inside) hits += c;
    const double frac = static_cast<double>(hits) / M;
    ok = ok && frac >= 0.95;
    detail += fmt("%s: %.3f; ", s.name, frac);
  }
  return {ok, detail + fmt("N=%zu, M=%zu, p=0.95, need >= 0.95; %.1f s", n, M, elapsed(t0))};
}

// 7 ------------------------------------------------------------------------
Outcome region_dominance() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& [name, model] : {std::pair{"gaussian xi=4", gaussian(1.0, 0.0, 4.0)},
                                    std::pair{"matern nu=2 xi=2.51", matern(2.0, 1.0, 0.0, 2.51)}}) {
    RegionRequest ex;
    ex.kind = RegionKind::ExactWindowed;
    ex.model = model;
    ex.grid = GridSpec{100, 1.0};
    ex.p = 0.95;
    ex.rays = 360;
    const ConfidenceRegion re = confidence_region(ex);
    const ConfidenceRegion rn = np_region(model.aniso.R, model.aniso.theta, re.n, 0.95, 360);
    // Both regions share the centre and ray directions; compare ray by ray.
    std::size_t matched = 0, outside = 0;
    double worst = 0.0;
    for (std::size_t a = 0; a < re.ray_angle.size(); ++a)
      for (std::size_t b = 0; b < rn.ray_angle.size(); ++b)
        if (re.ray_angle[a] == rn.ray_angle[b]) {
          ++matched;
          const double ratio = re.ray_distance[a] / rn.ray_distance[b];
          worst = std::max(worst, ratio);
          if (ratio > 1.0) ++outside;
        }
    ok = ok && matched == 360 && outside == 0;
    detail += fmt("%s: %zu/%zu exact vertices outside, max exact/np radius %.3f; ", name, outside, matched, worst);
  }
  return {ok, detail + fmt("%.2f s", elapsed(t0))};
}

// 8 ------------------------------------------------------------------------
Outcome distributional_oracles() {
  const auto t0 = Clock::now();
  // (a) sampler covariance
  const CovarianceModel model = gaussian(1.5, -30 * kDeg, 4.0);
  const SlopeTensor q = theoretical_slope_tensor(model);
  const QqqCovariance cqq = cqq_exact(model, {100, 1.0});
  const int draws = 1000000;
  double worst_a = 0.0;
  {
    QhatSampler s(q, cqq, 1);
    double mean[3] = {}, m2[3][3] = {};
    std::vector<Vec3> xs(draws);
    for (auto& x : xs) {
      const SlopeTensor d = s.next();
      x = {d.q11, d.q22, d.q12};
      for (int i = 0; i < 3; ++i) mean[i] += x[i] / draws;
    }
    for (const auto& x : xs)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m2[i][j] += (x[i] - mean[i]) * (x[j] - mean[j]) / (draws - 1);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        worst_a = std::max(worst_a, std::fabs(m2[i][j] - cqq.matrix(i, j)) /
                                        std::sqrt(cqq.matrix(i, i) * cqq.matrix(j, j)));
  }

  // (b) ratios -> inversion against the joint density, binned chi-square
  double pvalue = 0.0, chi2 = 0.0;
  int dof = 0;
  {
    const SlopeTensor qb = theoretical_slope_tensor(gaussian(1.2, 20 * kDeg, 4.0));
    const QqqCovariance cb = cqq_leading(qb, 100);
    const RatioDensity rd(qb, cb);
    const int rb = 16, tb = 18;
    const double l0 = -0.8, l1 = 0.8;
    std::vector<double> observed(rb * tb, 0.0);
    QhatSampler s(qb, cb, 2);
    for (int k = 0; k < draws; ++k) {
      AnisotropyEstimate e;
      try {
        e = estimate_from_tensor(s.next());
      } catch (const DegenerateSample&) {
        continue;
      }
      const int a = static_cast<int>(std::floor((std::log(e.R_hat) - l0) / (l1 - l0) * rb));
      const int b = static_cast<int>(std::floor((e.theta_hat + kPi / 4) / (kPi / 2) * tb));
      if (a >= 0 && a < rb && b >= 0 && b < tb) observed[a * tb + b] += 1.0;
    }
    for (int a = 0; a < rb; ++a)
      for (int b = 0; b < tb; ++b) {
        const double x0 = l0 + (l1 - l0) * a / rb, x1 = l0 + (l1 - l0) * (a + 1) / rb;
        const double y0 = -kPi / 4 + (kPi / 2) * b / tb, y1 = -kPi / 4 + (kPi / 2) * (b + 1) / tb;
        const double p = integrate2d(
            [&](double l, double th) {
              const double Rh = std::exp(l);
              return Rh * std::fabs(jacobian_det(Rh, th)) * rd.density(ratios_from_anisotropy(Rh, th));
            },
            x0, x1, y0, y1, 1e-9);
        const double e = draws * p;
        if (e < 5.0) continue;
        chi2 += (observed[a * tb + b] - e) * (observed[a * tb + b] - e) / e;
        ++dof;
      }
    pvalue = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof - 1), chi2));
  }

  // (c) gradient-product variances
  double worst_c = 0.0;
  {
    const GradientProductMoments mo = gradient_product_moments(q);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(0.0, 1.0);
    const double l11 = std::sqrt(q.q11), l21 = q.q12 / l11, l22 = std::sqrt(q.q22 - l21 * l21);
    double s[3] = {}, ss[3] = {};
    for (int k = 0; k < draws; ++k) {
      const double a = z(rng), b = z(rng);
      const double g1 = l11 * a, g2 = l21 * a + l22 * b;
      const double x[3] = {g1 * g1, g2 * g2, g1 * g2};
      for (int i = 0; i < 3; ++i) s[i] += x[i], ss[i] += x[i] * x[i];
    }
    const double target[3] = {mo.var_11, mo.var_22, mo.var_12};
    for (int i = 0; i < 3; ++i) {
      const double v = ss[i] / draws - (s[i] / draws) * (s[i] / draws);
      worst_c = std::max(worst_c, std::fabs(v / target[i] - 1.0));
    }
  }
  const double secs = elapsed(t0);
  const bool ok = worst_a < 0.02 && pvalue > 0.01 && worst_c < 0.02 && secs < 60.0;
  return {ok, fmt("(a) max cov error %.4f of scale; (b) chi2 %.1f on %d bins, p=%.3f; (c) max var error %.4f; %.1f s",
                  worst_a, chi2, dof, pvalue, worst_c, secs)};
}

// 9 ------------------------------------------------------------------------
Outcome round_trip_identities() {
  const auto t0 = Clock::now();
  double worst_R = 0.0, worst_t = 0.0;
  for (int a = 0; a < 50; ++a)
    for (int b = 0; b < 50; ++b) {
      const double R = 0.2 + 4.8 * a / 49.0;
      const double th = -kPi / 4 + (kPi / 2) * b / 50.0;
      if (std::fabs(R - 1.0) < 1e-9) continue;
      const AnisotropyEstimate e = invert_to_anisotropy(ratios_from_anisotropy(R, th));
      worst_R = std::max(worst_R, std::fabs(e.R_hat - R));
      worst_t = std::max(worst_t, std::fabs(e.theta_hat - th));
    }
  const GridField f = generate(gaussian(1.6, 0.3, 4.0), {100, 1.0}, 9);
  GridField scaled = f;
  for (double& v : scaled.values) v *= 7.0;
  const AnisotropyEstimate e = estimate_from_grid(f);
  const AnisotropyEstimate es = estimate_from_grid(scaled);
  const AnisotropyEstimate er = estimate_from_grid(rotate90(f));
  const double scale_err = std::max(std::fabs(es.R_hat - e.R_hat), std::fabs(es.theta_hat - e.theta_hat));
  const double rot_err = std::max(std::fabs(er.R_hat - 1.0 / e.R_hat), std::fabs(er.theta_hat - e.theta_hat));
  const double secs = elapsed(t0);
  const bool ok = worst_R < 1e-12 && worst_t < 1e-12 && scale_err < 1e-12 && rot_err < 1e-12 && secs < 1.0;
  return {ok, fmt("round trip max err R %.2g, theta %.2g; scaling %.2g; 90-deg rotation %.2g; %.3f s", worst_R, worst_t,
                  scale_err, rot_err, secs)};
}

// 10 -----------------------------------------------------------------------
Outcome change_detection() {
  const auto t0 = Clock::now();
  AnisotropyEstimate a, b;
  a.R_hat = 1.18;
  a.theta_hat = 7.36 * kDeg;
  b.R_hat = 0.45;
  b.theta_hat = -0.75 * kDeg;
  const ChangeDecision d = change_detect(a, 1008, b, 1008, 0.95, 720);

  // Synthetic regeneration: 1008 scattered samples per scenario, interpolated and
  // estimated. The point spacing (about 3 nodes) resolves the shorter length 4.5.
  const GridSpec spec{100, 1.0};
  AnisotropyEstimate est[2];
  const CovarianceModel models[2] = {gaussian(1.18, 7.36 * kDeg, 10.0), gaussian(0.45, -0.75 * kDeg, 10.0)};
  for (int k = 0; k < 2; ++k) {
    const GridField f = generate(models[k], spec, 40 + k);
    const ScatteredSample s = subsample_scattered(f, 1008, 60 + k);
    est[k] = estimate_from_grid(interpolate_to_grid(s, spec));
  }
  const ChangeDecision ds = change_detect(est[0], 1008, est[1], 1008, 0.95, 720);
  const bool ok = d.significant_change && ds.significant_change;
  return {ok, fmt("Table-I estimates: %s; synthetic pair (%.3f, %.2f deg) vs (%.3f, %.2f deg): %s; %.2f s",
                  d.significant_change ? "disjoint, change flagged" : "overlap", est[0].R_hat,
                  est[0].theta_hat / kDeg, est[1].R_hat, est[1].theta_hat / kDeg,
                  ds.significant_change ? "disjoint, change flagged" : "overlap", elapsed(t0))};
}

}  // namespace

int main() {
  report(1, "isotropy interval bounds", isotropy_interval_values);
  report(2, "feasibility bound N > 12 at p = 0.95", feasibility_bound);
  report(3, "asymptotic vs exact ratio PDF", asymptotic_ratio_pdf);
  report(4, "degenerate peak reproduction", degenerate_peak);
  report(5, "non-parametric JPDF normalization", normalization);
  report(6, "Monte Carlo coverage of the non-parametric region", monte_carlo_coverage);
  report(7, "exact-windowed region inside non-parametric region", region_dominance);
  report(8, "distributional oracles", distributional_oracles);
  report(9, "round-trip estimation identities", round_trip_identities);
  report(10, "two-scenario change detection", change_detection);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
