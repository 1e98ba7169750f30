#include "anistat/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anistat/error.hpp"

namespace anistat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFoldTol = 1e-12;

}  // namespace

bool AnisotropyEstimate::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::pair<GridField, GridField> gradients(const GridField& field) {
  if (field.spec.side < 3) throw InvalidInput("gradients need a grid of side >= 3");
  field.validate();
  const std::size_t n = field.spec.side;
  const std::size_t m = n - 2;
  const double inv2a = 1.0 / (2.0 * field.spec.spacing);
  GridSpec inner{m, field.spec.spacing};
  GridField gx{inner, std::vector<double>(m * m, 0.0), {}};
  GridField gy{inner, std::vector<double>(m * m, 0.0), {}};
  const bool masked = !field.mask.empty();
  if (masked) {
    gx.mask.assign(m * m, 0);
    gy.mask.assign(m * m, 0);
  }
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const std::size_t k = (i - 1) * m + (j - 1);
      if (masked) {
        const bool ok = field.valid(i, j) && field.valid(i, j - 1) && field.valid(i, j + 1) &&
                        field.valid(i - 1, j) && field.valid(i + 1, j);
        if (!ok) continue;
        gx.mask[k] = gy.mask[k] = 1;
      }
      gx.values[k] = (field.at(i, j + 1) - field.at(i, j - 1)) * inv2a;
      gy.values[k] = (field.at(i + 1, j) - field.at(i - 1, j)) * inv2a;
    }
  return {std::move(gx), std::move(gy)};
}

SlopeTensor slope_tensor_estimate(const GridField& field) {
  const auto [gx, gy] = gradients(field);
  SlopeTensor q;
  std::size_t count = 0;
  for (std::size_t k = 0; k < gx.values.size(); ++k) {
    if (!gx.mask.empty() && !gx.mask[k]) continue;
    const double a = gx.values[k];
    const double b = gy.values[k];
    q.q11 += a * a;
    q.q22 += b * b;
    q.q12 += a * b;
    ++count;
  }
  if (count == 0) throw DegenerateSample("no valid interior nodes for the slope tensor");
  q.q11 /= static_cast<double>(count);
  q.q22 /= static_cast<double>(count);
  q.q12 /= static_cast<double>(count);
  q.n = count;
  return q;
}

SlopeRatios ratios(const SlopeTensor& q) {
  if (!(q.q11 > 0.0) || !std::isfinite(q.q11) || !std::isfinite(q.q22) || !std::isfinite(q.q12))
    throw DegenerateSample("slope tensor has Q11 <= 0; ratios undefined");
  return {q.q22 / q.q11, q.q12 / q.q11};
}

SlopeRatios ratios_from_anisotropy(double R, double theta) {
  if (!(R > 0.0) || !std::isfinite(R) || !std::isfinite(theta))
    throw InvalidInput("ratios_from_anisotropy: R must be positive, theta finite");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double r2 = R * R;
  const double den = r2 * c * c + s * s;
  return {(r2 * s * s + c * c) / den, c * s * (r2 - 1.0) / den};
}

AnisotropyEstimate invert_to_anisotropy(const SlopeRatios& r) {
  if (!(r.qd > 0.0) || !std::isfinite(r.qd) || !std::isfinite(r.qo))
    throw InvalidInput("slope ratio qd must be positive and finite");
  if (!(r.qo * r.qo < r.qd)) throw DegenerateSample("slope ratios violate qo^2 < qd (singular tensor)");

  AnisotropyEstimate est;
  const double dx = 1.0 - r.qd;
  const double dy = 2.0 * r.qo;
  if (std::fabs(dx) <= 1e-14 && std::fabs(dy) <= 1e-14) {
    est.flags.emplace_back(kFlagIsotropicDegenerate);
    return est;
  }

  // Principal frame of [[1, qo], [qo, qd]]: phi is the angle for which R >= 1.
  const double phi = 0.5 * std::atan2(dy, dx);
  const double lp = 0.5 * (1.0 + r.qd) + std::hypot(0.5 * dx, r.qo);
  const double lm = (r.qd - r.qo * r.qo) / lp;
  double R = std::sqrt(lp / lm);
  double theta = phi;
  if (phi >= kPi / 4 - kFoldTol) {
    theta = phi - kPi / 2;
    R = 1.0 / R;
  } else if (phi < -kPi / 4 - kFoldTol) {
    theta = phi + kPi / 2;
    R = 1.0 / R;
  }
  theta = std::max(theta, -kPi / 4);

  // Closed form for R in terms of theta; ill-conditioned near |theta| = pi/4.
  const double c2 = std::cos(theta) * std::cos(theta);
  if (std::fabs(std::cos(2.0 * theta)) >= 1e-3) {
    const double inner = 1.0 + dx / (r.qd - (1.0 + r.qd) * c2);
    if (inner > 0.0) R = 1.0 / std::sqrt(inner);
  }
  est.R_hat = R;
  est.theta_hat = theta;
  return est;
}

AnisotropyEstimate estimate_from_tensor(const SlopeTensor& q) {
  if (!(q.q11 > 0.0) || !(q.q22 > 0.0) || !(q.det() > 1e-12 * q.q11 * q.q22))
    throw DegenerateSample("slope tensor is rank deficient (constant or one-dimensional field)");
  AnisotropyEstimate est = invert_to_anisotropy(ratios(q));
  est.n_effective = q.n;
  return est;
}

AnisotropyEstimate estimate_from_grid(const GridField& field) {
  return estimate_from_tensor(slope_tensor_estimate(field));
}

SlopeTensor mean_tensor(const std::vector<SlopeTensor>& tensors) {
  if (tensors.empty()) throw InvalidInput("mean slope tensor needs at least one tensor");
  SlopeTensor m;
  for (const auto& t : tensors) {
    m.q11 += t.q11;
    m.q22 += t.q22;
    m.q12 += t.q12;
    m.n += t.n;
  }
  const double k = static_cast<double>(tensors.size());
  m.q11 /= k;
  m.q22 /= k;
  m.q12 /= k;
  return m;
}

AnisotropyEstimate mean_slope_estimate(const std::vector<GridField>& fields) {
  if (fields.empty()) throw InvalidInput("mean_slope_estimate needs at least one field");
  std::vector<SlopeTensor> qs;
  qs.reserve(fields.size());
  for (const auto& f : fields) qs.push_back(slope_tensor_estimate(f));
  return estimate_from_tensor(mean_tensor(qs));
}

}  // namespace anistat
