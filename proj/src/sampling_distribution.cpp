#include "anistat/sampling_distribution.hpp"

#include <cmath>
#include <numbers>

#include "anistat/error.hpp"
#include "anistat/estimation.hpp"
#include "anistat/special_functions.hpp"

namespace anistat {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

// Component index -> tensor indices: 0 -> (1,1), 1 -> (2,2), 2 -> (1,2).
constexpr int kI[3] = {0, 1, 0};
constexpr int kJ[3] = {0, 1, 1};

double h_at(const HessianMatrix& h, int i, int j) {
  if (i == 0 && j == 0) return h.h11;
  if (i == 1 && j == 1) return h.h22;
  return h.h12;
}

void accumulate_products(Mat3& c, const HessianMatrix& h, double weight) {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int i = kI[a], j = kJ[a], k = kI[b], l = kJ[b];
      c(a, b) += weight * (h_at(h, i, k) * h_at(h, j, l) + h_at(h, i, l) * h_at(h, j, k));
    }
}

// log of sqrt(pi) (2x^2 + 1) erfcx(x) - 2x, the closed form of
// 4 * integral_0^inf s^2 exp(-s^2 - 2 x s) ds.
double log_bracket(double x) {
  if (x <= 0.0) {
    const double ax = -x;
    const double e = std::exp(-x * x);
    const double inner = kSqrtPi * (2.0 * x * x + 1.0) * (2.0 - e * erfcx(ax)) + 2.0 * ax * e;
    return x * x + std::log(inner);
  }
  if (x <= 8.0) return std::log(kSqrtPi * (2.0 * x * x + 1.0) * erfcx(x) - 2.0 * x);
  // (1/x) sum_{n>=1} (-1)^{n+1} 2n (2n-1)!! t^n, t = 1 / (2 x^2), stopped at the smallest term.
  const double t = 1.0 / (2.0 * x * x);
  double dfact = 1.0;  // (2n-1)!!
  double tn = 1.0;
  double sum = 0.0;
  double prev = INFINITY;
  for (int n = 1; n < 200; ++n) {
    dfact *= (2.0 * n - 1.0);
    tn *= t;
    const double term = 2.0 * n * dfact * tn;
    if (term >= prev || term < 1e-18 * std::fabs(sum)) break;
    sum += (n % 2 ? term : -term);
    prev = term;
  }
  return std::log(sum / x);
}

}  // namespace

std::string provenance_name(CqqProvenance p) {
  return p == CqqProvenance::ExactWindowed ? "exact-windowed" : "leading-order";
}

QqqCovariance cqq_leading(const SlopeTensor& q, std::size_t n) {
  if (n == 0) throw InvalidInput("cqq_leading: sample size must be at least 1");
  if (!(q.q11 > 0.0) || !(q.q22 > 0.0) || !(q.det() > 0.0))
    throw DegenerateSample("cqq_leading: slope tensor must be positive definite");
  QqqCovariance c;
  c.provenance = CqqProvenance::LeadingOrder;
  c.n = n;
  const double s = 2.0 / static_cast<double>(n);
  const double a = q.q11, b = q.q22, o = q.q12;
  c.matrix(0, 0) = s * a * a;
  c.matrix(0, 1) = c.matrix(1, 0) = s * o * o;
  c.matrix(0, 2) = c.matrix(2, 0) = s * a * o;
  c.matrix(1, 1) = s * b * b;
  c.matrix(1, 2) = c.matrix(2, 1) = s * o * b;
  c.matrix(2, 2) = s * 0.5 * (o * o + a * b);
  return c;
}

QqqCovariance cqq_exact(const CovarianceModel& model, const GridSpec& spec, double window_factor) {
  model.validate();
  spec.validate(3);
  if (!(window_factor > 0.0)) throw InvalidInput("cqq_exact: window factor must be positive");
  const double a = spec.spacing;
  const int w = static_cast<int>(std::ceil(window_factor * model.xi_max() / a));
  const std::size_t interior = (spec.side - 2) * (spec.side - 2);

  QqqCovariance c;
  c.provenance = CqqProvenance::ExactWindowed;
  c.n = interior;
  c.window = w;
  const double xi_max = model.xi_max();
  if (!(w * a > xi_max) || !(a < model.xi_min())) {
    c.stable = false;
    c.warning = "windowed CQQ summation outside its stability conditions (need window half-width > xi_max "
                "and spacing < xi_min)";
  }
  const double inv_n = 1.0 / static_cast<double>(interior);
  for (int dy = -w; dy <= w; ++dy)
    for (int dx = -w; dx <= w; ++dx) {
      const HessianMatrix h = hessian(model, {dx * a, dy * a});
      accumulate_products(c.matrix, h, inv_n);
    }
  return c;
}

RatioDensity::RatioDensity(const SlopeTensor& mean_q, const QqqCovariance& cqq) : mean_(mean_q), cqq_(cqq) {
  if (!cqq.matrix.symmetric()) throw InvalidInput("CQQ must be symmetric");
  if (!invert(cqq.matrix, inv_))
    throw DegenerateSample("CQQ is singular or ill-conditioned (condition number above 1e12)");
  const double det = cqq.matrix.det();
  if (!(det > 0.0)) throw DegenerateSample("CQQ is not positive definite");
  log_K_ = -1.5 * std::log(2.0 * kPi) - 0.5 * std::log(det);
}

PdfCoefficients RatioDensity::coefficients(const SlopeRatios& qhat) const {
  const Vec3 v{1.0, qhat.qd, qhat.qo};
  const Vec3 m{mean_.q11, mean_.q22, mean_.q12};
  PdfCoefficients p;
  p.A = inv_.quad(v, v);
  if (!(p.A > 0.0)) throw DegenerateSample("CQQ inverse is not positive definite");
  p.B = -2.0 * inv_.quad(m, v);
  p.C = inv_.quad(m, m);
  p.log_K = log_K_;
  p.log_K_tilde = log_K_ - 0.5 * std::log(2.0) - 1.5 * std::log(p.A);
  p.x = p.B / (2.0 * std::sqrt(2.0 * p.A));
  const double n = static_cast<double>(cqq_.n);
  if (cqq_.provenance == CqqProvenance::ExactWindowed) {
    p.B_tilde = p.x / n;
    p.C_tilde = p.C / (2.0 * n * n);
  } else {
    p.B_tilde = p.x / std::sqrt(n);
    p.C_tilde = p.C / (2.0 * n);
  }
  return p;
}

double RatioDensity::exact(const SlopeRatios& qhat) const {
  const PdfCoefficients p = coefficients(qhat);
  return std::exp(p.log_K_tilde - 0.5 * p.C + log_bracket(p.x));
}

double RatioDensity::log_asymptotic(const SlopeRatios& qhat) const {
  const PdfCoefficients p = coefficients(qhat);
  return std::log(2.0 * kSqrtPi) + p.log_K_tilde + std::log(2.0 * p.x * p.x + 1.0) + p.x * p.x - 0.5 * p.C;
}

double RatioDensity::asymptotic(const SlopeRatios& qhat) const { return std::exp(log_asymptotic(qhat)); }

double RatioDensity::density(const SlopeRatios& qhat) const {
  return cqq_.provenance == CqqProvenance::ExactWindowed ? exact(qhat) : asymptotic(qhat);
}

PdfCoefficients pdf_coefficients(const SlopeRatios& qhat, const SlopeTensor& mean_q, const QqqCovariance& cqq) {
  return RatioDensity(mean_q, cqq).coefficients(qhat);
}

double ratio_pdf_exact(const SlopeRatios& qhat, const SlopeTensor& mean_q, const QqqCovariance& cqq) {
  return RatioDensity(mean_q, cqq).exact(qhat);
}

double ratio_pdf_asymptotic(const SlopeRatios& qhat, const SlopeTensor& mean_q, const QqqCovariance& cqq) {
  return RatioDensity(mean_q, cqq).asymptotic(qhat);
}

double jacobian_det(double R_hat, double theta_hat) {
  const double c = std::cos(theta_hat);
  const double s = std::sin(theta_hat);
  const double den = R_hat * R_hat * c * c + s * s;
  return 2.0 * R_hat * (R_hat * R_hat - 1.0) / (den * den * den);
}

double jpdf(double R_hat, double theta_hat, const SlopeTensor& mean_q, const QqqCovariance& cqq) {
  if (!(R_hat > 0.0)) throw InvalidInput("jpdf: R_hat must be positive");
  const RatioDensity rd(mean_q, cqq);
  return std::fabs(jacobian_det(R_hat, theta_hat)) * rd.density(ratios_from_anisotropy(R_hat, theta_hat));
}

NonparametricCoefficients nonparametric_coefficients(double R_hat, double theta_hat, double R, double theta) {
  const double r2 = R * R, h2 = R_hat * R_hat;
  const double d = theta_hat - theta;
  NonparametricCoefficients c;
  c.A0 = (h2 - 1.0) * (h2 - 1.0) * (r2 - 1.0) * (r2 - 1.0) * std::cos(4.0 * d) -
         4.0 * (h2 * h2 - 1.0) * (r2 * r2 - 1.0) * std::cos(2.0 * d) +
         (h2 * h2 + 1.0) * (3.0 * r2 * r2 + 2.0 * r2 + 3.0) + 2.0 * h2 * (r2 - 1.0) * (r2 - 1.0);
  c.B0 = ((r2 - 1.0) * (h2 - 1.0) * std::cos(2.0 * d) - (r2 + 1.0) * (h2 + 1.0)) / std::sqrt(2.0 * c.A0);
  const double bracket = (h2 + 1.0) + (h2 - 1.0) * std::cos(2.0 * theta_hat);
  c.K0 = std::pow(kPi * c.A0, -1.5) * r2 * R * bracket * bracket * bracket;
  return c;
}

double jpdf_nonparametric(double R_hat, double theta_hat, double R, double theta, std::size_t n) {
  if (!(R_hat > 0.0) || !(R > 0.0)) throw InvalidInput("jpdf_nonparametric: ratios must be positive");
  if (n == 0) throw InvalidInput("jpdf_nonparametric: sample size must be at least 1");
  const auto c = nonparametric_coefficients(R_hat, theta_hat, R, theta);
  const double N = static_cast<double>(n);
  const double b2 = c.B0 * c.B0;
  return std::fabs(jacobian_det(R_hat, theta_hat)) * 2.0 * kSqrtPi * c.K0 * (2.0 * b2 * N + 1.0) *
         std::exp(N * (b2 - 0.5));
}

double pdf_diagonal_product(double y, double q_ii) {
  if (!(q_ii > 0.0)) throw InvalidInput("pdf_diagonal_product: Q_ii must be positive");
  if (y <= 0.0) return 0.0;
  return std::exp(-y / (2.0 * q_ii)) / std::sqrt(2.0 * kPi * q_ii * y);
}

double pdf_cross_product(double y, const SlopeTensor& q) {
  const double det = q.det();
  if (!(q.q11 > 0.0) || !(q.q22 > 0.0) || !(det > 0.0))
    throw InvalidInput("pdf_cross_product: slope tensor must be positive definite");
  if (y == 0.0) return INFINITY;
  const double arg = std::fabs(y) * std::sqrt(q.q11 * q.q22) / det;
  if (arg > 700.0) {
    // K_0(z) e^{s} with both factors near under/overflow; combine in log space.
    const double log_k0 = std::log(bessel_k(0.0, 700.0)) + 700.0 - arg + 0.5 * std::log(700.0 / arg);
    return std::exp(y * q.q12 / det + log_k0) / (kPi * std::sqrt(det));
  }
  return std::exp(y * q.q12 / det) * bessel_k(0.0, arg) / (kPi * std::sqrt(det));
}

GradientProductMoments gradient_product_moments(const SlopeTensor& q) {
  return {2.0 * q.q11 * q.q11, 2.0 * q.q22 * q.q22, q.q11 * q.q22 + q.q12 * q.q12};
}

QhatSampler::QhatSampler(const SlopeTensor& mean_q, const QqqCovariance& cqq, std::uint64_t seed)
    : mean_{mean_q.q11, mean_q.q22, mean_q.q12}, rng_(seed) {
  if (!cqq.matrix.symmetric() || !cholesky(cqq.matrix, chol_))
    throw DegenerateSample("QhatSampler: CQQ is not positive definite");
}

SlopeTensor QhatSampler::next() {
  const Vec3 z{normal_(rng_), normal_(rng_), normal_(rng_)};
  Vec3 out = mean_;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k <= i; ++k) out[i] += chol_(i, k) * z[k];
  return {out[0], out[1], out[2], 0};
}

}  // namespace anistat
