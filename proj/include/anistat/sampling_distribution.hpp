#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "anistat/covariance.hpp"
#include "anistat/grid.hpp"
#include "anistat/linalg.hpp"
#include "anistat/tensor.hpp"

namespace anistat {

enum class CqqProvenance { ExactWindowed, LeadingOrder };

std::string provenance_name(CqqProvenance p);

/// Covariance of (Q11_hat, Q22_hat, Q12_hat), in that component order.
struct QqqCovariance {
  Mat3 matrix;
  CqqProvenance provenance = CqqProvenance::LeadingOrder;
  std::size_t n = 0;
  // Windowed summation only: half-width in nodes and the stability verdict.
  int window = 0;
  bool stable = true;
  std::string warning;
};

/// (2/N) [[Q11^2, Q12^2, Q11 Q12], [Q12^2, Q22^2, Q12 Q22],
///        [Q11 Q12, Q12 Q22, (Q12^2 + Q11 Q22)/2]].
QqqCovariance cqq_leading(const SlopeTensor& q, std::size_t n);

/// (1/N) sum over lags r in a square window of [H_ik(r) H_jl(r) + H_il(r) H_jk(r)],
/// N = (side - 2)^2 interior nodes, half-width ceil(window_factor * xi_max / a).
/// The result is flagged unstable when w a <= xi_max or a >= xi_min.
QqqCovariance cqq_exact(const CovarianceModel& model, const GridSpec& spec, double window_factor = 3.0);

struct PdfCoefficients {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double log_K = 0.0;
  double log_K_tilde = 0.0;  // log of K / (sqrt(2) A^{3/2})
  double x = 0.0;            // B / (2 sqrt(2A)); equals B_tilde N (exact) or B0_tilde sqrt(N) (leading)
  double B_tilde = 0.0;
  double C_tilde = 0.0;
};

/// Precomputed inverse of CQQ for repeated density evaluations.
class RatioDensity {
 public:
  RatioDensity(const SlopeTensor& mean_q, const QqqCovariance& cqq);

  PdfCoefficients coefficients(const SlopeRatios& qhat) const;
  double exact(const SlopeRatios& qhat) const;
  double asymptotic(const SlopeRatios& qhat) const;
  double log_asymptotic(const SlopeRatios& qhat) const;
  /// Exact for ExactWindowed, asymptotic (non-parametric scaling) for LeadingOrder.
  double density(const SlopeRatios& qhat) const;

  const QqqCovariance& cqq() const { return cqq_; }
  const SlopeTensor& mean() const { return mean_; }

 private:
  SlopeTensor mean_;
  QqqCovariance cqq_;
  Mat3 inv_;
  double log_K_ = 0.0;
};

PdfCoefficients pdf_coefficients(const SlopeRatios& qhat, const SlopeTensor& mean_q, const QqqCovariance& cqq);
double ratio_pdf_exact(const SlopeRatios& qhat, const SlopeTensor& mean_q, const QqqCovariance& cqq);
double ratio_pdf_asymptotic(const SlopeRatios& qhat, const SlopeTensor& mean_q, const QqqCovariance& cqq);

/// Signed determinant of d(qd, qo) / d(theta_hat, R_hat).
double jacobian_det(double R_hat, double theta_hat);

double jpdf(double R_hat, double theta_hat, const SlopeTensor& mean_q, const QqqCovariance& cqq);

struct NonparametricCoefficients {
  double A0 = 0.0;
  double B0 = 0.0;
  double K0 = 0.0;
};
NonparametricCoefficients nonparametric_coefficients(double R_hat, double theta_hat, double R, double theta);

/// Closed-form non-parametric JPDF of (R_hat, theta_hat), per radian.
double jpdf_nonparametric(double R_hat, double theta_hat, double R, double theta, std::size_t n);

/// Density of X_ii = (d_i X)^2: chi-square with one degree of freedom scaled by Q_ii.
double pdf_diagonal_product(double y, double q_ii);
/// Density of X_12 = d_1 X d_2 X; infinite at y = 0.
double pdf_cross_product(double y, const SlopeTensor& q);

struct GradientProductMoments {
  double var_11;
  double var_22;
  double var_12;
};
GradientProductMoments gradient_product_moments(const SlopeTensor& q);

/// Trivariate normal draws of (Q11_hat, Q22_hat, Q12_hat).
class QhatSampler {
 public:
  QhatSampler(const SlopeTensor& mean_q, const QqqCovariance& cqq, std::uint64_t seed);
  SlopeTensor next();

 private:
  Vec3 mean_;
  Mat3 chol_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace anistat
