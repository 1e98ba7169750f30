#include "anistat/linalg.hpp"

namespace anistat {

namespace {

double norm1(const Mat3& a) {
  double best = 0.0;
  for (int j = 0; j < 3; ++j) {
    double col = 0.0;
    for (int i = 0; i < 3; ++i) col += std::fabs(a(i, j));
    best = std::fmax(best, col);
  }
  return best;
}

}  // namespace

bool invert(const Mat3& a, Mat3& inv, double max_condition) {
  const double d = a.det();
  if (!std::isfinite(d) || d == 0.0) return false;

  Mat3 adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inv(i, j) = adj(i, j) / d;

  const double kappa = norm1(a) * norm1(inv);
  return std::isfinite(kappa) && kappa <= max_condition;
}

bool cholesky(const Mat3& a, Mat3& lower) {
  lower = Mat3::zero();
  for (int j = 0; j < 3; ++j) {
    double diag = a(j, j);
    for (int k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
    if (!(diag > 0.0)) return false;
    lower(j, j) = std::sqrt(diag);
    for (int i = j + 1; i < 3; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / lower(j, j);
    }
  }
  return true;
}

}  // namespace anistat
