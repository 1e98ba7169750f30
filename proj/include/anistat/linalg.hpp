#pragma once

#include <array>
#include <cmath>

namespace anistat {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Dense 3x3 matrix, row-major. Only what the CQQ algebra needs.
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  static Mat3 zero() { return Mat3{}; }

  Vec3 apply(const Vec3& v) const {
    Vec3 out{};
    for (int i = 0; i < 3; ++i) out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    return out;
  }

  double quad(const Vec3& a, const Vec3& b) const { return dot(a, apply(b)); }

  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }

  double max_abs() const {
    double r = 0.0;
    for (const auto& row : m)
      for (double x : row) r = std::fmax(r, std::fabs(x));
    return r;
  }

  bool symmetric(double rel_tol = 1e-12) const {
    const double scale = max_abs();
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (std::fabs(m[i][j] - m[j][i]) > rel_tol * scale) return false;
    return true;
  }
};

// Inverse via the adjugate. Returns false when the matrix is singular or its
// 1-norm condition estimate exceeds max_condition.
bool invert(const Mat3& a, Mat3& inv, double max_condition = 1e12);

// Lower-triangular Cholesky factor; false if not positive definite.
bool cholesky(const Mat3& a, Mat3& lower);

}  // namespace anistat
