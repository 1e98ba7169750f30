#include "anistat/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "anistat/error.hpp"

namespace anistat {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// K_0(x), K_1(x) via Temme's series (x <= 2) or Steed's continued fraction
// CF2 (x > 2), specialised to fractional order mu = 0.
std::pair<double, double> bessel_k01(double x) {
  if (x <= 2.0) {
    const double half = 0.5 * x;
    const double d = -std::log(half);
    double ff = -kEulerGamma + d;
    double sum = ff;
    double p = 0.5;
    double q = 0.5;
    double c = 1.0;
    const double d2 = half * half;
    double sum1 = p;
    for (int i = 1; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (static_cast<double>(i) * i);
      c *= d2 / i;
      p /= i;
      q /= i;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return {sum, sum1 * 2.0 / x};
  }

  const double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < kEps) break;
  }
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

// K_{n+1/2}(x) = sqrt(pi/2x) e^{-x} sum_k (n+k)! / (k! (n-k)!) (2x)^{-k}
double bessel_k_half(int n, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= n; ++k) {
    term *= static_cast<double>((n + k) * (n - k + 1)) / (k * 2.0 * x);
    sum += term;
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) * sum;
}

}  // namespace

double bessel_k(double order, double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("bessel_k: argument must be positive and finite, got " + std::to_string(x));
  const double nu = std::fabs(order);
  const double twice = 2.0 * nu;
  const double rounded_twice = std::round(twice);
  if (std::fabs(twice - rounded_twice) > 1e-12 || rounded_twice > 400.0)
    throw DomainError("bessel_k: order must be an integer or half-integer, got " +
                      std::to_string(order));
  const int twice_order = static_cast<int>(rounded_twice);
  if (x > 745.0) return 0.0;

  if (twice_order % 2 == 1) return bessel_k_half((twice_order - 1) / 2, x);

  const int n = twice_order / 2;
  auto [k_prev, k_cur] = bessel_k01(x);
  if (n == 0) return k_prev;
  for (int i = 1; i < n; ++i) {
    const double next = k_prev + (2.0 * i / x) * k_cur;
    k_prev = k_cur;
    k_cur = next;
  }
  return k_cur;
}

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < 4.0) return std::exp(x * x) * std::erfc(x);

  // Continued fraction 1/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  // evaluated bottom-up; 60 levels are ample for x >= 4.
  double tail = x;
  for (int k = 60; k >= 1; --k) tail = x + (0.5 * k) / tail;
  return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

}  // namespace anistat
