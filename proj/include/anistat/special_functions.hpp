#pragma once

namespace anistat {

/// Modified Bessel function of the second kind, K_nu(x).
///
/// Supported orders are integers (evaluated from K_0 and K_1 plus upward
/// recurrence) and half-integers (closed form). Negative orders map to |nu|.
/// Relative accuracy is ~1e-14 for x in [1e-6, 700]; beyond ~745 the result
/// underflows to zero. Throws DomainError for x <= 0 or unsupported orders.
double bessel_k(double order, double x);

/// Scaled complementary error function exp(x^2) * erfc(x).
double erfcx(double x);

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

}  // namespace anistat
