#pragma once

namespace bias_audit {

/// Complementary error function for x >= 0, computed without libm's erfc:
/// a positive-term series for erf below x = 2, a continued fraction up to
/// x = 8/sqrt(2), and the asymptotic expansion beyond. Negative x uses
/// erfc(-x) = 2 - erfc(x).
double erfc_series(double x) noexcept;

/// Standard normal CDF.
double normal_cdf(double z) noexcept;

/// P(|Z| >= |z|) for a standard normal Z.
double normal_two_sided_p(double z) noexcept;

}  // namespace bias_audit
