#include "bias_audit/normal.hpp"

#include <cmath>
#include <numbers>

namespace bias_audit {

namespace {

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (1*3*...*(2n+1)); all
// terms positive so there is no cancellation.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
}

// erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz method.
double erfc_continued_fraction(double x) {
  constexpr double kTiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = x + a / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * f);
}

// erfc(x) ~ e^{-x^2}/(x sqrt(pi)) * sum_n (-1)^n (2n-1)!! / (2x^2)^n,
// truncated before the terms start growing.
double erfc_asymptotic(double x) {
  const double inv = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 100; ++n) {
    const double next = -term * (2.0 * n - 1.0) * inv;
    if (std::fabs(next) >= std::fabs(term)) break;
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return std::exp(-x * x) / (x * std::sqrt(std::numbers::pi)) * sum;
}

constexpr double kSeriesLimit = 2.0;
const double kAsymptoticLimit = 8.0 / std::numbers::sqrt2;

}  // namespace

double erfc_series(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc_series(-x);
  if (x < kSeriesLimit) return 1.0 - erf_series(x);
  if (x <= kAsymptoticLimit) return erfc_continued_fraction(x);
  if (std::isinf(x)) return 0.0;
  return erfc_asymptotic(x);
}

double normal_cdf(double z) noexcept { return 0.5 * erfc_series(-z / std::numbers::sqrt2); }

double normal_two_sided_p(double z) noexcept { return erfc_series(std::fabs(z) / std::numbers::sqrt2); }

}  // namespace bias_audit
