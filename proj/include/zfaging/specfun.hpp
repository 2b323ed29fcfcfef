#pragma once

// Special-function kernel: J0, Ei on the negative axis, integer-shape
// incomplete gamma functions and Tricomi's U for integer parameters.
// The templated forms also run in BigFloat for the closed-form evaluators.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "errors.hpp"
#include "precision.hpp"

namespace zfaging::specfun {

struct EvalResult {
  double value = 0.0;
  double abs_err_estimate = 0.0;
};

namespace detail {

using zfaging::detail::is_big_v;
using zfaging::detail::working_digits;

template <class Real>
Real epsilon() {
  if constexpr (is_big_v<Real>) {
    return pow(Real(10), -static_cast<int>(working_digits<Real>()));
  } else {
    return std::numeric_limits<Real>::epsilon();
  }
}

template <class Real>
Real euler_gamma() {
  return boost::math::constants::euler<Real>();
}

// E1(z) for z > 0 by the power series. Suffers cancellation of about
// 2z/ln(10) digits, which the BigFloat caller compensates with guard digits.
template <class Real>
Real e1_series(const Real& z) {
  using std::abs;
  using std::log;
  const Real eps = epsilon<Real>();
  Real term = 1;
  Real sum = 0;
  for (int k = 1; k < 1000000; ++k) {
    term *= -z / k;
    const Real contrib = term / k;
    sum += contrib;
    if (abs(contrib) <= eps * abs(sum)) break;
  }
  return -euler_gamma<Real>() - log(z) - sum;
}

// E1(z) for z > 0 by the modified Lentz continued fraction.
template <class Real>
Real e1_continued_fraction(const Real& z) {
  using std::abs;
  using std::exp;
  const Real eps = epsilon<Real>();
  Real tiny;
  if constexpr (is_big_v<Real>) {
    tiny = pow(Real(10), -4000);
  } else {
    tiny = 1e-300;
  }
  Real b = z + 1;
  Real c = 1 / tiny;
  Real d = 1 / b;
  Real h = d;
  for (int i = 1; i < 10000000; ++i) {
    const Real an = -Real(i) * i;
    b += 2;
    d = 1 / (an * d + b);
    c = b + an / c;
    const Real del = c * d;
    h *= del;
    if (abs(del - 1) <= eps) break;
  }
  return h * exp(-z);
}

}  // namespace detail

/// Ei(x) for x < 0, i.e. -E1(-x). Generic over double and BigFloat.
template <class Real>
Real ei_negative(const Real& x) {
  if (!(x < 0)) throw DomainError("expint_ei: argument must be negative");
  const Real z = -x;
  if constexpr (detail::is_big_v<Real>) {
    // Pick the cheaper route. The series needs ~e*z terms plus guard digits;
    // the fraction needs ~(D ln 10)^2 / (4z) iterations.
    const double zd = z.template convert_to<double>();
    const unsigned digits = detail::working_digits<Real>();
    if (zd < digits * std::numbers::ln10 / 4.0) {
      const unsigned guard = static_cast<unsigned>(2.0 * zd / std::numbers::ln10) + 10;
      PrecisionScope scope(digits + guard);
      Real zz = z;
      Real r = -detail::e1_series(zz);
      return r;
    }
    return -detail::e1_continued_fraction(z);
  } else {
    if (z > 745.0) return -0.0;
    if (z <= 1.0) return -detail::e1_series(z);
    return -detail::e1_continued_fraction(z);
  }
}

/// Exponential integral Ei(x) on x < 0.
inline EvalResult expint_ei(double x) {
  if (!(x < 0.0) || std::isnan(x)) {
    throw DomainError("expint_ei: defined here only for x < 0, got " + std::to_string(x));
  }
  const double v = ei_negative(x);
  return {v, std::abs(v) * 4.0 * std::numeric_limits<double>::epsilon()};
}

/// Bessel J0. Miller backward recurrence below |x| = 60, Hankel asymptotics above.
inline EvalResult bessel_j0(double x) {
  const double ax = std::abs(x);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (ax < 1e-8) return {1.0 - 0.25 * x * x, eps};
  if (ax < 60.0) {
    int start = static_cast<int>(ax) + 40 + static_cast<int>(4.0 * std::cbrt(ax));
    start += start % 2;
    double jp1 = 0.0;
    double j = 1e-300;
    double j0 = 0.0;
    double norm = 0.0;
    for (int n = start; n >= 1; --n) {
      const double jm1 = 2.0 * n / ax * j - jp1;
      jp1 = j;
      j = jm1;
      // j now holds the (unnormalized) J_{n-1}
      if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * j;
      if (std::abs(j) > 1e250) {
        j *= 1e-250;
        jp1 *= 1e-250;
        norm *= 1e-250;
      }
    }
    j0 = j;
    norm += j0;
    return {j0 / norm, 8.0 * eps * (1.0 + std::sqrt(ax))};
  }
  // Hankel asymptotic expansion, a_k = prod (2j-1)^2 / (k! (8x)^k).
  const double z8 = 8.0 * ax;
  double p = 1.0;
  double q = 0.0;
  double a_k = 1.0;
  double last = 1.0;
  for (int k = 1; k < 60 && a_k > 1e-18; ++k) {
    const double m = 2.0 * k - 1.0;
    a_k *= m * m / (k * z8);
    if (k % 2 == 1) {
      q += ((k + 1) / 2 % 2 == 0) ? a_k : -a_k;
    } else {
      p += (k / 2 % 2 == 0) ? a_k : -a_k;
    }
    last = a_k;
  }
  const double chi = ax - std::numbers::pi / 4.0;
  const double v = std::sqrt(2.0 / (std::numbers::pi * ax)) * (p * std::cos(chi) - q * std::sin(chi));
  return {v, std::abs(last) + 16.0 * eps};
}

inline double log_gamma(double x) { return std::lgamma(x); }

/// Upper incomplete gamma for positive integer shape:
/// Gamma(a, x) = (a-1)! e^{-x} sum_{j<a} x^j / j!.
template <class Real>
Real gamma_upper_int_t(int a, const Real& x) {
  using std::exp;
  if (a <= 0) throw DomainError("gamma_upper_int: shape must be a positive integer");
  if (x < 0) throw DomainError("gamma_upper_int: x must be nonnegative");
  Real term = 1;
  Real sum = 1;
  Real fact = 1;
  for (int j = 1; j < a; ++j) {
    term *= x / j;
    sum += term;
    fact *= j;
  }
  return fact * exp(-x) * sum;
}

inline EvalResult gamma_upper_int(int a, double x) {
  const double v = gamma_upper_int_t<double>(a, x);
  return {v, std::abs(v) * (a + 2) * std::numeric_limits<double>::epsilon()};
}

/// Regularized lower incomplete gamma P(a, x) for positive integer shape.
template <class Real>
Real gamma_lower_reg_int_t(int a, const Real& x) {
  using std::exp;
  using std::abs;
  using std::log;
  if (a <= 0) throw DomainError("gamma_lower_reg_int: shape must be a positive integer");
  if (x < 0) throw DomainError("gamma_lower_reg_int: x must be nonnegative");
  if (x == 0) return Real(0);
  if (x < a) {
    // P = e^{-x} x^a / a! * sum_j x^j / ((a+1)...(a+j)); no cancellation.
    Real lead = -x + a * log(x);
    for (int j = 2; j <= a; ++j) lead -= log(Real(j));
    const Real eps = detail::epsilon<Real>();
    Real term = 1;
    Real sum = 1;
    for (int j = 1; j < 100000; ++j) {
      term *= x / (a + j);
      sum += term;
      if (term <= eps * sum) break;
    }
    return exp(lead) * sum;
  }
  Real term = 1;
  Real sum = 1;
  for (int t = 1; t < a; ++t) {
    term *= x / t;
    sum += term;
  }
  return 1 - exp(-x) * sum;
}

inline EvalResult gamma_lower_reg_int(int a, double x) {
  const double v = gamma_lower_reg_int_t<double>(a, x);
  return {v, (a + 2) * std::numeric_limits<double>::epsilon()};
}

namespace detail {

// log U(a, b, x) for b >= a + 1: U = x^{-a} sum_r C(n,r) (a)_r x^{-r}, n = b-a-1.
inline double log_tricomi_finite(int a, int b, double x) {
  const int n = b - a - 1;
  std::vector<double> logs(static_cast<std::size_t>(n) + 1);
  double top = -std::numeric_limits<double>::infinity();
  for (int r = 0; r <= n; ++r) {
    const double lt = std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0) +
                      std::lgamma(a + static_cast<double>(r)) - std::lgamma(static_cast<double>(a)) -
                      r * std::log(x);
    logs[static_cast<std::size_t>(r)] = lt;
    top = std::max(top, lt);
  }
  double acc = 0.0;
  for (double lt : logs) acc += std::exp(lt - top);
  return -a * std::log(x) + top + std::log(acc);
}

// log U(a, b, x) from the integral representation, scaled by the peak of the
// integrand so that large a and b do not overflow.
inline double log_tricomi_quadrature(int a, int b, double x) {
  const double am1 = a - 1.0;
  const double n = b - a - 1.0;
  auto phi = [=](double t) {
    double v = -x * t + n * std::log1p(t);
    if (am1 > 0.0) v += am1 * std::log(t);
    return v;
  };
  double tstar = 0.0;
  if (am1 > 0.0) {
    const double bq = am1 - x + n;
    tstar = (bq + std::sqrt(bq * bq + 4.0 * x * am1)) / (2.0 * x);
  }
  const double peak = phi(std::max(tstar, 0.0));
  auto f = [&](double t) {
    if (t <= 0.0) return am1 > 0.0 ? 0.0 : std::exp(-peak);
    return std::exp(phi(t) - peak);
  };
  double total = 0.0;
  constexpr double tol = 1e-13;
  if (tstar > 0.0) {
    boost::math::quadrature::tanh_sinh<double> left;
    total += left.integrate(f, 0.0, tstar, tol);
  }
  boost::math::quadrature::exp_sinh<double> right;
  auto shifted = [&](double s) { return f(tstar + s); };
  total += right.integrate(shifted, tol);
  return peak + std::log(total) - std::lgamma(static_cast<double>(a));
}

}  // namespace detail

/// log U(a, b, x); finite for every valid input even when U overflows a double.
inline double log_tricomi_u_int(int a, int b, double x) {
  if (a < 1) throw DomainError("tricomi_u_int: a must be a positive integer");
  if (!(x > 0.0)) throw DomainError("tricomi_u_int: x must be positive");
  if (b >= a + 1) return detail::log_tricomi_finite(a, b, x);
  return detail::log_tricomi_quadrature(a, b, x);
}

/// Tricomi confluent hypergeometric U(a, b, x) for integer a >= 1, integer b, x > 0.
inline EvalResult tricomi_u_int(int a, int b, double x) {
  const double lu = log_tricomi_u_int(a, b, x);
  const double v = std::exp(lu);
  const double rel = b >= a + 1 ? 64.0 * (b - a) * std::numeric_limits<double>::epsilon() : 1e-11;
  return {v, v * rel};
}

/// (b-a-1 >= 0) U in Real arithmetic from the finite sum, for the closed forms.
template <class Real>
Real tricomi_u_finite_t(int a, int b, const Real& x) {
  if (a < 1 || b < a + 1) throw DomainError("tricomi_u_finite_t: needs a >= 1 and b >= a + 1");
  const int n = b - a - 1;
  Real term = 1;  // C(n,r) (a)_r x^{-r}
  Real sum = 1;
  for (int r = 1; r <= n; ++r) {
    term *= Real(n - r + 1) / r * Real(a + r - 1) / x;
    sum += term;
  }
  using std::pow;
  return sum / pow(x, a);
}

}  // namespace zfaging::specfun
