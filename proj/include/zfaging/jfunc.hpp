#pragma once

// J_{m,n}(a, b, k) = int_0^inf y^m (a y + b)^n e^{-k y} Ei(-a y - b) dy
// in closed form (falling-factorial version of the integration-by-parts sum).

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "precision.hpp"
#include "specfun.hpp"

namespace zfaging {

namespace detail {

template <class Real>
struct Neumaier {
  Real sum = 0;
  Real comp = 0;
  double max_abs = 0.0;

  void add(const Real& v) {
    using std::abs;
    const double av = std::abs(to_double(v));
    if (av > max_abs) max_abs = av;
    const Real t = sum + v;
    if (abs(sum) >= abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  Real value() const { return sum + comp; }
};

template <class Real>
Real falling(int n, int s) {
  Real r = 1;
  for (int i = 0; i < s; ++i) r *= n - i;
  return r;
}

template <class Real>
Real binom(int n, int k) {
  if (k < 0 || k > n) return Real(0);
  Real r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

struct JfuncValue {
  double value = 0.0;
  double max_term = 0.0;
};

/// Term-by-term evaluation in Real arithmetic. `max_term` tracks the largest
/// summand magnitude for cancellation diagnostics.
template <class Real>
Real jfunc_t(int m, int n, const Real& a, const Real& b, const Real& k, double* max_term = nullptr) {
  using std::exp;
  using std::pow;
  if (m < 0 || n < 0) throw DomainError("jfunc: m and n must be >= 0");
  if (!(a > 0) || !(b > 0)) throw DomainError("jfunc: a and b must be > 0");
  if (k == 0) throw DomainError("jfunc: third argument must be nonzero");
  if (!(k + a > 0)) throw DomainError("jfunc: integral diverges for k <= -a");
  const Real ei_b = specfun::ei_negative(Real(-b));
  const Real ei_c = specfun::ei_negative(Real(-k * b / a - b));
  const Real ratio = k / a + 1;
  const Real lead = exp(-b) / k;
  const Real shift = exp(k * b / a);

  detail::Neumaier<Real> total;
  for (int r = 0; r <= m; ++r) {
    const int nr = n + r;
    const Real outer = detail::binom<Real>(m, r) * pow(-b, m - r);
    for (int s = 0; s <= nr; ++s) {
      const Real t1 = detail::falling<Real>(nr, s) * pow(b, nr - s) / (pow(k, s + 1) * pow(a, m - s)) * ei_b;
      total.add(outer * t1);
    }
    const Real t2 = -detail::falling<Real>(nr, nr) * shift / (pow(k, nr + 1) * pow(a, m - nr)) * ei_c;
    total.add(outer * t2);
    for (int s = 0; s < nr; ++s) {
      const Real fs = detail::falling<Real>(nr, s) / (pow(k, s) * pow(a, m - s));
      const int top = nr - s - 1;
      for (int u = 0; u <= top; ++u) {
        const Real t3 = lead * detail::falling<Real>(top, u) * fs * pow(b, top - u) / pow(ratio, u + 1);
        total.add(outer * t3);
      }
    }
  }
  if (max_term) *max_term = total.max_abs;
  return total.value();
}

/// Double-precision J with a cancellation guard: throws PrecisionLoss when the
/// largest summand exceeds 1e15 times the result.
inline JfuncValue jfunc(int m, int n, double a, double b, double k) {
  JfuncValue r;
  r.value = jfunc_t<double>(m, n, a, b, k, &r.max_term);
  if (!(r.max_term <= 1e15 * std::abs(r.value))) {
    throw PrecisionLoss("jfunc: cancellation exceeds double precision (max term " + std::to_string(r.max_term) +
                        ", result " + std::to_string(r.value) + ")");
  }
  return r;
}

}  // namespace zfaging
