#pragma once

// Arbitrary-precision arithmetic for the alternating finite sums in the
// closed-form evaluators. MPFR default precision is process global in the
// Boost version we target, so every extended-precision evaluation runs under
// a PrecisionScope, which serializes access and restores the old precision.

#include <algorithm>
#include <cmath>
#include <mutex>

#include <boost/multiprecision/mpfr.hpp>

namespace zfaging {

using BigFloat = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits10)
      : lock_(mutex()), saved_(BigFloat::default_precision()) {
    BigFloat::default_precision(std::max(digits10, 20u));
  }
  ~PrecisionScope() { BigFloat::default_precision(saved_); }

  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

  static unsigned current() { return BigFloat::default_precision(); }

 private:
  static std::recursive_mutex& mutex() {
    static std::recursive_mutex m;
    return m;
  }
  std::unique_lock<std::recursive_mutex> lock_;
  unsigned saved_;
};

namespace detail {

template <class Real>
inline constexpr bool is_big_v = std::is_same_v<Real, BigFloat>;

/// Decimal digits carried by Real in the current scope.
template <class Real>
inline unsigned working_digits() {
  if constexpr (is_big_v<Real>) {
    return PrecisionScope::current();
  } else {
    return 16;
  }
}

template <class Real>
inline double to_double(const Real& x) {
  if constexpr (is_big_v<Real>) {
    return x.template convert_to<double>();
  } else {
    return static_cast<double>(x);
  }
}

/// Relative agreement of two evaluations, used to confirm a precision choice.
inline bool agree(double a, double b, double rel) {
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= rel * scale;
}

}  // namespace detail
}  // namespace zfaging
