#pragma once

// Low-SNR expansion, large-N limits, deterministic equivalent, power scaling,
// sum spectral efficiency and the inverse problem (power for a target rate).

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "rate.hpp"
#include "scenario.hpp"

namespace zfaging {

struct LowSnrMetrics {
  double ebn0_min = 0.0;         ///< linear
  double wideband_slope = 0.0;   ///< -2 Rdot^2 ln2 / Rddot
  double rate_slope = 0.0;       ///< dR/dp at p = 0, bits/s/Hz
  double rate_curvature = 0.0;   ///< d2R/dp2 at p = 0
  double wideband_slope_printed = 0.0;  ///< published closed form, E[Y] taken as Tr A

  double ebn0_min_db() const { return 10.0 * std::log10(ebn0_min); }
};

inline LowSnrMetrics low_snr_metrics(const SinrModel& m) {
  if (m.N < m.K) throw PreconditionViolation("low_snr_metrics: needs N >= K");
  if (!(m.alpha2 > 0.0)) throw InvalidArgument("low_snr_metrics: alpha must be nonzero");
  const ErlangDist X = m.x();
  const double a2 = m.alpha2;
  const double ey = m.trace();
  LowSnrMetrics r;
  // gamma = a2 p X - p^2 (a2^2 C X^2 + a2 X Y) + O(p^3), ln(1+g) = g - g^2/2 + ...
  r.rate_slope = a2 * X.mean() / std::numbers::ln2;
  r.rate_curvature = -(a2 * a2 * (2.0 * m.C + 1.0) * X.moment(2) + 2.0 * a2 * X.mean() * ey) / std::numbers::ln2;
  r.ebn0_min = std::numbers::ln2 / (a2 * (m.M() + 1) * m.hat_beta);
  r.wideband_slope = -2.0 * r.rate_slope * r.rate_slope * std::numbers::ln2 / r.rate_curvature;
  const double M = m.M();
  r.wideband_slope_printed = (-2.0 * (M + 1.0) / (M + 2.0)) /
                             (a2 * a2 + 2.0 * a2 * m.C * (M + 3.0) + 2.0 / (M + 2.0) * ey / m.hat_beta);
  return r;
}

inline LowSnrMetrics low_snr_metrics(const DerivedStats& s, int k) { return low_snr_metrics(make_model(s, k)); }

/// Almost-sure SINR limit as N grows: 1/C.
inline double sinr_limit_large_n(const DerivedStats& s, int k) {
  const double C = s.C.at(static_cast<std::size_t>(k));
  if (!(C > 0.0)) throw UnboundedLimit("sinr_limit_large_n: no pilot contamination, SINR grows without bound");
  return 1.0 / C;
}

inline double rate_limit_large_n(const DerivedStats& s, int k) { return std::log2(1.0 + sinr_limit_large_n(s, k)); }

/// Deterministic equivalent with kappa = N/K.
inline double det_equiv_sinr(const DerivedStats& s, int k, double kappa) {
  if (!(kappa >= 1.0)) throw InvalidArgument("det_equiv_sinr: kappa must be >= 1");
  const double a2 = s.alpha2();
  const double hb = s.own_hat_beta(k);
  const double C = s.C.at(static_cast<std::size_t>(k));
  const double sig = a2 * hb * (kappa - 1.0);
  if (sig == 0.0) return 0.0;
  return sig / (sig * C + s.trace_A / s.K);
}

inline double det_equiv_rate(const DerivedStats& s, int k, double kappa) {
  return std::log2(1.0 + det_equiv_sinr(s, k, kappa));
}

/// SINR limit under p_r = E / sqrt(N).
inline double power_scaled_limit(double beta_llk, double C, double alpha, int tau, double E) {
  if (!(beta_llk > 0.0) || !(C >= 0.0) || tau < 1 || !(E > 0.0)) {
    throw InvalidArgument("power_scaled_limit: arguments must be positive");
  }
  const double g = alpha * alpha * tau * E * E * beta_llk * beta_llk;
  return g / (g * C + 1.0);
}

inline double sum_spectral_efficiency(const std::vector<double>& per_user_rates, const CellTopology& topo) {
  if (topo.tau > topo.T) throw InvalidArgument("sum_spectral_efficiency: tau exceeds T");
  double s = 0.0;
  for (double r : per_user_rates) s += r;
  return (1.0 - static_cast<double>(topo.tau) / topo.T) * s;
}

/// Per-user rates through `eval`, computed once per distinct SINR law.
template <class Eval>
std::vector<double> per_user_rates(const DerivedStats& s, Eval&& eval) {
  const auto cls = user_classes(s);
  auto y = std::make_shared<const YDist>(make_ydist(s));
  std::vector<double> out(static_cast<std::size_t>(s.K));
  for (int k = 0; k < s.K; ++k) {
    const int c = cls[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = c == k ? eval(make_model(s, k, y)) : out[static_cast<std::size_t>(c)];
  }
  return out;
}

/// Smallest p_r (fixed scaling) at which user k reaches `target` bits/s/Hz;
/// bisection in log p_r over the quadrature rate.
inline double required_power(double target, const Scenario& base, int k) {
  if (!(target > 0.0)) throw InvalidArgument("required_power: target must be > 0");
  auto rate_at = [&](double log10p) {
    const DerivedStats s = derive_stats(base.with_snr(std::pow(10.0, log10p)));
    return rate_quadrature(make_model(s, k)).bits_per_sym;
  };
  {
    const DerivedStats s0 = derive_stats(base);
    const double ceiling = rate_ceiling(s0.C.at(static_cast<std::size_t>(k)));
    if (target >= ceiling - 1e-6) {
      throw UnachievableTarget("required_power: target " + std::to_string(target) + " is at or above the ceiling " +
                               std::to_string(ceiling));
    }
  }
  double lo = -8.0;
  double hi = 8.0;
  if (rate_at(hi) < target) throw UnachievableTarget("required_power: target not reached at p_r = 1e8");
  if (rate_at(lo) >= target) return std::pow(10.0, lo);
  const double tol = std::log10(1.0 + 1e-4);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (rate_at(mid) < target ? lo : hi) = mid;
  }
  return std::pow(10.0, hi);
}

}  // namespace zfaging
