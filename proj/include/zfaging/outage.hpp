#pragma once

// Outage probability P(gamma <= gamma_th). With theta = gamma_th /
// (hat_beta a2 (1 - C gamma_th)) the event is X/hat_beta <= theta (Y + 1/p);
// conditioning on each gamma component of Y gives negative-binomial weights.

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "model.hpp"
#include "precision.hpp"
#include "specfun.hpp"

namespace zfaging {

namespace detail {

inline double outage_theta(const SinrModel& m, double gamma_th) {
  return gamma_th / (m.hat_beta * m.alpha2 * (1.0 - m.C * gamma_th));
}

// 1 - P evaluated as sum_{p,q} X_{p,q} sum_{s<=M} NB_q(s) w_{M-s}; w_j = 1 gives
// the high-power limit, w_j = e^{-z} e_j(z) the finite-power value.
inline double outage_sum(const SinrModel& m, double theta, bool high_power) {
  const int M = m.M();
  const CharCoeffs& c = m.y->coeffs;
  PrecisionScope scope(c.digits + 30);
  const auto X = residue_coeffs(c.mu, c.tau);
  std::vector<BigFloat> w(static_cast<std::size_t>(M) + 1, BigFloat(1));
  if (!high_power) {
    const BigFloat z = BigFloat(theta) / BigFloat(m.p_r);
    const BigFloat ez = exp(-z);
    BigFloat term = 1;
    BigFloat partial = 0;
    for (int j = 0; j <= M; ++j) {
      if (j > 0) term *= z / j;
      partial += term;
      w[static_cast<std::size_t>(j)] = ez * partial;
    }
  }
  BigFloat survive = 0;
  const BigFloat th(theta);
  for (std::size_t p = 0; p < c.mu.size(); ++p) {
    const BigFloat mu(c.mu[p]);
    const BigFloat pi = mu * th / (1 + mu * th);
    const BigFloat keep = 1 / (1 + mu * th);
    BigFloat keep_q = 1;
    for (int q = 1; q <= c.tau[p]; ++q) {
      keep_q *= keep;
      BigFloat nb = keep_q;  // NB_q(0)
      BigFloat acc = nb * w[static_cast<std::size_t>(M)];
      for (int s = 1; s <= M; ++s) {
        nb = nb * (q + s - 1) / s * pi;
        acc += nb * w[static_cast<std::size_t>(M - s)];
      }
      survive += X[p][static_cast<std::size_t>(q - 1)] * acc;
    }
  }
  return std::clamp(to_double(1 - survive), 0.0, 1.0);
}

}  // namespace detail

inline double outage_closed(const SinrModel& m, double gamma_th) {
  if (!(gamma_th > 0.0)) throw InvalidArgument("outage: gamma_th must be > 0");
  if (m.alpha2 == 0.0) return 1.0;
  if (m.C > 0.0 && gamma_th >= 1.0 / m.C) return 1.0;
  if (!std::isfinite(m.p_r) || !(m.p_r > 0.0)) throw InvalidArgument("outage_closed: p_r must be finite and > 0");
  const double theta = detail::outage_theta(m, gamma_th);
  if (!m.y || m.y->degenerate()) {
    return specfun::gamma_lower_reg_int(m.M() + 1, theta / m.p_r).value;
  }
  return detail::outage_sum(m, theta, false);
}

/// Limit of outage_closed as p_r grows without bound.
inline double outage_high_power(const SinrModel& m, double gamma_th) {
  if (!(gamma_th > 0.0)) throw InvalidArgument("outage: gamma_th must be > 0");
  if (m.alpha2 == 0.0) return 1.0;
  if (m.C > 0.0 && gamma_th >= 1.0 / m.C) return 1.0;
  if (!m.y || m.y->degenerate()) return 0.0;
  return detail::outage_sum(m, detail::outage_theta(m, gamma_th), true);
}

inline double outage_closed(const DerivedStats& s, int k, double gamma_th) {
  return outage_closed(make_model(s, k), gamma_th);
}
inline double outage_high_power(const DerivedStats& s, int k, double gamma_th) {
  return outage_high_power(make_model(s, k), gamma_th);
}

}  // namespace zfaging
