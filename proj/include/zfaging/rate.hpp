#pragma once

// Ergodic rate evaluators: the general closed form, the distinct-spectrum
// closed form, the 2-D quadrature reference and the Jensen lower bound.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dist.hpp"
#include "errors.hpp"
#include "jfunc.hpp"
#include "model.hpp"
#include "precision.hpp"
#include "specfun.hpp"

namespace zfaging {

enum class RateBackend { closed_form, quadrature, distinct_case, monte_carlo };

inline const char* to_string(RateBackend b) {
  switch (b) {
    case RateBackend::closed_form: return "closed_form";
    case RateBackend::quadrature: return "quadrature";
    case RateBackend::distinct_case: return "distinct_case";
    case RateBackend::monte_carlo: return "monte_carlo";
  }
  return "?";
}

struct RateResult {
  double bits_per_sym = 0.0;
  RateBackend backend = RateBackend::quadrature;
  double residual = std::numeric_limits<double>::quiet_NaN();  ///< |closed - quadrature|
  bool fallback = false;  ///< closed form rejected, value is the quadrature one
  double abs_err = 0.0;
  unsigned digits = 0;    ///< working precision used by a closed form
  std::string note;
};

inline double rate_ceiling(double C) {
  return C > 0.0 ? std::log2(1.0 + 1.0 / C) : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Quadrature reference

namespace detail {

template <class F>
double gk_integrate(F&& f, double a, double b, double tol, double* err, unsigned depth = 15) {
  double e = 0.0;
  double l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol, &e, &l1);
  if (err) *err += e;
  return v;
}

// E_X[log2(1 + gamma(X, y))] for fixed y.
inline double inner_rate(const SinrModel& m, double y, double* err) {
  const ErlangDist X = m.x();
  const double mean = X.mean();
  const double sd = std::sqrt(static_cast<double>(X.shape)) * X.scale;
  const double lo = std::max(0.0, mean - 14.0 * sd);
  const double hi = mean + 14.0 * sd + 40.0 * X.scale;
  auto f = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::log1p(m.sinr(x, y)) / std::numbers::ln2 * erlang_pdf(X, x);
  };
  double pieces[] = {lo, mean - 3.0 * sd, mean + 3.0 * sd, hi};
  pieces[1] = std::max(lo, pieces[1]);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (pieces[i + 1] > pieces[i]) total += gk_integrate(f, pieces[i], pieces[i + 1], 1e-13, err, 10);
  }
  return total;
}

}  // namespace detail

/// E[log2(1 + gamma)] over the Erlang x gamma-mixture densities.
inline RateResult rate_quadrature(const SinrModel& m) {
  RateResult r;
  r.backend = RateBackend::quadrature;
  if (m.alpha2 == 0.0) return r;
  if (!(m.p_r > 0.0)) throw InvalidArgument("rate_quadrature: p_r must be > 0");
  double err = 0.0;
  if (!m.y || m.y->degenerate()) {
    r.bits_per_sym = detail::inner_rate(m, 0.0, &err);
    r.abs_err = err;
    return r;
  }
  const YDist& Y = *m.y;
  double var = 0.0;
  for (double c : Y.components) var += c * c;
  const double mean = Y.trace;
  const double sd = std::sqrt(var);
  const double mu_max = Y.coeffs.mu.front();
  const double hi = mean + 12.0 * sd + 40.0 * mu_max;
  auto f = [&](double y) { return detail::inner_rate(m, y, &err) * y_pdf(Y, y); };
  std::vector<double> cuts = {0.0};
  for (double c : {mean - 4.0 * sd, mean, mean + 4.0 * sd}) {
    if (c > cuts.back()) cuts.push_back(c);
  }
  cuts.push_back(hi);
  double total = 0.0;
  double outer_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += detail::gk_integrate(f, cuts[i], cuts[i + 1], 1e-12, &outer_err);
  r.bits_per_sym = total;
  r.abs_err = outer_err + err * 1e-3;
  if (!(outer_err <= 1e-7)) {
    throw NonConvergence("rate_quadrature: error estimate " + std::to_string(outer_err) + " above budget");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Closed forms

namespace detail {

struct ClosedBranch {
  BigFloat c0;
  int sign;
};

inline std::vector<ClosedBranch> closed_branches(const SinrModel& m) {
  std::vector<ClosedBranch> out;
  const BigFloat a2(m.alpha2);
  const BigFloat C(m.C);
  out.push_back({a2 * (C + 1), 1});
  if (m.C > 0.0) out.push_back({a2 * C, -1});
  return out;
}

inline bool kappa_vanishes(const BigFloat& kap, const BigFloat& mu) {
  return abs(kap * mu) < BigFloat("1e-14");
}

// Integrals R_j = int_0^inf y^j e^{-lam y} / (y + beta0) dy, j = 0..n-1.
inline std::vector<BigFloat> shifted_laplace(const BigFloat& lam, const BigFloat& beta0, int n) {
  std::vector<BigFloat> R(static_cast<std::size_t>(n));
  R[0] = -exp(lam * beta0) * specfun::ei_negative(BigFloat(-lam * beta0));
  BigFloat fact = 1;  // (j-1)!
  BigFloat lam_pow = 1;
  for (int j = 1; j < n; ++j) {
    if (j > 1) fact *= j - 1;
    lam_pow *= lam;
    R[static_cast<std::size_t>(j)] = fact / lam_pow - beta0 * R[static_cast<std::size_t>(j - 1)];
  }
  return R;
}

// Q_j = J_{j,0}(a, b, kap) for j = 0..n-1 by integration by parts.
inline std::vector<BigFloat> j_column(const BigFloat& /*a*/, const BigFloat& b, const BigFloat& kap,
                                      const BigFloat& mu, const BigFloat& beta0, int n) {
  const BigFloat lam = 1 / mu;
  const std::vector<BigFloat> R = shifted_laplace(lam, beta0, n + 1);
  const BigFloat eb = exp(-b);
  std::vector<BigFloat> Q(static_cast<std::size_t>(n));
  if (kappa_vanishes(kap, mu)) {
    for (int j = 0; j < n; ++j) Q[static_cast<std::size_t>(j)] = -eb * R[static_cast<std::size_t>(j + 1)] / (j + 1);
    return Q;
  }
  const BigFloat ik = 1 / kap;
  Q[0] = ik * (specfun::ei_negative(BigFloat(-b)) + eb * R[0]);
  for (int j = 1; j < n; ++j) {
    Q[static_cast<std::size_t>(j)] = ik * (j * Q[static_cast<std::size_t>(j - 1)] + eb * R[static_cast<std::size_t>(j)]);
  }
  return Q;
}

/// J_{m,t}(a,b,kap) for m < rows, t <= tmax, from J_{m,t} = a J_{m+1,t-1} + b J_{m,t-1}.
inline std::vector<std::vector<BigFloat>> j_table(const BigFloat& a, const BigFloat& b, const BigFloat& kap,
                                                  const BigFloat& mu, const BigFloat& beta0, int rows, int tmax) {
  std::vector<BigFloat> cur = j_column(a, b, kap, mu, beta0, rows + tmax);
  std::vector<std::vector<BigFloat>> out(static_cast<std::size_t>(rows), std::vector<BigFloat>(static_cast<std::size_t>(tmax) + 1));
  for (int t = 0;; ++t) {
    for (int r = 0; r < rows; ++r) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)] = cur[static_cast<std::size_t>(r)];
    if (t == tmax) break;
    const int len = static_cast<int>(cur.size()) - 1;
    for (int j = 0; j < len; ++j) cur[static_cast<std::size_t>(j)] = a * cur[static_cast<std::size_t>(j + 1)] + b * cur[static_cast<std::size_t>(j)];
    cur.pop_back();
  }
  return out;
}

/// V_{q,n} = int_0^inf y^{q-1} e^{-y/mu} (y + beta0)^n dy
///         = beta0^{q+n} Gamma(q) U(q, q+n+1, beta0/mu),  q <= rows, n <= nmax.
inline std::vector<std::vector<BigFloat>> shifted_moments(const BigFloat& mu, const BigFloat& beta0, int rows, int nmax) {
  const int width = rows + nmax;
  std::vector<BigFloat> cur(static_cast<std::size_t>(width));  // cur[q-1] = V_{q,n}
  BigFloat g = 1;                                               // Gamma(q) mu^q
  for (int q = 1; q <= width; ++q) {
    g *= (q == 1 ? mu : (q - 1) * mu);
    cur[static_cast<std::size_t>(q - 1)] = g;
  }
  std::vector<std::vector<BigFloat>> out(static_cast<std::size_t>(rows), std::vector<BigFloat>(static_cast<std::size_t>(nmax) + 1));
  for (int n = 0;; ++n) {
    for (int q = 0; q < rows; ++q) out[static_cast<std::size_t>(q)][static_cast<std::size_t>(n)] = cur[static_cast<std::size_t>(q)];
    if (n == nmax) break;
    const int len = static_cast<int>(cur.size()) - 1;
    for (int q = 0; q < len; ++q) cur[static_cast<std::size_t>(q)] = cur[static_cast<std::size_t>(q + 1)] + beta0 * cur[static_cast<std::size_t>(q)];
    cur.pop_back();
  }
  return out;
}

// Weights of V_{q,n}: (-1)^n a^n sum_{t=n+1}^{M} (t-n-1)!/t!, n = 0..M-1.
inline std::vector<BigFloat> moment_weights(const BigFloat& a, int M) {
  std::vector<BigFloat> c(static_cast<std::size_t>(std::max(M, 0)));
  BigFloat an = 1;
  BigFloat inv_fact = 1;  // 1/(n+1)!
  for (int n = 0; n < M; ++n) {
    if (n > 0) an *= a;
    inv_fact /= n + 1;
    BigFloat term = inv_fact;  // t = n+1: 0!/(n+1)!
    BigFloat s = term;
    for (int t = n + 1; t < M; ++t) {
      term = term * (t - n) / (t + 1);
      s += term;
    }
    c[static_cast<std::size_t>(n)] = (n % 2 == 0 ? an : BigFloat(-an)) * s;
  }
  return c;
}

/// Rate in nats, evaluated at the current BigFloat precision. X holds the
/// characteristic coefficients at (at least) that precision.
inline BigFloat rate_closed_nats(const SinrModel& m, const std::vector<double>& mu_d, const std::vector<int>& tau,
                                 const std::vector<std::vector<BigFloat>>& X) {
  const int M = m.M();
  const BigFloat p(m.p_r);
  const BigFloat hb(m.hat_beta);
  const BigFloat beta0 = 1 / p;
  BigFloat total = 0;
  for (std::size_t pi = 0; pi < mu_d.size(); ++pi) {
    const BigFloat mu(mu_d[pi]);
    const int tp = tau[pi];
    std::vector<BigFloat> W(static_cast<std::size_t>(tp));
    {
      BigFloat mq = 1;
      BigFloat fq = 1;
      for (int q = 1; q <= tp; ++q) {
        mq /= mu;
        if (q > 1) fq *= q - 1;
        W[static_cast<std::size_t>(q - 1)] = X[pi][static_cast<std::size_t>(q - 1)] * mq / fq;
      }
    }
    const auto V = shifted_moments(mu, beta0, tp, std::max(M - 1, 0));
    for (const auto& br : closed_branches(m)) {
      const BigFloat a = 1 / (hb * br.c0);
      const BigFloat b = a / p;
      const BigFloat kap = 1 / mu - a;
      const auto J = j_table(a, b, kap, mu, beta0, tp, M);
      const auto cw = moment_weights(a, M);
      const BigFloat eb = exp(b);
      BigFloat branch = 0;
      for (int q = 1; q <= tp; ++q) {
        BigFloat s1 = 0;
        BigFloat inv_t = 1;
        for (int t = 0; t <= M; ++t) {
          if (t > 0) inv_t /= t;
          const BigFloat term = inv_t * J[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(t)];
          s1 += (t % 2 == 0) ? BigFloat(-term) : term;
        }
        s1 *= eb;
        BigFloat s2 = 0;
        for (int n = 0; n < M; ++n) s2 += cw[static_cast<std::size_t>(n)] * V[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(n)];
        branch += W[static_cast<std::size_t>(q - 1)] * (s1 + s2);
      }
      total += br.sign > 0 ? branch : BigFloat(-branch);
    }
  }
  return total;
}

/// J_{0,n}(a,b,kap) for n = 0..nmax straight from the term-by-term closed
/// form, with the inner sum over u shared between rows.
inline std::vector<BigFloat> j_row0(const BigFloat& a, const BigFloat& b, const BigFloat& kap, int nmax) {
  const BigFloat ei_b = specfun::ei_negative(BigFloat(-b));
  const BigFloat ei_c = specfun::ei_negative(BigFloat(-kap * b / a - b));
  const BigFloat ratio = kap / a + 1;
  const BigFloat ak = a / kap;
  const BigFloat lead = exp(-b) / kap;
  const BigFloat shift = exp(kap * b / a);
  // G_k = sum_u k!/(k-u)! b^{k-u} / ratio^{u+1}
  std::vector<BigFloat> G(static_cast<std::size_t>(std::max(nmax, 1)));
  for (int k = 0; k < nmax; ++k) {
    BigFloat s = 0;
    BigFloat ff = 1;
    BigFloat rp = 1 / ratio;
    for (int u = 0; u <= k; ++u) {
      if (u > 0) {
        ff *= k - u + 1;
        rp /= ratio;
      }
      s += ff * pow(b, k - u) * rp;
    }
    G[static_cast<std::size_t>(k)] = s;
  }
  std::vector<BigFloat> out(static_cast<std::size_t>(nmax) + 1);
  BigFloat nfact = 1;
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) nfact *= n;
    BigFloat t1 = 0;
    BigFloat t3 = 0;
    BigFloat ff = 1;  // n!/(n-s)!
    BigFloat aks = 1;
    for (int s = 0; s <= n; ++s) {
      if (s > 0) {
        ff *= n - s + 1;
        aks *= ak;
      }
      t1 += ff * pow(b, n - s) * aks;
      if (s < n) t3 += ff * aks * G[static_cast<std::size_t>(n - s - 1)];
    }
    const BigFloat t2 = -nfact * shift * pow(ak, n) / kap * ei_c;
    out[static_cast<std::size_t>(n)] = t1 / kap * ei_b + t2 + lead * t3;
  }
  return out;
}

inline BigFloat rate_distinct_nats(const SinrModel& m, const std::vector<double>& mu_d) {
  const int M = m.M();
  const BigFloat p(m.p_r);
  const BigFloat hb(m.hat_beta);
  BigFloat total = 0;
  for (std::size_t pi = 0; pi < mu_d.size(); ++pi) {
    const BigFloat mu(mu_d[pi]);
    BigFloat Xp = 1;
    for (std::size_t qi = 0; qi < mu_d.size(); ++qi) {
      if (qi != pi) Xp /= 1 - BigFloat(mu_d[qi]) / mu;
    }
    const BigFloat x = 1 / (p * mu);
    std::vector<BigFloat> Gu(static_cast<std::size_t>(M) + 1);  // Gamma(n+1, x)
    for (int n = 0; n <= M; ++n) Gu[static_cast<std::size_t>(n)] = specfun::gamma_upper_int_t<BigFloat>(n + 1, x);
    const BigFloat ex = exp(x);
    for (const auto& br : closed_branches(m)) {
      const BigFloat a = 1 / (hb * br.c0);
      const BigFloat b = a / p;
      const BigFloat kap = 1 / mu - a;
      if (kappa_vanishes(kap, mu)) throw PrecisionLoss("rate_distinct: vanishing exponent, use the general closed form");
      const auto J0 = j_row0(a, b, kap, M);
      const BigFloat eb = exp(b);
      BigFloat s = 0;
      BigFloat inv_t = 1;
      for (int t = 0; t <= M; ++t) {
        if (t > 0) inv_t /= t;
        BigFloat inner = -(t % 2 == 0 ? 1 : -1) * eb * J0[static_cast<std::size_t>(t)];
        BigFloat ufact = 1;  // (u-1)!
        for (int u = 1; u <= t; ++u) {
          if (u > 1) ufact *= u - 1;
          const int n = t - u;
          const BigFloat term = ufact * pow(a, n) * pow(mu, n + 1) * ex * Gu[static_cast<std::size_t>(n)];
          inner += (n % 2 == 0) ? term : BigFloat(-term);
        }
        s += inv_t * inner;
      }
      const BigFloat contrib = Xp / mu * s;
      total += br.sign > 0 ? contrib : BigFloat(-contrib);
    }
  }
  return total;
}

// Rough count of decimal digits lost to cancellation in the closed forms.
inline double closed_form_loss(const SinrModel& m, const std::vector<double>& mu, const std::vector<int>& tau,
                               double log10_coeffs) {
  const int M = m.M();
  const double beta0 = 1.0 / m.p_r;
  double worst = 0.0;
  for (std::size_t p = 0; p < mu.size(); ++p) {
    for (double c0 : {m.alpha2 * (m.C + 1.0), m.alpha2 * m.C}) {
      if (c0 <= 0.0) continue;
      const double a = 1.0 / (m.hat_beta * c0);
      const double kap = 1.0 / mu[p] - a;
      const int rows = tau[p] + M + 1;
      double amp = 0.0;
      const double km = std::abs(kap) * mu[p];
      if (km > 1e-14 && km < 1.0) amp = rows * std::log10(1.0 / km);
      if (km <= 1e-14) amp = 0.0;
      const double bl = beta0 / mu[p];
      const double r_loss = bl / std::numbers::ln10;
      const double w = a * (mu[p] * (tau[p] + 10.0 * std::sqrt(static_cast<double>(tau[p])) + 10.0) + beta0);
      double peak = 0.0;
      double lt = 0.0;
      for (int t = 1; t <= M; ++t) {
        lt += std::log10(w / t);
        peak = std::max(peak, lt);
      }
      worst = std::max(worst, amp + r_loss + 2.0 * peak);
    }
  }
  return worst + std::max(0.0, log10_coeffs);
}

template <class Eval>
BigFloat adaptive_precision(const char* what, double loss, unsigned* digits_used, Eval&& eval) {
  unsigned d = static_cast<unsigned>(40.0 + loss);
  for (;;) {
    if (d > 20000) throw PrecisionLoss(std::string(what) + ": required working precision exceeds 20000 digits");
    const unsigned d2 = d + std::max(20u, d / 4);
    BigFloat lo;
    BigFloat hi;
    {
      PrecisionScope scope(d);
      lo = eval();
    }
    {
      PrecisionScope scope(d2);
      hi = eval();
    }
    const double vl = to_double(lo);
    const double vh = to_double(hi);
    if (agree(vl, vh, 1e-13) || std::abs(vl - vh) < 1e-15) {
      *digits_used = d2;
      return hi;
    }
    d = 2 * d2;
  }
}

}  // namespace detail

/// The general closed form alone, without the quadrature cross-check.
inline RateResult rate_closed_raw(const SinrModel& m) {
  RateResult r;
  r.backend = RateBackend::closed_form;
  if (m.alpha2 == 0.0) return r;
  if (!std::isfinite(m.p_r) || !(m.p_r > 0.0)) throw InvalidArgument("rate_closed: p_r must be finite and > 0");
  if (!m.y || m.y->degenerate()) throw PreconditionViolation("rate_closed: aging-error spectrum is empty");
  const CharCoeffs& cc = m.y->coeffs;
  const double loss = detail::closed_form_loss(m, cc.mu, cc.tau, cc.log10_max);
  const BigFloat v = detail::adaptive_precision("rate_closed", loss, &r.digits, [&] {
    const auto X = detail::residue_coeffs(cc.mu, cc.tau);
    return detail::rate_closed_nats(m, cc.mu, cc.tau, X);
  });
  r.bits_per_sym = detail::to_double(v) / std::numbers::ln2;
  return r;
}

namespace detail {

inline RateResult validate_against_quadrature(RateResult closed, const SinrModel& m) {
  const RateResult q = rate_quadrature(m);
  closed.residual = std::abs(closed.bits_per_sym - q.bits_per_sym);
  closed.abs_err = q.abs_err;
  if (!(closed.residual <= 1e-4 * std::max(std::abs(q.bits_per_sym), 1e-12))) {
    closed.note = "closed form off by " + std::to_string(closed.residual) + "; quadrature value returned";
    closed.bits_per_sym = q.bits_per_sym;
    closed.fallback = true;
    closed.backend = RateBackend::quadrature;
  }
  return closed;
}

}  // namespace detail

/// General closed form, checked against the quadrature reference.
inline RateResult rate_closed(const SinrModel& m) {
  if (m.alpha2 == 0.0) {
    RateResult z;
    z.backend = RateBackend::closed_form;
    z.residual = 0.0;
    return z;
  }
  RateResult r;
  try {
    r = rate_closed_raw(m);
  } catch (const NumericFailure& e) {
    RateResult q = rate_quadrature(m);
    q.fallback = true;
    q.note = e.what();
    return q;
  }
  return detail::validate_against_quadrature(r, m);
}

inline RateResult rate_closed(const DerivedStats& s, int k) { return rate_closed(make_model(s, k)); }

/// Distinct-spectrum closed form (every multiplicity equal to one), no cross-check.
inline RateResult rate_distinct_raw(const SinrModel& m) {
  RateResult r;
  r.backend = RateBackend::distinct_case;
  if (m.alpha2 == 0.0) return r;
  if (!std::isfinite(m.p_r) || !(m.p_r > 0.0)) throw InvalidArgument("rate_distinct: p_r must be finite and > 0");
  if (!m.y || m.y->degenerate()) throw PreconditionViolation("rate_distinct: aging-error spectrum is empty");
  const CharCoeffs& cc = m.y->coeffs;
  for (int t : cc.tau) {
    if (t != 1) throw PreconditionViolation("rate_distinct: spectrum has repeated values");
  }
  const double loss = detail::closed_form_loss(m, cc.mu, cc.tau, cc.log10_max);
  const BigFloat v = detail::adaptive_precision("rate_distinct", loss, &r.digits,
                                                [&] { return detail::rate_distinct_nats(m, cc.mu); });
  r.bits_per_sym = detail::to_double(v) / std::numbers::ln2;
  return r;
}

inline RateResult rate_distinct(const SinrModel& m) {
  if (m.alpha2 == 0.0) {
    RateResult z;
    z.backend = RateBackend::distinct_case;
    z.residual = 0.0;
    return z;
  }
  if (m.y && !m.y->degenerate()) {
    for (int t : m.y->coeffs.tau) {
      if (t != 1) throw PreconditionViolation("rate_distinct: spectrum has repeated values");
    }
  }
  RateResult r;
  try {
    r = rate_distinct_raw(m);
  } catch (const PrecisionLoss& e) {
    RateResult q = rate_quadrature(m);
    q.fallback = true;
    q.note = e.what();
    return q;
  }
  return detail::validate_against_quadrature(r, m);
}

inline RateResult rate_distinct(const DerivedStats& s, int k) { return rate_distinct(make_model(s, k)); }

inline RateResult rate_quadrature(const DerivedStats& s, int k) { return rate_quadrature(make_model(s, k)); }

/// Jensen lower bound log2(1 + 1/(C + (Tr A + 1/p) / ((N-K) a2 hat_beta))).
inline double rate_lower_bound(const SinrModel& m) {
  if (m.N <= m.K) throw PreconditionViolation("rate_lower_bound: needs N > K");
  if (m.alpha2 == 0.0) return 0.0;
  const double inv_p = std::isinf(m.p_r) ? 0.0 : 1.0 / m.p_r;
  const double tail = (m.trace() + inv_p) / (m.M() * m.alpha2 * m.hat_beta);
  return std::log2(1.0 + 1.0 / (m.C + tail));
}

inline double rate_lower_bound(const DerivedStats& s, int k) { return rate_lower_bound(make_model(s, k)); }

}  // namespace zfaging
