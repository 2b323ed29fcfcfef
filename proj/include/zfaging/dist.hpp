#pragma once

// Distributions behind the SINR decomposition: the desired-signal power X is
// Erlang, the aging-interference power Y is a sum of independent exponentials
// whose density is a gamma mixture with characteristic coefficients X_{p,q}.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "errors.hpp"
#include "precision.hpp"
#include "scenario.hpp"
#include "specfun.hpp"

namespace zfaging {

struct ErlangDist {
  int shape = 1;
  double scale = 1.0;

  ErlangDist() = default;
  ErlangDist(int shape_, double scale_) : shape(shape_), scale(scale_) {
    if (shape < 1) throw InvalidArgument("ErlangDist: shape must be >= 1");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("ErlangDist: scale must be > 0");
  }

  double mean() const { return shape * scale; }

  /// E[X^j] = Gamma(shape + j) / Gamma(shape) * scale^j.
  double moment(int j) const {
    double m = 1.0;
    for (int i = 0; i < j; ++i) m *= (shape + i) * scale;
    return m;
  }
};

inline double erlang_pdf(const ErlangDist& d, double x) {
  if (!(x >= 0.0)) throw DomainError("erlang_pdf: x must be >= 0");
  if (x == 0.0) return d.shape == 1 ? 1.0 / d.scale : 0.0;
  const double z = x / d.scale;
  return std::exp((d.shape - 1) * std::log(z) - z - std::lgamma(d.shape)) / d.scale;
}

/// 1 - e^{-x/scale} sum_{t<shape} (x/scale)^t / t!
inline double erlang_cdf(const ErlangDist& d, double x) {
  if (!(x >= 0.0)) throw DomainError("erlang_cdf: x must be >= 0");
  return specfun::gamma_lower_reg_int(d.shape, x / d.scale).value;
}

/// Partial-fraction weights of prod_p (1 - mu_p s)^{-tau_p}, kept in extended
/// precision; at clustered spectra they are many orders of magnitude larger
/// than the density they describe.
struct CharCoeffs {
  std::vector<double> mu;
  std::vector<int> tau;
  std::vector<std::vector<BigFloat>> X;  ///< X[p][q-1]
  unsigned digits = 0;
  double log10_max = 0.0;                ///< log10 max |X_{p,q}|

  int components() const { return std::accumulate(tau.begin(), tau.end(), 0); }
  bool empty() const { return mu.empty(); }
  double coeff(std::size_t p, int q) const { return detail::to_double(X[p][static_cast<std::size_t>(q - 1)]); }
};

namespace detail {

// X_{p,q} = [u^{tau_p - q}] prod_{r != p} (c_r + d_r u)^{-tau_r}, with
// c_r = 1 - mu_r/mu_p and d_r = mu_r/mu_p. The series is the exponential of
// the log series, generated by j g_j = sum_k k L_k g_{j-k}.
inline std::vector<std::vector<BigFloat>> residue_coeffs(const std::vector<double>& mu,
                                                         const std::vector<int>& tau) {
  const std::size_t P = mu.size();
  std::vector<std::vector<BigFloat>> X(P);
  for (std::size_t p = 0; p < P; ++p) {
    const int m = tau[p];
    BigFloat g0 = 1;
    std::vector<BigFloat> L(static_cast<std::size_t>(m), BigFloat(0));
    const BigFloat mp(mu[p]);
    for (std::size_t r = 0; r < P; ++r) {
      if (r == p) continue;
      const BigFloat mr(mu[r]);
      const BigFloat c = (mp - mr) / mp;
      const BigFloat rho = mr / (mp - mr);
      g0 *= pow(c, -tau[r]);
      BigFloat rk = 1;
      for (int k = 1; k < m; ++k) {
        rk *= rho;
        // -tau_r * (-1)^{k+1} rho^k / k
        const BigFloat term = rk * tau[r] / k;
        L[static_cast<std::size_t>(k)] += (k % 2 == 1) ? -term : term;
      }
    }
    std::vector<BigFloat> g(static_cast<std::size_t>(m), BigFloat(0));
    g[0] = g0;
    for (int j = 1; j < m; ++j) {
      BigFloat acc = 0;
      for (int k = 1; k <= j; ++k) acc += k * L[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(j - k)];
      g[static_cast<std::size_t>(j)] = acc / j;
    }
    X[p].resize(static_cast<std::size_t>(m));
    for (int q = 1; q <= m; ++q) X[p][static_cast<std::size_t>(q - 1)] = g[static_cast<std::size_t>(m - q)];
  }
  return X;
}

// Rough log10 bound on the coefficient sizes, used to pick the working precision.
inline double coeff_magnitude_bound(const std::vector<double>& mu, const std::vector<int>& tau) {
  double worst = 0.0;
  for (std::size_t p = 0; p < mu.size(); ++p) {
    double b = 0.0;
    for (std::size_t r = 0; r < mu.size(); ++r) {
      if (r == p) continue;
      const double c = std::abs(1.0 - mu[r] / mu[p]);
      const double rho = mu[r] / std::abs(mu[p] - mu[r]);
      b += tau[r] * (std::log10(1.0 / c) + std::log10(1.0 + rho));
    }
    b += std::lgamma(std::accumulate(tau.begin(), tau.end(), 0) + 1.0) / std::numbers::ln10;
    worst = std::max(worst, b);
  }
  return worst;
}

inline BigFloat mgf_product(const CharCoeffs& c, const BigFloat& s) {
  BigFloat prod = 1;
  for (std::size_t p = 0; p < c.mu.size(); ++p) prod *= pow(1 - BigFloat(c.mu[p]) * s, -c.tau[p]);
  return prod;
}

inline BigFloat mgf_mixture(const CharCoeffs& c, const BigFloat& s) {
  BigFloat sum = 0;
  for (std::size_t p = 0; p < c.mu.size(); ++p) {
    const BigFloat inv = 1 / (1 - BigFloat(c.mu[p]) * s);
    BigFloat w = 1;
    for (int q = 1; q <= c.tau[p]; ++q) {
      w *= inv;
      sum += c.X[p][static_cast<std::size_t>(q - 1)] * w;
    }
  }
  return sum;
}

}  // namespace detail

/// Relative MGF-reconstruction residual at s (requires 1 - mu_p s > 0 for all p).
inline double mgf_residual(const CharCoeffs& c, double s) {
  for (double m : c.mu) {
    if (!(1.0 - m * s > 0.0)) throw DomainError("mgf_residual: s outside the MGF domain");
  }
  PrecisionScope scope(c.digits);
  const BigFloat S(s);
  const BigFloat exact = detail::mgf_product(c, S);
  const BigFloat mix = detail::mgf_mixture(c, S);
  return detail::to_double(abs(mix - exact) / abs(exact));
}

/// Characteristic coefficients for a spectrum of distinct positive values.
inline CharCoeffs char_coeffs(const Spectrum& spectrum) {
  CharCoeffs c;
  for (std::size_t p = 0; p < spectrum.mu.size(); ++p) {
    if (spectrum.mu[p] > 0.0) {
      c.mu.push_back(spectrum.mu[p]);
      c.tau.push_back(spectrum.multiplicity[p]);
    }
  }
  if (c.mu.empty()) throw InvalidArgument("char_coeffs: no positive entries");
  for (std::size_t p = 1; p < c.mu.size(); ++p) {
    if (!(c.mu[p] < c.mu[p - 1])) throw InvalidArgument("char_coeffs: values must be strictly decreasing");
  }
  const double bound = detail::coeff_magnitude_bound(c.mu, c.tau);
  unsigned digits = static_cast<unsigned>(40.0 + 2.0 * bound);
  const double mu_max = c.mu.front();
  const double probes[] = {-1.0, -1.0 / mu_max, -10.0 / mu_max, 0.5 / mu_max};
  for (;;) {
    {
      PrecisionScope scope(digits);
      c.X = detail::residue_coeffs(c.mu, c.tau);
    }
    c.digits = digits;
    double worst = 0.0;
    for (double s : probes) worst = std::max(worst, mgf_residual(c, s));
    if (worst <= 1e-15) break;
    if (digits > 20000) {
      if (worst > 1e-6) {
        throw NumericFailure("char_coeffs: MGF reconstruction residual " + std::to_string(worst) +
                             "; spectrum too clustered, widen the grouping tolerance");
      }
      break;
    }
    digits *= 2;
  }
  PrecisionScope scope(c.digits);
  BigFloat top = 0;
  for (const auto& row : c.X) {
    for (const auto& x : row) top = std::max(top, BigFloat(abs(x)));
  }
  c.log10_max = top > 0 ? detail::to_double(log10(top)) : 0.0;
  return c;
}

/// Characteristic coefficients of an arbitrary multiset (zeros are dropped).
inline CharCoeffs char_coeffs(const std::vector<double>& diag) {
  if (diag.empty()) throw InvalidArgument("char_coeffs: empty input");
  std::vector<double> positive;
  for (double v : diag) {
    if (v < 0.0 || !std::isfinite(v)) throw InvalidArgument("char_coeffs: entries must be finite and >= 0");
    if (v > 0.0) positive.push_back(v);
  }
  return char_coeffs(group_spectrum(positive));
}

/// Law of the aging-interference power: a sum of independent exponentials
/// with means `components`. An empty component list is the point mass at 0.
struct YDist {
  CharCoeffs coeffs;
  double trace = 0.0;
  std::vector<double> components;

  YDist() = default;
  explicit YDist(const std::vector<double>& diag) {
    for (double v : diag) {
      if (v < 0.0 || !std::isfinite(v)) throw InvalidArgument("YDist: entries must be finite and >= 0");
      if (v > 0.0) components.push_back(v);
      trace += v;
    }
    if (!components.empty()) coeffs = char_coeffs(group_spectrum(components));
  }

  bool degenerate() const { return components.empty(); }
};

inline YDist make_ydist(const DerivedStats& s) { return YDist(s.a_diag); }

inline double y_pdf(const YDist& d, double y) {
  if (!(y >= 0.0)) throw DomainError("y_pdf: y must be >= 0");
  if (d.degenerate()) throw DomainError("y_pdf: Y is a point mass at 0");
  const CharCoeffs& c = d.coeffs;
  PrecisionScope scope(c.digits);
  const BigFloat Y(y);
  BigFloat sum = 0;
  for (std::size_t p = 0; p < c.mu.size(); ++p) {
    const BigFloat z = Y / c.mu[p];
    BigFloat inner = 0;
    BigFloat t = 1;  // z^{q-1} / (q-1)!
    for (int q = 1; q <= c.tau[p]; ++q) {
      if (q > 1) t *= z / (q - 1);
      inner += c.X[p][static_cast<std::size_t>(q - 1)] * t;
    }
    sum += inner * exp(-z) / c.mu[p];
  }
  return std::max(0.0, detail::to_double(sum));
}

/// sum_p sum_q X_{p,q} P(q, y/mu_p), written as 1 - sum_p e^{-z} sum_q X_{p,q} e_{q-1}(z).
inline double y_cdf(const YDist& d, double y) {
  if (!(y >= 0.0)) throw DomainError("y_cdf: y must be >= 0");
  if (d.degenerate()) return 1.0;
  if (y == 0.0) return 0.0;
  const CharCoeffs& c = d.coeffs;
  PrecisionScope scope(c.digits);
  const BigFloat Y(y);
  BigFloat tail = 0;
  for (std::size_t p = 0; p < c.mu.size(); ++p) {
    const BigFloat z = Y / c.mu[p];
    BigFloat term = 1;
    BigFloat partial = 0;  // e_{q-1}(z)
    BigFloat inner = 0;
    for (int q = 1; q <= c.tau[p]; ++q) {
      if (q > 1) term *= z / (q - 1);
      partial += term;
      inner += c.X[p][static_cast<std::size_t>(q - 1)] * partial;
    }
    tail += inner * exp(-z);
  }
  return std::clamp(detail::to_double(1 - tail), 0.0, 1.0);
}

inline double y_mean(const YDist& d) { return d.trace; }

/// sum_p sum_q X_{p,q} q mu_p, which must reproduce the trace.
inline double y_mean_from_coeffs(const YDist& d) {
  if (d.degenerate()) return 0.0;
  const CharCoeffs& c = d.coeffs;
  PrecisionScope scope(c.digits);
  BigFloat sum = 0;
  for (std::size_t p = 0; p < c.mu.size(); ++p) {
    for (int q = 1; q <= c.tau[p]; ++q) sum += c.X[p][static_cast<std::size_t>(q - 1)] * q * c.mu[p];
  }
  return detail::to_double(sum);
}

template <class Rng>
double sample_x(const ErlangDist& d, Rng& rng) {
  std::gamma_distribution<double> g(d.shape, d.scale);
  return g(rng);
}

/// Sum of independent exponentials with the given means.
template <class Rng>
double sample_exponential_sum(const std::vector<double>& means, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  double y = 0.0;
  for (double m : means) y += m * e(rng);
  return y;
}

template <class Rng>
double sample_y(const YDist& d, Rng& rng) {
  return sample_exponential_sum(d.components, rng);
}

}  // namespace zfaging
