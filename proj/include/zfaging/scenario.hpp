#pragma once

// Network, fading, aging and power configuration, plus the deterministic
// statistics every other module consumes (estimation gains, contamination
// constant, aging-error spectrum).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"

namespace zfaging {

inline constexpr double kSpeedOfLight = 299792458.0;

struct CellTopology {
  int L = 1;    ///< cells
  int K = 1;    ///< terminals per cell
  int N = 1;    ///< BS antennas
  int T = 1;    ///< frame length in symbols
  int tau = 1;  ///< pilot length in symbols

  void validate() const {
    if (L < 1 || K < 1 || N < 1 || T < 1 || tau < 1) {
      throw InvalidArgument("topology: L, K, N, T and tau must be positive integers");
    }
    if (N < K) throw InvalidArgument("topology: need N >= K");
    if (tau < K) throw InvalidArgument("topology: orthogonal pilots need tau >= K");
    if (tau > T) throw InvalidArgument("topology: pilot length exceeds the frame length");
  }
};

/// Large-scale gains beta(i, k) seen from the reference cell l.
class FadingProfile {
 public:
  FadingProfile() = default;
  FadingProfile(int L, int K, std::vector<double> beta, int reference_cell = 0)
      : L_(L), K_(K), reference_cell_(reference_cell), beta_(std::move(beta)) {
    validate();
  }

  int cells() const { return L_; }
  int users() const { return K_; }
  int reference_cell() const { return reference_cell_; }
  double operator()(int i, int k) const { return beta_[static_cast<std::size_t>(i * K_ + k)]; }
  const std::vector<double>& values() const { return beta_; }

  void validate() const {
    if (L_ < 1 || K_ < 1) throw InvalidArgument("fading: empty profile");
    if (beta_.size() != static_cast<std::size_t>(L_ * K_)) {
      throw InvalidArgument("fading: beta must have L*K entries");
    }
    if (reference_cell_ < 0 || reference_cell_ >= L_) {
      throw InvalidArgument("fading: reference cell out of range");
    }
    for (double b : beta_) {
      if (!std::isfinite(b) || b < 0.0) throw InvalidArgument("fading: gains must be finite and >= 0");
    }
    for (int k = 0; k < K_; ++k) {
      if (!((*this)(reference_cell_, k) > 0.0)) {
        throw InvalidArgument("fading: own-cell gain must be strictly positive");
      }
    }
  }

 private:
  int L_ = 0;
  int K_ = 0;
  int reference_cell_ = 0;
  std::vector<double> beta_;
};

/// Own-cell gain 1 and uniform interference factor a from every other cell.
inline FadingProfile build_simple_profile(int L, int K, double a, int reference_cell = 0) {
  if (L < 1 || K < 1) throw InvalidArgument("build_simple_profile: counts must be positive");
  if (!(a >= 0.0 && a < 1.0)) throw InvalidArgument("build_simple_profile: need 0 <= a < 1");
  std::vector<double> beta(static_cast<std::size_t>(L * K), a);
  for (int k = 0; k < K; ++k) beta[static_cast<std::size_t>(reference_cell * K + k)] = 1.0;
  return FadingProfile(L, K, std::move(beta), reference_cell);
}

/// Jakes temporal correlation J0(2 pi f_D T_s).
inline double temporal_correlation(double doppler_hz, double sampling_period_s) {
  if (!(doppler_hz >= 0.0)) throw InvalidArgument("temporal_correlation: Doppler must be >= 0");
  if (!(sampling_period_s > 0.0)) throw InvalidArgument("temporal_correlation: T_s must be > 0");
  return specfun::bessel_j0(2.0 * std::numbers::pi * doppler_hz * sampling_period_s).value;
}

struct Mobility {
  double speed_mps = 0.0;
  double carrier_hz = 0.0;
  double sampling_period_s = 0.0;

  double doppler_hz() const { return speed_mps * carrier_hz / kSpeedOfLight; }
};

struct AgingSpec {
  std::optional<double> alpha;
  std::optional<Mobility> mobility;

  static AgingSpec direct(double a) { return AgingSpec{a, std::nullopt}; }
  static AgingSpec from_mobility(Mobility m) { return AgingSpec{std::nullopt, m}; }

  /// The direct value wins when both are present; `warn` receives a note if they disagree.
  double resolve(const std::function<void(const std::string&)>& warn = {}) const {
    std::optional<double> from_motion;
    if (mobility) {
      if (!(mobility->speed_mps >= 0.0) || !(mobility->carrier_hz >= 0.0)) {
        throw InvalidArgument("aging: speed and carrier must be nonnegative");
      }
      from_motion = temporal_correlation(mobility->doppler_hz(), mobility->sampling_period_s);
    }
    if (alpha) {
      if (!(std::abs(*alpha) <= 1.0)) throw InvalidArgument("aging: need |alpha| <= 1");
      if (from_motion && std::abs(*from_motion - *alpha) > 1e-12 && warn) {
        warn("aging: direct alpha " + std::to_string(*alpha) + " overrides mobility-derived " +
             std::to_string(*from_motion));
      }
      return *alpha;
    }
    if (from_motion) return *from_motion;
    throw InvalidArgument("aging: neither alpha nor a mobility triple given");
  }
};

enum class PowerScaling { fixed, inverse_sqrt_n };

struct PowerSpec {
  /// p_r for fixed scaling, E for inverse_sqrt_n (p_r = E / sqrt(N)).
  double level = 1.0;
  PowerScaling scaling = PowerScaling::fixed;

  static PowerSpec fixed_snr(double p_r) { return {p_r, PowerScaling::fixed}; }
  static PowerSpec fixed_db(double snr_db) { return {std::pow(10.0, snr_db / 10.0), PowerScaling::fixed}; }

  double p_r(int N) const {
    if (!(level > 0.0)) throw InvalidArgument("power: transmit SNR must be > 0");
    return scaling == PowerScaling::fixed ? level : level / std::sqrt(static_cast<double>(N));
  }
  double p_tr(int tau, int N) const { return tau * p_r(N); }
};

struct Scenario {
  CellTopology topology;
  FadingProfile fading;
  AgingSpec aging;
  PowerSpec power;

  void validate() const {
    topology.validate();
    fading.validate();
    if (fading.cells() != topology.L || fading.users() != topology.K) {
      throw InvalidArgument("scenario: fading profile dimensions do not match the topology");
    }
  }

  Scenario with_snr(double p_r) const {
    Scenario s = *this;
    s.power = PowerSpec::fixed_snr(p_r);
    return s;
  }
  Scenario with_alpha(double a) const {
    Scenario s = *this;
    s.aging = AgingSpec::direct(a);
    return s;
  }
  Scenario with_antennas(int n) const {
    Scenario s = *this;
    s.topology.N = n;
    return s;
  }
};

/// Distinct values (strictly decreasing) with multiplicities.
struct Spectrum {
  std::vector<double> mu;
  std::vector<int> multiplicity;

  int total() const {
    int s = 0;
    for (int m : multiplicity) s += m;
    return s;
  }
};

struct DerivedStats {
  int L = 0;
  int K = 0;
  int N = 0;
  int reference_cell = 0;
  double alpha = 1.0;
  double p_r = 1.0;
  double p_tr = 1.0;
  std::vector<double> beta;       ///< (i, k) row-major, copied from the profile
  std::vector<double> hat_beta;   ///< (i, k) row-major
  std::vector<double> C;          ///< contamination constant per user
  std::vector<double> a_diag;     ///< KL aging-error variances, index i*K + k
  double trace_A = 0.0;
  Spectrum spectrum;

  double beta_at(int i, int k) const { return beta[static_cast<std::size_t>(i * K + k)]; }
  double hat_beta_at(int i, int k) const { return hat_beta[static_cast<std::size_t>(i * K + k)]; }
  double own_hat_beta(int k) const { return hat_beta_at(reference_cell, k); }
  double own_beta(int k) const { return beta_at(reference_cell, k); }
  double alpha2() const { return alpha * alpha; }
};

inline bool spectrum_equal(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

/// Groups a multiset into distinct values, strictly decreasing.
inline Spectrum group_spectrum(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  Spectrum s;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i + 1;
    double acc = values[i];
    while (j < values.size() && spectrum_equal(values[i], values[j])) acc += values[j++];
    s.mu.push_back(acc / static_cast<double>(j - i));
    s.multiplicity.push_back(static_cast<int>(j - i));
    i = j;
  }
  return s;
}

inline DerivedStats derive_stats(const CellTopology& topo, const FadingProfile& fading,
                                 const AgingSpec& aging, const PowerSpec& power) {
  topo.validate();
  fading.validate();
  if (fading.cells() != topo.L || fading.users() != topo.K) {
    throw InvalidArgument("derive_stats: fading profile dimensions do not match the topology");
  }
  DerivedStats d;
  d.L = topo.L;
  d.K = topo.K;
  d.N = topo.N;
  d.reference_cell = fading.reference_cell();
  d.alpha = aging.resolve();
  d.p_r = power.p_r(topo.N);
  d.p_tr = topo.tau * d.p_r;
  d.beta = fading.values();

  const int l = d.reference_cell;
  const double inv_ptr = std::isinf(d.p_tr) ? 0.0 : 1.0 / d.p_tr;
  d.hat_beta.resize(d.beta.size());
  for (int k = 0; k < d.K; ++k) {
    double column = 0.0;
    for (int j = 0; j < d.L; ++j) column += fading(j, k);
    for (int i = 0; i < d.L; ++i) {
      const double b = fading(i, k);
      d.hat_beta[static_cast<std::size_t>(i * d.K + k)] = b * b / (column + inv_ptr);
    }
  }

  d.C.assign(static_cast<std::size_t>(d.K), 0.0);
  for (int k = 0; k < d.K; ++k) {
    for (int i = 0; i < d.L; ++i) {
      if (i == l) continue;
      const double r = fading(i, k) / fading(l, k);
      d.C[static_cast<std::size_t>(k)] += r * r;
    }
  }

  const double a2 = d.alpha2();
  d.a_diag.resize(d.beta.size());
  for (std::size_t j = 0; j < d.beta.size(); ++j) {
    double v = d.beta[j] - a2 * d.hat_beta[j];
    if (v < 0.0) {
      if (v < -1e-12) throw DegenerateSpectrum("derive_stats: negative aging-error variance");
      v = 0.0;
    }
    d.a_diag[j] = v;
    d.trace_A += v;
  }
  d.spectrum = group_spectrum(d.a_diag);
  return d;
}

inline DerivedStats derive_stats(const Scenario& s) {
  s.validate();
  return derive_stats(s.topology, s.fading, s.aging, s.power);
}

/// The simulation setup used throughout the numerical results: 7 cells, 10
/// terminals, T = 200, tau = K, a = 0.1.
inline Scenario reference_scenario(int N = 100, double alpha = 0.9, double p_r = 1.0) {
  Scenario s;
  s.topology = CellTopology{7, 10, N, 200, 10};
  s.fading = build_simple_profile(7, 10, 0.1);
  s.aging = AgingSpec::direct(alpha);
  s.power = PowerSpec::fixed_snr(p_r);
  return s;
}

}  // namespace zfaging
