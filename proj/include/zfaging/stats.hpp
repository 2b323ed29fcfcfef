#pragma once

// Kolmogorov-Smirnov statistics and summary estimators for Monte-Carlo output.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace zfaging {

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
inline double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double t = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 2.0 : -2.0) * t;
    if (t < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// c(0.01) in the large-sample critical value c / sqrt(n_eff).
inline constexpr double kKsCoefficient1Pct = 1.6276;

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double critical_1pct = 0.0;
  double n_eff = 0.0;

  bool passes_1pct() const { return statistic <= critical_1pct; }
};

inline KsResult ks_finish(double d, double n_eff) {
  KsResult r;
  r.statistic = d;
  r.n_eff = n_eff;
  const double sn = std::sqrt(n_eff);
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  r.critical_1pct = kKsCoefficient1Pct / sn;
  return r;
}

/// One-sample KS distance of `samples` against a continuous CDF.
inline KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_one_sample: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return ks_finish(d, n);
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return ks_finish(d, na * nb / (na + nb));
}

/// Point value and standard error.
struct Estimate {
  double value = 0.0;
  double std_err = 0.0;
};

inline Estimate mean_and_se(const std::vector<double>& v) {
  if (v.empty()) throw InvalidArgument("mean_and_se: empty input");
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace zfaging
