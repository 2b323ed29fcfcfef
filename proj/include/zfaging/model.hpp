#pragma once

// Per-user view of the SINR decomposition
//   gamma = a2 p X / (a2 p C X + p Y + 1),  X ~ Erlang(N-K+1, hat_beta),
// shared by the analytic evaluators, the quadrature oracle and the scalar
// Monte-Carlo mode.

#include <memory>

#include "dist.hpp"
#include "scenario.hpp"

namespace zfaging {

struct SinrModel {
  int N = 0;
  int K = 0;
  double alpha2 = 1.0;
  double hat_beta = 1.0;  ///< own-cell estimate variance
  double C = 0.0;
  double p_r = 1.0;
  std::shared_ptr<const YDist> y;

  int M() const { return N - K; }
  ErlangDist x() const { return ErlangDist(N - K + 1, hat_beta); }
  double trace() const { return y ? y->trace : 0.0; }

  /// Same distributions, different transmit SNR in the SINR expression only.
  SinrModel with_power(double p) const {
    SinrModel m = *this;
    m.p_r = p;
    return m;
  }

  double sinr(double x, double yv) const {
    const double num = alpha2 * p_r * x;
    return num / (num * C + p_r * yv + 1.0);
  }
};

inline SinrModel make_model(const DerivedStats& s, int k, std::shared_ptr<const YDist> y = nullptr) {
  if (k < 0 || k >= s.K) throw InvalidArgument("user index out of range");
  SinrModel m;
  m.N = s.N;
  m.K = s.K;
  m.alpha2 = s.alpha2();
  m.hat_beta = s.own_hat_beta(k);
  m.C = s.C[static_cast<std::size_t>(k)];
  m.p_r = s.p_r;
  m.y = y ? std::move(y) : std::make_shared<const YDist>(make_ydist(s));
  return m;
}

/// Users sharing (hat_beta_llk, C_k) have identical SINR laws; returns, for
/// each user, the index of the first user with the same law.
inline std::vector<int> user_classes(const DerivedStats& s) {
  std::vector<int> cls(static_cast<std::size_t>(s.K));
  for (int k = 0; k < s.K; ++k) {
    cls[static_cast<std::size_t>(k)] = k;
    for (int j = 0; j < k; ++j) {
      if (s.own_hat_beta(j) == s.own_hat_beta(k) && s.C[static_cast<std::size_t>(j)] == s.C[static_cast<std::size_t>(k)]) {
        cls[static_cast<std::size_t>(k)] = j;
        break;
      }
    }
  }
  return cls;
}

}  // namespace zfaging
