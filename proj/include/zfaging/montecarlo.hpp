#pragma once

// Monte-Carlo SINR oracles:
//   matrix_equiv   draws the estimated channel and the aging error directly
//                  with their second-order statistics and applies the ZF row;
//   full_pipeline  draws true channels, synthesizes MMSE estimates from a
//                  noisy pilot observation, ages the channel one symbol with
//                  the AR(1) model and applies the ZF row;
//   scalar         draws the Erlang and exponential-sum powers directly.
// Every trial owns an RNG substream keyed by (seed, trial), so the sample
// vector does not depend on the worker count.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dist.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "stats.hpp"

namespace zfaging {

enum class McMode { matrix_equiv, full_pipeline, scalar };

inline const char* to_string(McMode m) {
  switch (m) {
    case McMode::matrix_equiv: return "matrix_equiv";
    case McMode::full_pipeline: return "full_pipeline";
    case McMode::scalar: return "scalar";
  }
  return "?";
}

inline McMode parse_mc_mode(const std::string& s) {
  if (s == "matrix_equiv") return McMode::matrix_equiv;
  if (s == "full_pipeline") return McMode::full_pipeline;
  if (s == "scalar") return McMode::scalar;
  throw InvalidArgument("unknown Monte-Carlo mode '" + s + "'");
}

struct TrialPlan {
  std::uint64_t n_trials = 10000;
  std::uint64_t seed = 1;
  McMode mode = McMode::scalar;
  int user = 0;
  unsigned workers = 0;  ///< 0 selects hardware concurrency
};

struct SinrSamples {
  std::vector<double> values;
  McMode mode = McMode::scalar;
  std::uint64_t fingerprint = 0;
  std::uint64_t seed = 0;
};

/// FNV-1a hash over everything that determines the SINR law.
inline std::uint64_t scenario_fingerprint(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int ints[] = {s.topology.L, s.topology.K, s.topology.N, s.topology.T, s.topology.tau,
                      s.fading.reference_cell(), static_cast<int>(s.power.scaling)};
  mix(ints, sizeof ints);
  for (double b : s.fading.values()) mix(&b, sizeof b);
  const double alpha = s.aging.resolve();
  mix(&alpha, sizeof alpha);
  mix(&s.power.level, sizeof s.power.level);
  return h;
}

namespace detail {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

template <class Rng>
void fill_gaussian_column(CMat& m, int col, double variance, Rng& rng, ComplexNormal& cn) {
  for (int r = 0; r < m.rows(); ++r) m(r, col) = cn(rng, variance);
}

/// v with v^H = row k of the pseudo-inverse of G, via Cholesky of the Gram matrix.
inline bool zf_row(const CMat& G, int k, CVec& v) {
  const CMat gram = G.adjoint() * G;
  const Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success) return false;
  CVec e = CVec::Zero(G.cols());
  e(k) = 1.0;
  v = G * llt.solve(e);
  return v.allFinite();
}

/// Instantaneous SINR given the ZF row, the aged estimates alpha*Ghat_li and errors Etilde_li.
struct ZfTerms {
  double signal = 0.0;
  double interference = 0.0;  ///< estimated-channel leakage from all (i, j) != (l, k)
  double aging = 0.0;         ///< sum |v^H e|^2 over all error columns
  double noise = 0.0;         ///< ||v||^2
};

inline double zf_sinr(const ZfTerms& t, double alpha2, double p) {
  const double num = alpha2 * p * t.signal;
  return num / (alpha2 * p * t.interference + p * t.aging + t.noise);
}

class TrialRunner {
 public:
  TrialRunner(const Scenario& sc, const TrialPlan& plan) : plan_(plan), stats_(derive_stats(sc)), topo_(sc.topology) {
    if (plan.user < 0 || plan.user >= stats_.K) throw InvalidArgument("simulate_sinr: user index out of range");
    if (plan.mode != McMode::scalar && topo_.N < topo_.K + 1) {
      throw InvalidArgument("simulate_sinr: matrix modes need N >= K + 1");
    }
    x_ = ErlangDist(stats_.N - stats_.K + 1, stats_.own_hat_beta(plan.user));
    for (double a : stats_.a_diag) {
      if (a > 0.0) components_.push_back(a);
    }
  }

  double run(std::uint64_t trial) const {
    Xoshiro256 rng = trial_stream(plan_.seed, trial);
    if (plan_.mode == McMode::scalar) return scalar(rng);
    double v = 0.0;
    if (matrix(rng, v)) return v;
    Xoshiro256 retry = trial_stream(plan_.seed ^ 0xA5A5A5A5A5A5A5A5ULL, trial);
    if (matrix(retry, v)) return v;
    throw SingularGram("simulate_sinr: Gram matrix singular twice in trial " + std::to_string(trial));
  }

  const DerivedStats& stats() const { return stats_; }

 private:
  double scalar(Xoshiro256& rng) const {
    const int k = plan_.user;
    const double a2 = stats_.alpha2();
    const double p = stats_.p_r;
    const double x = sample_x(x_, rng);
    const double y = sample_exponential_sum(components_, rng);
    const double num = a2 * p * x;
    return num / (num * stats_.C[static_cast<std::size_t>(k)] + p * y + 1.0);
  }

  bool matrix(Xoshiro256& rng, double& out) const {
    const int N = stats_.N;
    const int K = stats_.K;
    const int L = stats_.L;
    const int l = stats_.reference_cell;
    const int k = plan_.user;
    const double a2 = stats_.alpha2();
    ComplexNormal cn;
    std::vector<CMat> ghat(static_cast<std::size_t>(L), CMat(N, K));
    std::vector<CMat> err(static_cast<std::size_t>(L), CMat(N, K));
    if (plan_.mode == McMode::matrix_equiv) {
      CMat& own = ghat[static_cast<std::size_t>(l)];
      for (int j = 0; j < K; ++j) fill_gaussian_column(own, j, stats_.own_hat_beta(j), rng, cn);
      for (int i = 0; i < L; ++i) {
        if (i != l) {
          for (int j = 0; j < K; ++j) ghat[static_cast<std::size_t>(i)].col(j) = own.col(j) * (stats_.beta_at(i, j) / stats_.own_beta(j));
        }
        for (int j = 0; j < K; ++j) {
          fill_gaussian_column(err[static_cast<std::size_t>(i)], j, stats_.a_diag[static_cast<std::size_t>(i * K + j)], rng, cn);
        }
      }
    } else {
      const double inv_ptr = std::isinf(stats_.p_tr) ? 0.0 : 1.0 / stats_.p_tr;
      const double innov = std::max(0.0, 1.0 - a2);
      std::vector<CMat> g(static_cast<std::size_t>(L), CMat(N, K));
      for (int i = 0; i < L; ++i) {
        for (int j = 0; j < K; ++j) fill_gaussian_column(g[static_cast<std::size_t>(i)], j, stats_.beta_at(i, j), rng, cn);
      }
      for (int j = 0; j < K; ++j) {
        // De-spread pilot observation for pilot j and its MMSE estimates.
        CVec obs(N);
        for (int r = 0; r < N; ++r) obs(r) = inv_ptr > 0.0 ? cn(rng, inv_ptr) : std::complex<double>(0.0, 0.0);
        double column = 0.0;
        for (int i = 0; i < L; ++i) {
          obs += g[static_cast<std::size_t>(i)].col(j);
          column += stats_.beta_at(i, j);
        }
        for (int i = 0; i < L; ++i) ghat[static_cast<std::size_t>(i)].col(j) = obs * (stats_.beta_at(i, j) / (column + inv_ptr));
      }
      for (int i = 0; i < L; ++i) {
        for (int j = 0; j < K; ++j) {
          CVec aged(N);
          const double b = stats_.beta_at(i, j);
          for (int r = 0; r < N; ++r) aged(r) = stats_.alpha * g[static_cast<std::size_t>(i)](r, j) + cn(rng, innov * b);
          err[static_cast<std::size_t>(i)].col(j) = aged - stats_.alpha * ghat[static_cast<std::size_t>(i)].col(j);
        }
      }
    }
    CVec v;
    if (!zf_row(ghat[static_cast<std::size_t>(l)], k, v)) return false;
    ZfTerms t;
    t.noise = v.squaredNorm();
    for (int i = 0; i < L; ++i) {
      const Eigen::RowVectorXcd proj = v.adjoint() * ghat[static_cast<std::size_t>(i)];
      const Eigen::RowVectorXcd perr = v.adjoint() * err[static_cast<std::size_t>(i)];
      for (int j = 0; j < K; ++j) {
        const double e2 = std::norm(proj(j));
        if (i == l && j == k) {
          t.signal = e2;
        } else {
          t.interference += e2;
        }
        t.aging += std::norm(perr(j));
      }
    }
    out = zf_sinr(t, a2, stats_.p_r);
    return true;
  }

  TrialPlan plan_;
  DerivedStats stats_;
  CellTopology topo_;
  ErlangDist x_{1, 1.0};
  std::vector<double> components_;
};

/// Runs body(t) for t in [0, n) split into contiguous chunks across workers.
inline void parallel_trials(std::uint64_t n, unsigned workers, const std::function<void(std::uint64_t)>& body) {
  unsigned w = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  w = static_cast<unsigned>(std::min<std::uint64_t>(w, std::max<std::uint64_t>(n, 1)));
  if (w <= 1) {
    for (std::uint64_t t = 0; t < n; ++t) body(t);
    return;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned id = 0; id < w; ++id) {
    const std::uint64_t lo = n * id / w;
    const std::uint64_t hi = n * (id + 1) / w;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::uint64_t t = lo; t < hi; ++t) body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

inline SinrSamples simulate_sinr(const Scenario& sc, const TrialPlan& plan) {
  if (plan.n_trials < 1) throw InvalidArgument("simulate_sinr: need at least one trial");
  const detail::TrialRunner runner(sc, plan);
  SinrSamples out;
  out.mode = plan.mode;
  out.seed = plan.seed;
  out.fingerprint = scenario_fingerprint(sc);
  out.values.assign(plan.n_trials, 0.0);
  detail::parallel_trials(plan.n_trials, plan.workers, [&](std::uint64_t t) { out.values[t] = runner.run(t); });
  return out;
}

/// |sum_{i != l} ||[Ghat_ll^+]_k Ghat_li||^2 - C_k| for one random draw.
inline double interference_identity_check(const Scenario& sc, std::uint64_t seed, int user = 0) {
  const DerivedStats s = derive_stats(sc);
  if (user < 0 || user >= s.K) throw InvalidArgument("interference_identity_check: user index out of range");
  if (s.L == 1) return 0.0;
  Xoshiro256 rng = trial_stream(seed, 0);
  ComplexNormal cn;
  detail::CMat own(s.N, s.K);
  for (int j = 0; j < s.K; ++j) detail::fill_gaussian_column(own, j, s.own_hat_beta(j), rng, cn);
  detail::CVec v;
  if (!detail::zf_row(own, user, v)) throw SingularGram("interference_identity_check: singular Gram matrix");
  double sum = 0.0;
  for (int i = 0; i < s.L; ++i) {
    if (i == s.reference_cell) continue;
    detail::CMat gi = own;
    for (int j = 0; j < s.K; ++j) gi.col(j) *= s.beta_at(i, j) / s.own_beta(j);
    sum += (v.adjoint() * gi).squaredNorm();
  }
  return std::abs(sum - s.C[static_cast<std::size_t>(user)]);
}

/// One-sample KS of ||[Ghat_ll^+]_k||^{-2} against Erlang(N-K+1, hat_beta_llk * tamper).
inline KsResult erlang_structure_check(const Scenario& sc, std::uint64_t n_trials, std::uint64_t seed, int user = 0,
                                       double tamper = 1.0, unsigned workers = 0) {
  const DerivedStats s = derive_stats(sc);
  if (user < 0 || user >= s.K) throw InvalidArgument("erlang_structure_check: user index out of range");
  if (s.N < s.K + 1) throw InvalidArgument("erlang_structure_check: needs N >= K + 1");
  if (n_trials < 1) throw InvalidArgument("erlang_structure_check: need at least one trial");
  std::vector<double> x(n_trials);
  detail::parallel_trials(n_trials, workers, [&](std::uint64_t t) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      Xoshiro256 rng = trial_stream(attempt ? seed ^ 0xA5A5A5A5A5A5A5A5ULL : seed, t);
      ComplexNormal cn;
      detail::CMat own(s.N, s.K);
      for (int j = 0; j < s.K; ++j) detail::fill_gaussian_column(own, j, s.own_hat_beta(j), rng, cn);
      detail::CVec v;
      if (detail::zf_row(own, user, v)) {
        x[t] = 1.0 / v.squaredNorm();
        return;
      }
    }
    throw SingularGram("erlang_structure_check: Gram matrix singular twice");
  });
  const ErlangDist ref(s.N - s.K + 1, s.own_hat_beta(user) * tamper);
  return ks_one_sample(std::move(x), [&](double v) { return erlang_cdf(ref, v); });
}

/// Mean of log2(1 + gamma) and its standard error.
inline Estimate estimate_rate(const std::vector<double>& sinr) {
  if (sinr.empty()) throw InvalidArgument("estimate_rate: empty sample");
  std::vector<double> r(sinr.size());
  std::transform(sinr.begin(), sinr.end(), r.begin(), [](double g) { return std::log2(1.0 + g); });
  return mean_and_se(r);
}
inline Estimate estimate_rate(const SinrSamples& s) { return estimate_rate(s.values); }

/// Fraction of samples at or below gamma_th with its binomial standard error.
inline Estimate estimate_outage(const std::vector<double>& sinr, double gamma_th) {
  if (sinr.empty()) throw InvalidArgument("estimate_outage: empty sample");
  if (!(gamma_th > 0.0)) throw InvalidArgument("estimate_outage: gamma_th must be > 0");
  const double n = static_cast<double>(sinr.size());
  const double hits = static_cast<double>(std::count_if(sinr.begin(), sinr.end(), [&](double g) { return g <= gamma_th; }));
  const double p = hits / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}
inline Estimate estimate_outage(const SinrSamples& s, double gamma_th) { return estimate_outage(s.values, gamma_th); }

}  // namespace zfaging
