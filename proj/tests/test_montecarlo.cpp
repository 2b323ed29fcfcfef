#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include <zfaging/montecarlo.hpp>
#include <zfaging/rate.hpp>

using namespace zfaging;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Scenario small_scenario(double alpha = 0.9) {
  Scenario s;
  s.topology = CellTopology{3, 4, 12, 50, 4};
  s.fading = build_simple_profile(3, 4, 0.2);
  s.aging = AgingSpec::direct(alpha);
  s.power = PowerSpec::fixed_snr(2.0);
  return s;
}

SinrSamples run(const Scenario& sc, McMode mode, std::uint64_t n, std::uint64_t seed, unsigned workers = 1, int user = 0) {
  TrialPlan plan;
  plan.n_trials = n;
  plan.seed = seed;
  plan.mode = mode;
  plan.user = user;
  plan.workers = workers;
  return simulate_sinr(sc, plan);
}

}  // namespace

TEST_CASE("samples do not depend on the worker count") {
  const Scenario sc = small_scenario();
  for (McMode mode : {McMode::scalar, McMode::matrix_equiv, McMode::full_pipeline}) {
    const SinrSamples one = run(sc, mode, 600, 9, 1);
    const SinrSamples four = run(sc, mode, 600, 9, 4);
    CAPTURE(to_string(mode));
    CHECK(one.values == four.values);
    CHECK(one.fingerprint == four.fingerprint);
    CHECK(run(sc, mode, 600, 10, 1).values != one.values);
  }
}

TEST_CASE("scenario fingerprint tracks the SINR law") {
  const Scenario sc = small_scenario();
  CHECK(scenario_fingerprint(sc) == scenario_fingerprint(small_scenario()));
  CHECK(scenario_fingerprint(sc) != scenario_fingerprint(sc.with_alpha(0.8)));
  CHECK(scenario_fingerprint(sc) != scenario_fingerprint(sc.with_snr(3.0)));
  CHECK(scenario_fingerprint(sc) != scenario_fingerprint(sc.with_antennas(13)));
}

TEST_CASE("every sample lies below the contamination ceiling") {
  const Scenario sc = small_scenario(1.0);
  const double ceiling = 1.0 / derive_stats(sc).C[0];
  for (McMode mode : {McMode::scalar, McMode::matrix_equiv, McMode::full_pipeline}) {
    const SinrSamples s = run(sc, mode, 2000, 3);
    CAPTURE(to_string(mode));
    CHECK(*std::max_element(s.values.begin(), s.values.end()) < ceiling);
    CHECK(*std::min_element(s.values.begin(), s.values.end()) > 0.0);
  }
}

TEST_CASE("fully decorrelated channel gives zero SINR in every mode") {
  const Scenario sc = small_scenario(0.0);
  for (McMode mode : {McMode::scalar, McMode::matrix_equiv, McMode::full_pipeline}) {
    const SinrSamples s = run(sc, mode, 200, 5);
    for (double v : s.values) CHECK(v == 0.0);
  }
}

TEST_CASE("the three simulation modes draw the same SINR law at 1e4 samples") {
  const Scenario sc = reference_scenario();
  const SinrSamples scalar = run(sc, McMode::scalar, 10000, 21);
  const SinrSamples matrix = run(sc, McMode::matrix_equiv, 10000, 22);
  const SinrSamples full = run(sc, McMode::full_pipeline, 10000, 23);
  const KsResult sm = ks_two_sample(scalar.values, matrix.values);
  const KsResult sf = ks_two_sample(scalar.values, full.values);
  const KsResult mf = ks_two_sample(matrix.values, full.values);
  CAPTURE(sm.statistic, sf.statistic, mf.statistic, sm.critical_1pct);
  CHECK(sm.passes_1pct());
  CHECK(sf.passes_1pct());
  CHECK(mf.passes_1pct());
  const double exact = rate_quadrature(derive_stats(sc), 0).bits_per_sym;
  for (const SinrSamples* s : {&scalar, &matrix, &full}) {
    const Estimate e = estimate_rate(*s);
    CHECK(std::abs(e.value - exact) <= 4.0 * e.std_err);
  }
}

TEST_CASE("matrix and scalar modes agree on a strongly contaminated layout") {
  const Scenario sc = small_scenario();
  const KsResult r = ks_two_sample(run(sc, McMode::scalar, 50000, 41).values, run(sc, McMode::matrix_equiv, 50000, 42).values);
  CAPTURE(r.statistic, r.critical_1pct);
  CHECK(r.passes_1pct());
}

// Estimation errors of cells sharing a pilot are correlated, with covariance
// diag(beta) - alpha^2 beta beta^T / (sum beta + 1/p_tr) per pilot. The
// aging power is then a sum of exponentials with the eigenvalues of those
// blocks as means, not the diagonal entries.
TEST_CASE("full pipeline follows the correlated-error law") {
  Scenario sc;
  sc.topology = CellTopology{2, 4, 12, 50, 4};
  sc.fading = build_simple_profile(2, 4, 0.5);
  sc.aging = AgingSpec::direct(0.9);
  sc.power = PowerSpec::fixed_snr(5.0);
  const DerivedStats d = derive_stats(sc);

  std::vector<double> eig;
  for (int j = 0; j < d.K; ++j) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d.L, d.L);
    double column = 1.0 / d.p_tr;
    for (int i = 0; i < d.L; ++i) column += d.beta_at(i, j);
    for (int i = 0; i < d.L; ++i) {
      for (int h = 0; h < d.L; ++h) cov(i, h) = (i == h ? d.beta_at(i, j) : 0.0) - d.alpha2() * d.beta_at(i, j) * d.beta_at(h, j) / column;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    for (int i = 0; i < d.L; ++i) eig.push_back(es.eigenvalues()(i));
  }
  const ErlangDist X(d.N - d.K + 1, d.own_hat_beta(0));
  const std::uint64_t n = 100000;
  std::vector<double> correlated(n);
  for (std::uint64_t t = 0; t < n; ++t) {
    Xoshiro256 rng = trial_stream(99, t);
    const double x = sample_x(X, rng);
    const double y = sample_exponential_sum(eig, rng);
    const double num = d.alpha2() * d.p_r * x;
    correlated[t] = num / (num * d.C[0] + d.p_r * y + 1.0);
  }
  const SinrSamples full = run(sc, McMode::full_pipeline, n, 98);
  const KsResult match = ks_two_sample(correlated, full.values);
  CAPTURE(match.statistic, match.critical_1pct);
  CHECK(match.passes_1pct());
  // The diagonal (independent-error) model is resolvable from the same sample size.
  const KsResult diag = ks_two_sample(run(sc, McMode::scalar, n, 97).values, full.values);
  CAPTURE(diag.statistic, diag.p_value);
  CHECK_FALSE(diag.passes_1pct());
}

TEST_CASE("contamination leakage through the ZF row equals the constant C") {
  const Scenario sc = small_scenario();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) CHECK(interference_identity_check(sc, seed, static_cast<int>(seed % 4)) <= 1e-9);
  Scenario single = sc;
  single.topology.L = 1;
  single.fading = build_simple_profile(1, 4, 0.2);
  CHECK(interference_identity_check(single, 1) == 0.0);
  CHECK_THROWS_AS(interference_identity_check(sc, 1, 4), InvalidArgument);
}

TEST_CASE("inverse ZF row norm follows the Erlang law") {
  const Scenario sc = small_scenario();
  const KsResult ok = erlang_structure_check(sc, 20000, 4);
  CAPTURE(ok.statistic, ok.critical_1pct, ok.p_value);
  CHECK(ok.passes_1pct());
  CHECK_THAT(ok.critical_1pct, WithinRel(1.6276 / std::sqrt(20000.0), 1e-12));

  const KsResult tampered = erlang_structure_check(sc, 20000, 4, 0, 1.05);
  CHECK_FALSE(tampered.passes_1pct());

  // N = K + 1: the smallest array with a full-rank ZF filter; X is exponential.
  const Scenario edge = sc.with_antennas(5);
  CHECK(erlang_structure_check(edge, 20000, 6).passes_1pct());
  CHECK_THROWS_AS(erlang_structure_check(sc.with_antennas(4), 100, 1), InvalidArgument);
  CHECK_THROWS_AS(run(sc.with_antennas(4), McMode::matrix_equiv, 10, 1), InvalidArgument);
  CHECK_NOTHROW(run(sc.with_antennas(4), McMode::scalar, 10, 1));
}

TEST_CASE("rate and outage estimators") {
  const Estimate trivial = estimate_rate(std::vector<double>{1.0, 1.0, 3.0, 3.0});
  CHECK_THAT(trivial.value, WithinRel(1.5, 1e-15));
  CHECK_THAT(trivial.std_err, WithinRel(std::sqrt(1.0 / 3.0) / 2.0, 1e-14));

  const Scenario sc = small_scenario();
  const Estimate small = estimate_rate(run(sc, McMode::scalar, 1000, 31));
  const Estimate big = estimate_rate(run(sc, McMode::scalar, 100000, 31));
  const double ratio = small.std_err / big.std_err;
  CAPTURE(ratio);
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 12.5);

  const Estimate o = estimate_outage(std::vector<double>{0.5, 1.0, 1.5, 2.0}, 1.0);
  CHECK(o.value == 0.5);
  CHECK_THAT(o.std_err, WithinRel(0.25, 1e-15));

  CHECK_THROWS_AS(estimate_rate(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(estimate_outage(std::vector<double>{}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(estimate_outage(std::vector<double>{1.0}, 0.0), InvalidArgument);
  TrialPlan none;
  none.n_trials = 0;
  CHECK_THROWS_AS(simulate_sinr(sc, none), InvalidArgument);
  CHECK_THROWS_AS(parse_mc_mode("bogus"), InvalidArgument);
  CHECK(parse_mc_mode("full_pipeline") == McMode::full_pipeline);
}
