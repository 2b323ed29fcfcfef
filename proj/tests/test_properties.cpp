#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <zfaging/analytic.hpp>
#include <zfaging/montecarlo.hpp>

using namespace zfaging;
using Catch::Matchers::WithinRel;

namespace {

// Random small multi-cell layouts with distinct gains.
Scenario random_scenario(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> cells(2, 4);
  std::uniform_int_distribution<int> users(1, 4);
  std::uniform_real_distribution<double> cross(0.02, 0.5);
  std::uniform_real_distribution<double> own(0.5, 1.5);
  std::uniform_real_distribution<double> alpha(0.3, 1.0);
  const int L = cells(gen);
  const int K = users(gen);
  std::uniform_int_distribution<int> extra(1, 30);
  std::vector<double> beta(static_cast<std::size_t>(L * K));
  for (int i = 0; i < L; ++i) {
    for (int k = 0; k < K; ++k) beta[static_cast<std::size_t>(i * K + k)] = i == 0 ? own(gen) : cross(gen);
  }
  Scenario s;
  s.topology = CellTopology{L, K, K + extra(gen), 100, K};
  s.fading = FadingProfile(L, K, beta);
  s.aging = AgingSpec::direct(alpha(gen));
  s.power = PowerSpec::fixed_snr(1.0);
  return s;
}

}  // namespace

TEST_CASE("no backend exceeds the contamination ceiling") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const Scenario base = random_scenario(gen);
    for (double p : {1e-2, 1.0, 1e2, 1e4, 1e6}) {
      const DerivedStats s = derive_stats(base.with_snr(p));
      for (int k = 0; k < s.K; ++k) {
        const SinrModel m = make_model(s, k);
        const double ceiling = rate_ceiling(m.C) + 1e-9;
        CAPTURE(trial, p, k);
        CHECK(rate_closed(m).bits_per_sym <= ceiling);
        CHECK(rate_quadrature(m).bits_per_sym <= ceiling);
        CHECK(rate_lower_bound(m) <= ceiling);
      }
    }
  }
}

TEST_CASE("exact rate increases with transmit power") {
  for (double alpha : {0.5, 0.9, 1.0}) {
    double prev = 0.0;
    for (double db = -20.0; db <= 40.0; db += 5.0) {
      const double r = rate_quadrature(derive_stats(reference_scenario(50, alpha, std::pow(10.0, db / 10.0))), 0).bits_per_sym;
      CAPTURE(alpha, db);
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("exact rate does not decrease with alpha") {
  for (double p : {0.1, 1.0, 10.0}) {
    double prev = 0.0;
    for (double alpha = 0.1; alpha <= 1.0001; alpha += 0.1) {
      const double r = rate_quadrature(derive_stats(reference_scenario(30, std::min(alpha, 1.0), p)), 0).bits_per_sym;
      CAPTURE(p, alpha);
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("backends agree on a 3x3x3 grid") {
  std::uint64_t seed = 500;
  for (int N : {20, 50, 100}) {
    for (double db : {-10.0, 0.0, 10.0}) {
      for (double alpha : {0.6, 0.8, 1.0}) {
        const Scenario sc = reference_scenario(N, alpha, std::pow(10.0, db / 10.0));
        const DerivedStats s = derive_stats(sc);
        const SinrModel m = make_model(s, 0);
        const double closed = rate_closed_raw(m).bits_per_sym;
        const double quad = rate_quadrature(m).bits_per_sym;
        TrialPlan plan;
        plan.n_trials = 20000;
        plan.seed = ++seed;
        const Estimate mc = estimate_rate(simulate_sinr(sc, plan));
        CAPTURE(N, db, alpha, closed, quad, mc.value, mc.std_err);
        CHECK_THAT(closed, WithinRel(quad, 1e-6));
        CHECK(std::abs(mc.value - quad) <= 4.0 * mc.std_err);
      }
    }
  }
}

TEST_CASE("distinct-spectrum and general forms agree on random layouts") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Scenario sc = random_scenario(gen);
    const DerivedStats s = derive_stats(sc);
    const SinrModel m = make_model(s, 0);
    bool distinct = true;
    for (int t : m.y->coeffs.tau) distinct = distinct && t == 1;
    REQUIRE(distinct);
    CAPTURE(trial, s.L, s.K, s.N, s.alpha);
    CHECK_THAT(rate_distinct_raw(m).bits_per_sym, WithinRel(rate_closed_raw(m).bits_per_sym, 1e-9));
  }
}

TEST_CASE("outage is a distribution function of the threshold") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 5; ++trial) {
    const DerivedStats s = derive_stats(random_scenario(gen));
    const SinrModel m = make_model(s, 0);
    const double top = m.C > 0.0 ? 1.0 / m.C : 50.0;
    double prev = 0.0;
    double prev_hp = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double g = top * i / 20.0;
      const double o = outage_closed(m, g);
      const double hp = outage_high_power(m, g);
      CAPTURE(trial, g);
      CHECK(o >= prev - 1e-12);
      CHECK(hp >= prev_hp - 1e-12);
      CHECK(hp <= o + 1e-12);
      prev = o;
      prev_hp = hp;
    }
    if (m.C > 0.0) CHECK(prev == 1.0);
  }
}
