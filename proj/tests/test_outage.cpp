#include <catch_amalgamated.hpp>

#include <cmath>

#include <zfaging/montecarlo.hpp>
#include <zfaging/outage.hpp>

#include "fixtures.hpp"

using namespace zfaging;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("outage reproduces frozen reference values") {
  const DerivedStats s1 = derive_stats(fixtures::two_cell_single_user());
  for (const auto& pt : fixtures::kOutageS1) {
    CAPTURE(pt.gamma_th);
    CHECK_THAT(outage_closed(s1, 0, pt.gamma_th), WithinRel(pt.outage, 1e-12));
    CHECK_THAT(outage_high_power(s1, 0, pt.gamma_th), WithinRel(pt.high_power, 1e-12));
  }
  const DerivedStats s2 = derive_stats(fixtures::two_cell_two_user());
  for (const auto& pt : fixtures::kOutageS2) {
    for (int k = 0; k < 2; ++k) {
      CAPTURE(pt.gamma_th, k);
      CHECK_THAT(outage_closed(s2, k, pt.gamma_th), WithinRel(pt.outage, 1e-12));
      CHECK_THAT(outage_high_power(s2, k, pt.gamma_th), WithinRel(pt.high_power, 1e-12));
    }
  }
}

TEST_CASE("thresholds at or above the contamination ceiling are certain outages") {
  const DerivedStats s1 = derive_stats(fixtures::two_cell_single_user());
  CHECK(outage_closed(s1, 0, 11.2) == 1.0);
  CHECK(outage_closed(s1, 0, 1.0 / 0.09) == 1.0);
  CHECK(outage_high_power(s1, 0, 11.2) == 1.0);
  const DerivedStats ref = derive_stats(reference_scenario());
  CHECK(outage_closed(ref, 0, 1.0 / ref.C[0]) == 1.0);
  CHECK(outage_closed(ref, 0, 50.0) == 1.0);
}

TEST_CASE("outage vanishes as the threshold goes to zero and grows with it") {
  const DerivedStats s = derive_stats(reference_scenario());
  CHECK(outage_closed(s, 0, 1e-6) < 1e-12);
  double prev = 0.0;
  for (double g = 0.25; g < 1.0 / s.C[0]; g += 0.25) {
    const double p = outage_closed(s, 0, g);
    CAPTURE(g);
    CHECK(p >= prev);
    CHECK(p <= 1.0);
    prev = p;
  }
  CHECK_THROWS_AS(outage_closed(s, 0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(outage_closed(s, 0, -1.0), InvalidArgument);
}

TEST_CASE("high-power outage is the limit of the finite-power value") {
  for (double g : {0.5, 1.0, 2.0, 3.0}) {
    const SinrModel m = make_model(derive_stats(reference_scenario()), 0);
    const double limit = outage_high_power(m, g);
    CAPTURE(g);
    CHECK_THAT(outage_closed(m.with_power(1e6), g), WithinAbs(limit, 1e-4));
    CHECK(outage_closed(m.with_power(1e2), g) >= limit);
  }
}

TEST_CASE("perfect aging and no contamination reduce to an Erlang tail") {
  SinrModel m;
  m.N = 12;
  m.K = 4;
  m.alpha2 = 1.0;
  m.hat_beta = 0.5;
  m.C = 0.0;
  m.p_r = 3.0;
  m.y = std::make_shared<const YDist>(std::vector<double>{});
  const double g = 10.0;
  // P(p X <= g), X ~ Erlang(9, 0.5).
  const double want = erlang_cdf(m.x(), g / m.p_r);
  CHECK_THAT(outage_closed(m, g), WithinRel(want, 1e-13));
  CHECK(outage_high_power(m, g) == 0.0);
}

TEST_CASE("outage agrees with a Monte-Carlo estimate") {
  const Scenario sc = reference_scenario();
  TrialPlan plan;
  plan.n_trials = 100000;
  plan.seed = 77;
  plan.mode = McMode::scalar;
  const SinrSamples samples = simulate_sinr(sc, plan);
  const DerivedStats s = derive_stats(sc);
  for (double g : {0.5, 1.0, 2.0, 3.0}) {
    const Estimate e = estimate_outage(samples, g);
    const double exact = outage_closed(s, 0, g);
    CAPTURE(g, exact, e.value, e.std_err);
    CHECK(std::abs(e.value - exact) <= 3.0 * std::sqrt(exact * (1.0 - exact) / 1e5));
  }
}
