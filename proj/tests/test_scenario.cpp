#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <zfaging/scenario.hpp>

using namespace zfaging;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("build_simple_profile") {
  const FadingProfile f = build_simple_profile(7, 10, 0.1);
  REQUIRE(f.cells() == 7);
  REQUIRE(f.users() == 10);
  for (int i = 0; i < 7; ++i) {
    for (int k = 0; k < 10; ++k) CHECK(f(i, k) == (i == 0 ? 1.0 : 0.1));
  }
  const FadingProfile single = build_simple_profile(1, 4, 0.5);
  for (int k = 0; k < 4; ++k) CHECK(single(0, k) == 1.0);
  CHECK_THROWS_AS(build_simple_profile(3, 2, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_simple_profile(0, 2, 0.1), InvalidArgument);
  CHECK_THROWS_AS(build_simple_profile(2, 0, 0.1), InvalidArgument);
}

TEST_CASE("zero interference factor gives no contamination") {
  Scenario s = reference_scenario();
  s.topology = CellTopology{3, 2, 8, 20, 2};
  s.fading = build_simple_profile(3, 2, 0.0);
  const DerivedStats d = derive_stats(s);
  for (double c : d.C) CHECK(c == 0.0);
}

TEST_CASE("temporal_correlation") {
  CHECK(temporal_correlation(0.0, 1e-3) == 1.0);
  const double root = 2.404825557695773;
  CHECK_THAT(temporal_correlation(root / (2.0 * std::numbers::pi), 1.0), WithinAbs(0.0, 1e-12));
  CHECK_THAT(temporal_correlation(100.0, 1e-3), WithinAbs(0.9037, 5e-5));
  CHECK_THROWS_AS(temporal_correlation(-1.0, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(temporal_correlation(1.0, 0.0), InvalidArgument);
}

TEST_CASE("mobility triple resolves through J0 and loses to a direct alpha") {
  const Mobility m{30.0, 2e9, 1e-3};
  CHECK_THAT(m.doppler_hz(), WithinRel(30.0 * 2e9 / 299792458.0, 1e-15));
  const AgingSpec moving = AgingSpec::from_mobility(m);
  CHECK(moving.resolve() == specfun::bessel_j0(2.0 * std::numbers::pi * m.doppler_hz() * 1e-3).value);

  AgingSpec both{0.9, m};
  int warnings = 0;
  CHECK(both.resolve([&](const std::string&) { ++warnings; }) == 0.9);
  CHECK(warnings == 1);
  CHECK_THROWS_AS(AgingSpec{}.resolve(), InvalidArgument);
  CHECK_THROWS_AS(AgingSpec::direct(1.5).resolve(), InvalidArgument);
}

TEST_CASE("topology invariants") {
  CHECK_NOTHROW(CellTopology{7, 10, 100, 200, 10}.validate());
  CHECK_THROWS_AS((CellTopology{7, 10, 9, 200, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((CellTopology{7, 10, 100, 200, 9}.validate()), InvalidArgument);
  CHECK_THROWS_AS((CellTopology{7, 10, 100, 5, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((CellTopology{0, 10, 100, 200, 10}.validate()), InvalidArgument);
}

TEST_CASE("fading profile invariants") {
  CHECK_THROWS_AS(FadingProfile(2, 1, {0.0, 0.3}), InvalidArgument);
  CHECK_THROWS_AS(FadingProfile(2, 1, {1.0, -0.3}), InvalidArgument);
  CHECK_THROWS_AS(FadingProfile(2, 1, {1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(FadingProfile(2, 1, {1.0}), InvalidArgument);
  CHECK_NOTHROW(FadingProfile(2, 1, {0.0, 0.3}, 1));
}

TEST_CASE("power spec derives p_tr from p_r") {
  const PowerSpec fixed = PowerSpec::fixed_db(0.0);
  CHECK(fixed.p_r(100) == 1.0);
  CHECK(fixed.p_tr(10, 100) == 10.0);
  const PowerSpec scaled{1.0, PowerScaling::inverse_sqrt_n};
  CHECK_THAT(scaled.p_r(400), WithinRel(0.05, 1e-15));
  CHECK_THROWS_AS((PowerSpec{0.0, PowerScaling::fixed}.p_r(4)), InvalidArgument);
}

TEST_CASE("derive_stats on the reference scenario") {
  const DerivedStats d = derive_stats(reference_scenario());
  for (int k = 0; k < 10; ++k) {
    CHECK_THAT(d.own_hat_beta(k), WithinRel(1.0 / 1.7, 1e-14));
    CHECK_THAT(d.own_hat_beta(k), WithinAbs(0.5882353, 1e-7));
    CHECK_THAT(d.hat_beta_at(3, k), WithinAbs(0.0058824, 1e-7));
    CHECK_THAT(d.C[static_cast<std::size_t>(k)], WithinRel(0.06, 1e-14));
  }
  REQUIRE(d.spectrum.mu.size() == 2);
  CHECK(d.spectrum.multiplicity[0] == 10);
  CHECK(d.spectrum.multiplicity[1] == 60);
  CHECK_THAT(d.spectrum.mu[0], WithinAbs(0.5235294, 1e-7));
  CHECK_THAT(d.spectrum.mu[1], WithinAbs(0.0952353, 1e-7));
  CHECK_THAT(d.trace_A, WithinAbs(10.949412, 1e-6));
  CHECK(d.a_diag.size() == 70);
  CHECK(d.p_tr == 10.0);
}

TEST_CASE("single cell without interferers") {
  Scenario s = reference_scenario();
  s.topology = CellTopology{1, 4, 8, 20, 4};
  s.fading = build_simple_profile(1, 4, 0.0);
  const DerivedStats d = derive_stats(s);
  REQUIRE(d.a_diag.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(d.C[static_cast<std::size_t>(k)] == 0.0);
    CHECK_THAT(d.a_diag[static_cast<std::size_t>(k)], WithinRel(1.0 - 0.81 * d.own_hat_beta(k), 1e-15));
  }
}

TEST_CASE("perfect-CSI limit keeps contamination in the own-cell aging entries") {
  Scenario s = reference_scenario(100, 1.0, std::numeric_limits<double>::infinity());
  const DerivedStats d = derive_stats(s);
  CHECK_THAT(d.own_hat_beta(0), WithinRel(1.0 / 1.6, 1e-15));
  CHECK_THAT(d.a_diag[0], WithinRel(1.0 - 1.0 / 1.6, 1e-14));
  CHECK(d.a_diag[0] > 0.0);
}

TEST_CASE("derived-statistics properties on random profiles") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int L = 1 + static_cast<int>(gen() % 5);
    const int K = 1 + static_cast<int>(gen() % 4);
    std::vector<double> beta(static_cast<std::size_t>(L * K));
    for (auto& b : beta) b = u(gen);
    const int l = static_cast<int>(gen() % static_cast<unsigned>(L));
    for (int k = 0; k < K; ++k) beta[static_cast<std::size_t>(l * K + k)] = 0.05 + u(gen);
    Scenario s;
    s.topology = CellTopology{L, K, K + 3, 50, K};
    s.fading = FadingProfile(L, K, beta, l);
    s.aging = AgingSpec::direct(u(gen));
    s.power = PowerSpec::fixed_db(-10.0 + 30.0 * u(gen));
    const DerivedStats d = derive_stats(s);

    for (int i = 0; i < L; ++i) {
      for (int k = 0; k < K; ++k) CHECK(d.hat_beta_at(i, k) <= d.beta_at(i, k));
    }
    double trace = 0.0;
    for (double a : d.a_diag) {
      CHECK(a >= 0.0);
      trace += a;
    }
    CHECK_THAT(d.trace_A, WithinRel(trace, 1e-13));
    CHECK(d.spectrum.total() == K * L);
    for (std::size_t p = 1; p < d.spectrum.mu.size(); ++p) CHECK(d.spectrum.mu[p] < d.spectrum.mu[p - 1]);

    // reconstruction of the multiset from (mu, tau)
    std::vector<double> back;
    for (std::size_t p = 0; p < d.spectrum.mu.size(); ++p) {
      back.insert(back.end(), static_cast<std::size_t>(d.spectrum.multiplicity[p]), d.spectrum.mu[p]);
    }
    std::vector<double> orig = d.a_diag;
    std::sort(orig.begin(), orig.end(), std::greater<>());
    REQUIRE(back.size() == orig.size());
    for (std::size_t j = 0; j < back.size(); ++j) CHECK(spectrum_equal(back[j], orig[j]));

    // C is scale invariant
    std::vector<double> scaled = beta;
    for (auto& b : scaled) b *= 3.7;
    Scenario s2 = s;
    s2.fading = FadingProfile(L, K, scaled, l);
    const DerivedStats d2 = derive_stats(s2);
    for (int k = 0; k < K; ++k) {
      CHECK_THAT(d2.C[static_cast<std::size_t>(k)], WithinAbs(d.C[static_cast<std::size_t>(k)], 1e-12));
    }

    // a_diag nonincreasing in alpha^2
    const double alpha = *s.aging.alpha;
    const DerivedStats d3 = derive_stats(s.with_alpha(std::min(1.0, alpha + 0.1)));
    for (std::size_t j = 0; j < d.a_diag.size(); ++j) CHECK(d3.a_diag[j] <= d.a_diag[j] + 1e-15);
  }
}

TEST_CASE("hat_beta equals beta only for a single cell at infinite training power") {
  Scenario s = reference_scenario(8, 1.0, std::numeric_limits<double>::infinity());
  s.topology = CellTopology{1, 2, 8, 20, 2};
  s.fading = FadingProfile(1, 2, {0.7, 1.3});
  const DerivedStats d = derive_stats(s);
  CHECK(d.hat_beta_at(0, 0) == 0.7);
  CHECK(d.hat_beta_at(0, 1) == 1.3);
  const DerivedStats finite = derive_stats(s.with_snr(100.0));
  CHECK(finite.hat_beta_at(0, 0) < 0.7);
}

TEST_CASE("spectrum grouping tolerance") {
  const Spectrum s = group_spectrum({1.0, 1.0 + 1e-13, 2.0, 0.5, 0.5 + 1e-9});
  REQUIRE(s.mu.size() == 4);
  CHECK(s.multiplicity[0] == 1);
  CHECK(s.multiplicity[1] == 2);
}
