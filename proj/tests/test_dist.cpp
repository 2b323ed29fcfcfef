#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <zfaging/dist.hpp>
#include <zfaging/rng.hpp>

using namespace zfaging;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &err);
}

// Sup distance between an empirical CDF and a continuous CDF, bounded from
// above through a monotone bracket on a grid.
double ks_upper_bound(std::vector<double> samples, const std::function<double(double)>& cdf, int grid) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const double lo = samples.front();
  const double hi = samples.back();
  double worst = 0.0;
  double prev_f = 0.0;
  double prev_emp = 0.0;
  for (int j = 0; j <= grid + 1; ++j) {
    const double y = j <= grid ? lo + (hi - lo) * j / grid : hi * 2.0;
    const double f = cdf(y);
    const double emp_right = static_cast<double>(std::upper_bound(samples.begin(), samples.end(), y) - samples.begin()) / n;
    const double emp_left = static_cast<double>(std::lower_bound(samples.begin(), samples.end(), y) - samples.begin()) / n;
    if (j > 0) {
      worst = std::max(worst, emp_left - prev_f);
      worst = std::max(worst, f - prev_emp);
    }
    prev_f = f;
    prev_emp = emp_right;
  }
  return worst;
}

}  // namespace

TEST_CASE("erlang cdf and pdf basics") {
  const ErlangDist d(91, 0.5882353);
  CHECK(erlang_cdf(d, 0.0) == 0.0);
  const ErlangDist e(1, 2.5);
  for (double x : {0.1, 1.0, 9.0}) CHECK_THAT(erlang_cdf(e, x), WithinRel(1.0 - std::exp(-x / 2.5), 1e-14));
  const double mean = integrate([&](double x) { return x * erlang_pdf(d, x); }, 0.0, 200.0);
  CHECK_THAT(mean, WithinAbs(53.5294, 1e-4));
  CHECK_THAT(mean, WithinRel(d.mean(), 1e-10));
  CHECK_THROWS_AS(erlang_pdf(d, -1.0), DomainError);
  CHECK_THROWS_AS(erlang_cdf(d, -1.0), DomainError);
  CHECK_THROWS_AS(ErlangDist(0, 1.0), InvalidArgument);
  double prev = 0.0;
  for (double x = 0.0; x < 120.0; x += 0.5) {
    const double c = erlang_cdf(d, x);
    CHECK(c >= prev);
    CHECK(c <= 1.0);
    prev = c;
  }
}

TEST_CASE("erlang cdf finite sum equals the regularized lower gamma") {
  for (int shape : {1, 2, 5, 30, 91}) {
    const ErlangDist d(shape, 0.7);
    for (double x = 0.0; x < 3.0 * shape; x += 0.25 * shape) {
      const double z = x / 0.7;
      double term = 1.0;
      double sum = 1.0;
      for (int t = 1; t < shape; ++t) {
        term *= z / t;
        sum += term;
      }
      const double finite = 1.0 - std::exp(-z) * sum;
      CHECK_THAT(erlang_cdf(d, x), WithinAbs(finite, 1e-12));
    }
  }
}

TEST_CASE("char_coeffs canonical and hand-computed cases") {
  const CharCoeffs triple = char_coeffs(std::vector<double>{2.0, 2.0, 2.0});
  REQUIRE(triple.mu.size() == 1);
  CHECK(triple.tau[0] == 3);
  CHECK(triple.coeff(0, 3) == 1.0);
  CHECK(triple.coeff(0, 1) == 0.0);
  CHECK(triple.coeff(0, 2) == 0.0);

  const CharCoeffs pair = char_coeffs(std::vector<double>{2.0, 1.0});
  REQUIRE(pair.mu.size() == 2);
  CHECK_THAT(pair.coeff(0, 1), WithinRel(2.0, 1e-15));
  CHECK_THAT(pair.coeff(1, 1), WithinRel(-1.0, 1e-15));

  CHECK_THROWS_AS(char_coeffs(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(char_coeffs(std::vector<double>{0.0, 0.0}), InvalidArgument);
}

TEST_CASE("char_coeffs on the reference spectrum reconstructs the MGF") {
  const DerivedStats s = derive_stats(reference_scenario());
  const CharCoeffs c = char_coeffs(s.spectrum);
  REQUIRE(c.components() == 70);
  CHECK(mgf_residual(c, -1.0) <= 1e-9);
  PrecisionScope scope(c.digits);
  BigFloat prod = 1;
  for (std::size_t p = 0; p < c.mu.size(); ++p) prod *= pow(1 + BigFloat(c.mu[p]), -c.tau[p]);
  BigFloat mix = 0;
  for (std::size_t p = 0; p < c.mu.size(); ++p) {
    for (int q = 1; q <= c.tau[p]; ++q) mix += c.X[p][static_cast<std::size_t>(q - 1)] * pow(1 + BigFloat(c.mu[p]), -q);
  }
  CHECK(abs(mix / prod - 1) < BigFloat("1e-9"));
}

TEST_CASE("char_coeffs matches the distinct-case product formula") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 8);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = u(gen);
    const CharCoeffs c = char_coeffs(v);
    REQUIRE(static_cast<int>(c.mu.size()) == n);
    for (int p = 0; p < n; ++p) {
      PrecisionScope scope(60);
      BigFloat prod = 1;
      for (int q = 0; q < n; ++q) {
        if (q != p) prod /= 1 - BigFloat(c.mu[static_cast<std::size_t>(q)]) / c.mu[static_cast<std::size_t>(p)];
      }
      const BigFloat got = c.X[static_cast<std::size_t>(p)][0];
      CHECK(abs(got / prod - 1) < BigFloat("1e-10"));
    }
    for (double s : {-5.0, -1.0, 0.0, 0.3 / c.mu.front()}) CHECK(mgf_residual(c, s) <= 1e-9);
  }
}

TEST_CASE("char_coeffs with repeated values on random multisets") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int distinct = 1 + static_cast<int>(gen() % 4);
    std::vector<double> v;
    for (int p = 0; p < distinct; ++p) {
      const double m = u(gen);
      const int mult = 1 + static_cast<int>(gen() % 6);
      v.insert(v.end(), static_cast<std::size_t>(mult), m);
    }
    const CharCoeffs c = char_coeffs(v);
    CHECK(c.components() == static_cast<int>(v.size()));
    for (double s : {-3.0, -0.5, 0.4 / c.mu.front()}) CHECK(mgf_residual(c, s) <= 1e-9);
  }
}

TEST_CASE("y density for the two-exponential example") {
  const YDist y(std::vector<double>{2.0, 1.0});
  CHECK(y_pdf(y, 0.0) == 0.0);
  for (double t : {0.1, 1.0, 4.0, 20.0}) {
    CHECK_THAT(y_pdf(y, t), WithinAbs(std::exp(-t / 2.0) - std::exp(-t), 1e-15));
    CHECK_THAT(y_cdf(y, t), WithinAbs(1.0 - 2.0 * std::exp(-t / 2.0) + std::exp(-t), 1e-15));
  }
  CHECK(y_cdf(y, 0.0) == 0.0);
  CHECK(y_mean(y) == 3.0);
  CHECK_THROWS_AS(y_pdf(y, -1.0), DomainError);
  CHECK_THROWS_AS(y_cdf(y, -1.0), DomainError);
}

TEST_CASE("single-value spectrum reduces to an Erlang law") {
  const YDist y(std::vector<double>(6, 0.4));
  const ErlangDist e(6, 0.4);
  for (double t : {0.05, 1.0, 2.4, 6.0}) {
    CHECK_THAT(y_pdf(y, t), WithinRel(erlang_pdf(e, t), 1e-13));
    CHECK_THAT(y_cdf(y, t), WithinAbs(erlang_cdf(e, t), 1e-14));
  }
  CHECK_THAT(y_mean(y), WithinRel(2.4, 1e-15));
}

TEST_CASE("y mean identities on the reference scenario") {
  const DerivedStats s = derive_stats(reference_scenario());
  const YDist y = make_ydist(s);
  CHECK_THAT(y_mean(y), WithinAbs(10.949412, 1e-6));
  CHECK_THAT(y_mean_from_coeffs(y), WithinRel(y_mean(y), 1e-9));
}

TEST_CASE("y pdf integrates to one for scenario-derived spectra") {
  for (int N : {20, 100}) {
    for (double alpha : {0.6, 0.9, 1.0}) {
      for (double p : {0.1, 1.0, 10.0}) {
        const YDist y = make_ydist(derive_stats(reference_scenario(N, alpha, p)));
        const double hi = y.trace + 60.0 * y.coeffs.mu.front();
        const double mass = integrate([&](double t) { return y_pdf(y, t); }, 0.0, hi);
        CHECK_THAT(mass, WithinAbs(1.0, 1e-8));
        CHECK_THAT(y_cdf(y, hi), WithinAbs(1.0, 1e-12));
      }
    }
  }
}

TEST_CASE("y cdf is monotone") {
  const YDist y = make_ydist(derive_stats(reference_scenario()));
  double prev = 0.0;
  for (double t = 0.0; t < 40.0; t += 0.25) {
    const double c = y_cdf(y, t);
    CHECK(c >= prev - 1e-15);
    prev = c;
  }
  CHECK(prev > 0.999999);
}

TEST_CASE("samplers are deterministic and unbiased") {
  const ErlangDist x(91, 1.0 / 1.7);
  const YDist y = make_ydist(derive_stats(reference_scenario()));
  const int n = 1000000;
  std::vector<double> xs(n), ys(n);
  auto rng = trial_stream(42, 0);
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = sample_x(x, rng);
    ys[static_cast<std::size_t>(i)] = sample_y(y, rng);
  }
  auto rng2 = trial_stream(42, 0);
  CHECK(sample_x(x, rng2) == xs[0]);
  CHECK(sample_y(y, rng2) == ys[0]);

  auto mean_se = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double a : v) ss += (a - m) * (a - m);
    return std::pair{m, std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) / static_cast<double>(v.size()))};
  };
  const auto [mx, sx] = mean_se(xs);
  CHECK(std::abs(mx - x.mean()) <= 3.0 * sx);
  const auto [my, sy] = mean_se(ys);
  CHECK(std::abs(my - y_mean(y)) <= 3.0 * sy);

  const double d = ks_upper_bound(ys, [&](double t) { return y_cdf(y, t); }, 3000);
  CHECK(d <= 0.005);

  std::sort(ys.begin(), ys.end());
  for (double q : {0.1, 0.5, 0.9}) {
    const double yq = ys[static_cast<std::size_t>(q * n)];
    CHECK_THAT(y_cdf(y, yq), WithinAbs(q, 0.01));
  }
}
