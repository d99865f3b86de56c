#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "acfinf/correlation_tests.hpp"
#include "acfinf/models.hpp"
#include "acfinf/rng.hpp"

using namespace acfinf;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

// Straight-line recomputation of the max-deviation test from the raw data,
// sharing no code with the library beyond the series itself.
struct Reference {
  double M, M_selfnorm, gumbel_stat, p_value, sigma0;
};

Reference reference_max_test(const std::vector<double>& x, std::size_t s, const std::vector<double>& r0) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  std::vector<double> r(s + 1);
  double g0 = 0.0;
  for (double v : x) g0 += (v - mean) * (v - mean);
  for (std::size_t k = 0; k <= s; ++k) {
    double g = 0.0;
    for (std::size_t i = k; i < n; ++i) g += (x[i - k] - mean) * (x[i] - mean);
    r[k] = g / g0;
  }
  std::size_t t = 0;
  while ((t + 1) * (t + 1) * (t + 1) <= n) ++t;
  t = std::min(t, s);
  double sigma0 = 0.0;
  for (long k = -static_cast<long>(t); k <= static_cast<long>(t); ++k) sigma0 += r[std::abs(k)] * r[std::abs(k)];
  double M = 0.0;
  for (std::size_t k = 1; k <= s; ++k)
    M = std::max(M, std::abs(r[k] - (1.0 - double(k) / n) * (r0.empty() ? 0.0 : r0[k - 1])));
  const double L = std::log(2.0 * s);
  const double a = 1.0 / std::sqrt(2.0 * L);
  const double b = std::sqrt(2.0 * L) - (std::log(L) + std::log(4.0 * std::numbers::pi)) / std::sqrt(8.0 * L);
  const double stat = (std::sqrt(double(n)) * M / std::sqrt(sigma0) - b) / a;
  return {M, M / std::sqrt(sigma0), stat, 1.0 - std::exp(-std::exp(-stat)), sigma0};
}

}  // namespace

TEST(MaxTest, MatchesStraightLineRecomputation) {
  RandomStream pick(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 50 + pick.below(400);
    const std::size_t s = 2 + pick.below(30);
    const auto x = gaussian(n, 1000 + trial);
    std::vector<double> r0;
    NullSpec null = NullSpec::white();
    if (trial % 2 == 1) {
      for (std::size_t k = 1; k <= s; ++k) r0.push_back(std::pow(0.3, double(k)));
      null = NullSpec::correlations(r0);
    }
    const MaxTestResult res = max_test(TimeSeries(x), s, null);
    const Reference ref = reference_max_test(x, s, r0);
    EXPECT_NEAR(res.M, ref.M, 1e-12);
    EXPECT_NEAR(res.sigma0_hat, ref.sigma0, 1e-12);
    EXPECT_NEAR(res.M_selfnorm, ref.M_selfnorm, 1e-12);
    EXPECT_NEAR(res.gumbel_stat, ref.gumbel_stat, 1e-10 * std::max(1.0, std::abs(ref.gumbel_stat)));
    EXPECT_NEAR(res.p_value, ref.p_value, 1e-12);
  }
}

TEST(MaxTest, ResultInvariants) {
  const TimeSeries x(gaussian(500, 4));
  const MaxTestResult r = max_test(x, 10, NullSpec::white());
  EXPECT_GE(r.M, 0.0);
  EXPECT_GE(r.M_selfnorm, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 - gumbel_cdf(r.gumbel_stat));
  EXPECT_EQ(r.t_n, 7u);
  EXPECT_TRUE(r.centered);
}

TEST(MaxTest, ShiftedSeriesGivesSameResult) {
  const auto v = gaussian(800, 12);
  std::vector<double> w(v);
  for (double& x : w) x += 1000.0;
  const MaxTestResult a = max_test(TimeSeries(v), 12, NullSpec::white());
  const MaxTestResult b = max_test(TimeSeries(w), 12, NullSpec::white());
  EXPECT_NEAR(a.M, b.M, 1e-9);
  EXPECT_NEAR(a.gumbel_stat, b.gumbel_stat, 1e-7);
  EXPECT_NEAR(a.p_value, b.p_value, 1e-8);
}

TEST(TestStatistics, ScaleInvariant) {
  const auto v = gaussian(1000, 21);
  for (double c : {3.0, -0.01, 250.0}) {
    std::vector<double> w(v);
    for (double& x : w) x *= c;
    const MaxTestResult a = max_test(TimeSeries(v), 20, NullSpec::white());
    const MaxTestResult b = max_test(TimeSeries(w), 20, NullSpec::white());
    EXPECT_NEAR(b.M, a.M, 1e-10 * a.M);
    EXPECT_NEAR(b.M_selfnorm, a.M_selfnorm, 1e-10 * a.M_selfnorm);
    for (L2Flavor f : {L2Flavor::BoxPierce, L2Flavor::UnboundedLagNormal}) {
      const L2TestResult p = l2_test(TimeSeries(v), 20, f);
      const L2TestResult q = l2_test(TimeSeries(w), 20, f);
      EXPECT_NEAR(q.Q, p.Q, 1e-10 * p.Q);
      EXPECT_NEAR(q.T, p.T, 1e-10 * std::abs(p.T) + 1e-12);
    }
  }
}

TEST(MaxTest, LagCountErrors) {
  const TimeSeries x(gaussian(20, 1));
  EXPECT_THROW(max_test(x, 1, NullSpec::white()), InvalidLagCount);
  EXPECT_THROW(max_test(x, 20, NullSpec::white()), InvalidLagCount);
  EXPECT_NO_THROW(max_test(x, 19, NullSpec::white()));
}

TEST(MaxTest, NullValidation) {
  const TimeSeries x(gaussian(100, 2));
  EXPECT_THROW(max_test(x, 5, NullSpec::correlations({0.1, 0.2})), InvalidNullSpec);
  EXPECT_THROW(max_test(x, 2, NullSpec::correlations({0.1, 1.5})), InvalidNullSpec);
  EXPECT_NO_THROW(max_test(x, 2, NullSpec::correlations({0.1, -1.0})));
}

TEST(MaxTest, UncenteredOptionUsesRawEstimator) {
  auto v = gaussian(400, 8);
  for (double& x : v) x += 0.5;
  MaxTestOptions raw;
  raw.centered = false;
  const MaxTestResult a = max_test(TimeSeries(v), 5, NullSpec::white(), raw);
  const AcfEstimate e = acf(TimeSeries(v), 5, false);
  double m = 0.0;
  for (std::size_t k = 1; k <= 5; ++k) m = std::max(m, std::abs(e.rho[k]));
  EXPECT_DOUBLE_EQ(a.M, m);
  EXPECT_FALSE(a.centered);
}

TEST(L2Test, ZeroCorrelationSeam) {
  const std::size_t n = 200, s = 10;
  std::vector<double> g(s + 1, 0.0);
  g[0] = 1.7;
  const auto est = AcfEstimate::from_gamma(g, n, true);
  const L2TestResult r = l2_test_from_acf(est, s, L2Flavor::UnboundedLagNormal);
  double expected = 0.0;
  for (std::size_t k = 1; k <= s; ++k) expected -= 1.0 - double(k) / n;
  expected /= std::sqrt(double(s));
  EXPECT_EQ(r.Q, 0.0);
  EXPECT_EQ(r.Q_lb, 0.0);
  EXPECT_NEAR(r.T, expected, 1e-14);
  EXPECT_EQ(r.variance_used, 2.0);
  EXPECT_NEAR(r.p_value, normal_sf(expected / std::sqrt(2.0)), 1e-15);
}

TEST(L2Test, ClassicalStatisticsByHand) {
  // n = 100, r_1 = 0.2, r_2 = -0.1.
  const auto est = AcfEstimate::from_gamma({2.0, 0.4, -0.2}, 100, true);
  const L2TestResult bp = l2_test_from_acf(est, 2, L2Flavor::BoxPierce);
  EXPECT_NEAR(bp.Q, 100 * (0.04 + 0.01), 1e-12);
  EXPECT_NEAR(bp.p_value, chi2_sf(5.0, 2), 1e-15);
  const L2TestResult lb = l2_test_from_acf(est, 2, L2Flavor::LjungBox);
  EXPECT_NEAR(lb.Q_lb, 100.0 * 102.0 * (0.04 / 99.0 + 0.01 / 98.0), 1e-12);
  EXPECT_NEAR(lb.p_value, chi2_sf(lb.Q_lb, 2), 1e-15);
  // chi^2_2 upper tail is exp(-x/2).
  EXPECT_NEAR(bp.p_value, std::exp(-2.5), 1e-14);
}

TEST(L2Test, GeneralNullUsesPluginCalibration) {
  const TimeSeries x = simulate(ModelSpec::ar1(0.5), 3000, 500, 17);
  const std::size_t s = 20;
  const auto r0 = *theoretical_correlations(ModelSpec::ar1(0.5), s);
  const L2TestResult r = l2_test(x, s, L2Flavor::UnboundedLagNormal, NullSpec::correlations(r0));
  EXPECT_GT(r.variance_used, 2.0);
  EXPECT_GE(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1.0);
  EXPECT_EQ(l2_required_lag(3000, s, NullSpec::correlations(r0)), 28u);
  EXPECT_EQ(l2_required_lag(3000, s, NullSpec::white()), s);
}

TEST(L2Test, Errors) {
  const TimeSeries x(gaussian(30, 3));
  EXPECT_THROW(l2_test(x, 0, L2Flavor::BoxPierce), InvalidLagCount);
  EXPECT_THROW(l2_test(x, 30, L2Flavor::LjungBox), InvalidLagCount);
  EXPECT_NO_THROW(l2_test(x, 1, L2Flavor::UnboundedLagNormal));
  EXPECT_EQ(parse_flavor("lb"), L2Flavor::LjungBox);
  EXPECT_EQ(flavor_name(L2Flavor::UnboundedLagNormal), "normal");
  EXPECT_THROW(parse_flavor("xx"), InvalidParams);
}

TEST(L2Test, PValuesInUnitInterval) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TimeSeries x = simulate(ModelSpec::ar1(seed % 2 ? 0.3 : 0.0), 300, 100, seed);
    for (L2Flavor f : {L2Flavor::BoxPierce, L2Flavor::LjungBox, L2Flavor::UnboundedLagNormal}) {
      const L2TestResult r = l2_test(x, 15, f);
      EXPECT_GE(r.Q, 0.0);
      EXPECT_GE(r.p_value, 0.0);
      EXPECT_LE(r.p_value, 1.0);
    }
  }
}

TEST(PowerApprox, MatchesFormula) {
  const std::vector<double> r{0.1, 0.05, 0.0};
  const std::size_t n = 1000, s = 3;
  const double alpha = 0.05, tau = 0.7;
  const double z = 1.6448536269514722;
  const double thr = std::sqrt(6.0) * z / std::sqrt(1000.0) + 3.0 * (2000.0 - 4.0) / (2.0 * std::pow(1000.0, 1.5)) -
                     std::sqrt(1000.0) * 0.0125;
  EXPECT_NEAR(l2_power_approx(r, n, s, alpha, tau), 0.5 * std::erfc(thr / tau / std::sqrt(2.0)), 1e-11);
}

// With sum r_k^2 = 0 the threshold is positive, so the approximation stays
// below one half. The formula has no sqrt(n) scaling on the alpha term, so
// it does not reduce to alpha.
TEST(PowerApprox, WhiteNoiseBelowOneHalf) {
  const std::vector<double> r(40, 0.0);
  for (std::size_t n : {500u, 4000u, 100000u}) {
    const double p = l2_power_approx(r, n, 40, 0.05, std::sqrt(2.0));
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 0.5);
  }
}

TEST(PowerApprox, MonotoneInNAndSignal) {
  std::vector<double> r(30);
  for (std::size_t k = 0; k < 30; ++k) r[k] = 0.1 * std::pow(0.5, double(k + 1));
  double prev = 0.0;
  for (std::size_t n : {500u, 2000u, 8000u}) {
    const double p = l2_power_approx(r, n, 30, 0.05, 1.0);
    EXPECT_GT(p, prev);
    prev = p;
  }
  // A strong AR(1) alternative saturates at 1 in double; the miss
  // probability still decreases strictly.
  for (std::size_t k = 0; k < 30; ++k) r[k] = std::pow(0.5, double(k + 1));
  double miss = 1.0;
  for (std::size_t n : {500u, 2000u, 8000u}) {
    const double m = l2_power_miss(r, n, 30, 0.05, 1.0);
    EXPECT_LT(m, miss);
    EXPECT_NEAR(m + l2_power_approx(r, n, 30, 0.05, 1.0), 1.0, 1e-15);
    miss = m;
  }
  double prev_sig = 0.0;
  for (double scale : {0.05, 0.1, 0.2, 0.4}) {
    std::vector<double> q(30, 0.0);
    q[0] = scale;
    const double p = l2_power_approx(q, 1000, 30, 0.05, 1.0);
    EXPECT_GT(p, prev_sig);
    prev_sig = p;
  }
}

TEST(PowerApprox, Errors) {
  const std::vector<double> r(5, 0.1);
  EXPECT_THROW(l2_power_approx(r, 100, 5, 0.0, 1.0), InvalidAlpha);
  EXPECT_THROW(l2_power_approx(r, 100, 5, 1.0, 1.0), InvalidAlpha);
  EXPECT_THROW(l2_power_approx(r, 100, 5, 0.05, 0.0), NonpositiveTau);
  EXPECT_THROW(l2_power_approx(r, 100, 6, 0.05, 1.0), LagOutOfRange);
}

TEST(Tau1, ScaleOfSeriesDoesNotMatter) {
  const ModelSpec m = ModelSpec::ar1(0.5);
  const auto r = *theoretical_correlations(m, 10);
  double target = 0.0;
  for (double v : r) target += v * v;
  auto plain = [&](std::uint64_t s) { return simulate(m, 1000, 200, s); };
  auto scaled = [&](std::uint64_t s) {
    auto v = simulate(m, 1000, 200, s).values();
    std::vector<double> w(v.begin(), v.end());
    for (double& x : w) x *= 3.0;
    return TimeSeries(std::move(w));
  };
  const Tau1Estimate a = tau1_from_generator(plain, target, 10, 200, 5);
  const Tau1Estimate b = tau1_from_generator(scaled, target, 10, 200, 5);
  EXPECT_NEAR(a.tau1, b.tau1, 1e-10 * a.tau1);
  EXPECT_GT(a.tau1, 0.0);
}

TEST(Tau1, DeterministicAndThreadInvariant) {
  const Tau1Estimate a = tau1_monte_carlo(ModelSpec::ar1(0.5), 500, 10, 150, 42, 1);
  const Tau1Estimate b = tau1_monte_carlo(ModelSpec::ar1(0.5), 500, 10, 150, 42, 3);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(a.replicates, 150u);
  EXPECT_THROW(tau1_monte_carlo(ModelSpec::ar1(0.5), 500, 10, 99, 42), InvalidParams);
}
