#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "acfinf/estimators.hpp"
#include "acfinf/models.hpp"
#include "acfinf/rng.hpp"

using namespace acfinf;

TEST(Rng, DeriveSeedSeparatesStreams) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
  RandomStream a = make_stream(5, 2), b = make_stream(5, 2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, BelowStaysInRange) {
  RandomStream r(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Rng, UniformOpenInterval) {
  RandomStream r(11);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Simulate, DeterministicInSeed) {
  for (const ModelSpec& m : {ModelSpec::iid(), ModelSpec::ar1(0.5), ModelSpec::bilinear(0.4, 0.4),
                             ModelSpec::arch(0.25, 0.25)}) {
    EXPECT_EQ(simulate(m, 500, 100, 9), simulate(m, 500, 100, 9));
    EXPECT_FALSE(simulate(m, 500, 100, 9) == simulate(m, 500, 100, 10));
  }
}

TEST(Simulate, BurnInShiftsTheStream) {
  // With burn_in = 0 the AR(1) path starts from X_0 = 0.
  const TimeSeries x = simulate(ModelSpec::ar1(0.5), 3, 0, 1);
  RandomStream r(1);
  const double e1 = r.normal(), e2 = r.normal();
  EXPECT_DOUBLE_EQ(x[0], e1);
  EXPECT_DOUBLE_EQ(x[1], 0.5 * e1 + e2);
}

TEST(Simulate, IidMoments) {
  const TimeSeries x = simulate(ModelSpec::iid(), 1000000, 0, 12345);
  double m = 0.0, v = 0.0;
  for (double s : x.values()) m += s;
  m /= 1e6;
  for (double s : x.values()) v += (s - m) * (s - m);
  v /= 1e6;
  EXPECT_NEAR(m, 0.0, 0.004);
  EXPECT_NEAR(v, 1.0, 0.01);
}

TEST(Simulate, Ar1LagOneCorrelation) {
  const TimeSeries x = simulate(ModelSpec::ar1(0.5), 100000, 1000, 77);
  EXPECT_NEAR(acf(x, 1, true).rho[1], 0.5, 0.02);
}

TEST(Simulate, ArchIsWhiteWithDependentSquares) {
  const TimeSeries x = simulate(ModelSpec::arch(0.25, 0.25), 100000, 1000, 5);
  EXPECT_NEAR(acf(x, 1, true).rho[1], 0.0, 0.02);
  std::vector<double> sq;
  for (double v : x.values()) sq.push_back(v * v);
  EXPECT_GT(acf(TimeSeries(sq), 1, true).rho[1], 0.0);
}

TEST(Simulate, Ar1AcfDecaysGeometrically) {
  const TimeSeries x = simulate(ModelSpec::ar1(0.5), 100000, 1000, 31);
  const AcfEstimate e = acf(x, 10, true);
  // Least-squares slope of log|r_k| on k, k = 1..5 (beyond that the noise
  // floor 1/sqrt(n) dominates 0.5^k).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int K = 5;
  for (int k = 1; k <= K; ++k) {
    const double y = std::log(std::abs(e.rho[k]));
    sx += k;
    sy += y;
    sxx += k * k;
    sxy += k * y;
  }
  const double slope = (K * sxy - sx * sy) / (K * sxx - sx * sx);
  EXPECT_NEAR(slope, std::log(0.5), 0.1 * std::abs(std::log(0.5)));
}

TEST(Simulate, HalvesHaveSimilarVariance) {
  for (const ModelSpec& m : {ModelSpec::ar1(0.5), ModelSpec::arch(0.25, 0.25)}) {
    const TimeSeries x = simulate(m, 100000, 1000, 4);
    auto var = [&](std::size_t lo, std::size_t hi) {
      double mu = 0, v = 0;
      for (std::size_t i = lo; i < hi; ++i) mu += x[i];
      mu /= double(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) v += (x[i] - mu) * (x[i] - mu);
      return v / double(hi - lo);
    };
    const double ratio = var(0, 50000) / var(50000, 100000);
    EXPECT_GT(ratio, 0.9);
    EXPECT_LT(ratio, 1.1);
  }
}

TEST(Simulate, DistinctSeedsAreUncorrelated) {
  const TimeSeries a = simulate(ModelSpec::iid(), 100000, 0, 1);
  const TimeSeries b = simulate(ModelSpec::iid(), 100000, 0, 2);
  double c = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c += a[i] * b[i];
    va += a[i] * a[i];
    vb += b[i] * b[i];
  }
  EXPECT_LT(std::abs(c / std::sqrt(va * vb)), 4.0 / std::sqrt(100000.0));
}

TEST(Simulate, ParameterValidation) {
  EXPECT_THROW(simulate(ModelSpec::ar1(1.0), 10, 0, 1), InvalidParams);
  EXPECT_THROW(simulate(ModelSpec::bilinear(0.8, 0.7), 10, 0, 1), InvalidParams);
  EXPECT_THROW(simulate(ModelSpec::arch(0.0, 0.5), 10, 0, 1), InvalidParams);
  EXPECT_THROW(simulate(ModelSpec::arch(0.5, 1.0), 10, 0, 1), InvalidParams);
  EXPECT_THROW(simulate(ModelSpec::iid(), 0, 0, 1), InvalidParams);
  EXPECT_NO_THROW(simulate(ModelSpec::arch(0.5, 0.0), 10, 0, 1));
}

TEST(Simulate, OverflowIsReported) {
  EXPECT_THROW(check_overflow(2e12), Overflow);
  EXPECT_THROW(check_overflow(std::nan("")), Overflow);
  EXPECT_NO_THROW(check_overflow(-1e12));
}

TEST(Simulate, InitialStates) {
  EXPECT_EQ(initial_state(ModelSpec::ar1(0.3)), 0.0);
  EXPECT_EQ(initial_state(ModelSpec::bilinear(0.4, 0.4)), 0.0);
  EXPECT_DOUBLE_EQ(initial_state(ModelSpec::arch(0.25, 0.25)), std::sqrt(1.0 / 3.0));
}

TEST(TheoreticalAcf, ClosedForms) {
  const auto ar = *theoretical_acf(ModelSpec::ar1(0.5), 3);
  EXPECT_NEAR(ar[3], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(ar[0], 4.0 / 3.0, 1e-15);
  EXPECT_EQ((*theoretical_acf(ModelSpec::iid(), 0))[0], 1.0);
  const auto arch = *theoretical_acf(ModelSpec::arch(0.25, 0.25), 2);
  EXPECT_NEAR(arch[0], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(arch[1], 0.0);
  const auto bl = *theoretical_acf(ModelSpec::bilinear(0.4, 0.4), 2);
  EXPECT_NEAR(bl[0], 1.0 / 0.68, 1e-14);
  EXPECT_NEAR(bl[2], 0.16 / 0.68, 1e-14);
  const auto r = *theoretical_correlations(ModelSpec::ar1(0.5), 4);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_NEAR(r[3], 0.0625, 1e-15);
}

TEST(TheoreticalAcf, AgreesWithLongSimulation) {
  const TimeSeries x = simulate(ModelSpec::ar1(0.5), 1000000, 1000, 8);
  EXPECT_NEAR(acf_fast(x, 3, false).gamma[3], 1.0 / 6.0, 0.01);
  const TimeSeries y = simulate(ModelSpec::arch(0.25, 0.25), 1000000, 1000, 8);
  const AcfEstimate e = acf_fast(y, 1, false);
  EXPECT_NEAR(e.gamma[0], 1.0 / 3.0, 0.01);
  EXPECT_NEAR(e.gamma[1], 0.0, 0.01);
  const TimeSeries z = simulate(ModelSpec::bilinear(0.4, 0.2), 1000000, 1000, 8);
  const auto g = *theoretical_acf(ModelSpec::bilinear(0.4, 0.2), 2);
  const AcfEstimate f = acf_fast(z, 2, false);
  EXPECT_NEAR(f.rho[1], g[1] / g[0], 0.01);
  EXPECT_NEAR(f.rho[2], g[2] / g[0], 0.01);
}

TEST(ModelNames, RoundTrip) {
  for (ModelKind k : {ModelKind::IID, ModelKind::AR1, ModelKind::Bilinear, ModelKind::ARCH})
    EXPECT_EQ(parse_model_kind(model_name(k)), k);
  EXPECT_THROW(parse_model_kind("garch"), InvalidParams);
}
