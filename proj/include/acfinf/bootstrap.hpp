#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "acfinf/correlation_tests.hpp"
#include "acfinf/error.hpp"
#include "acfinf/parallel.hpp"
#include "acfinf/rng.hpp"
#include "acfinf/time_series.hpp"

namespace acfinf {

// Blocks-of-blocks bootstrap for the max-deviation tests.
//
// The lag-augmented vectors are Y_i = (X_i, ..., X_{i+s}), i = 1..n-s, and the
// overlapping blocks are B_j = (Y_j, ..., Y_{j+b-1}), j = 1..J with
// J = n - s - b + 1. One bootstrap replicate draws h = ceil(n / b) blocks
// uniformly with replacement, lays them end to end and keeps the first n
// vectors. Y vectors are never materialized; they are index ranges into the
// (mean-removed) series.

struct BootstrapConfig {
  std::size_t s_n = 0;
  std::size_t block_len = 1;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  // Truncation for sigma_0*; 0 selects min(floor(n^{1/3}), s_n).
  std::size_t t_n = 0;

  friend bool operator==(const BootstrapConfig&, const BootstrapConfig&) = default;
};

struct BootstrapReport {
  double observed_M = 0.0;
  double observed_selfnorm = 0.0;
  std::vector<double> replicate_M;
  std::vector<double> replicate_selfnorm;
  double p_value_M = 1.0;
  double p_value_selfnorm = 1.0;
  // r_e[k], k = 0..s_n, correlations of the bootstrap population; r_e[0] = 1.
  std::vector<double> r_e;
  BootstrapConfig config;

  friend bool operator==(const BootstrapReport&, const BootstrapReport&) = default;
};

struct ReplicateStatistic {
  double M = 0.0;
  double selfnorm = 0.0;
};

namespace detail {

inline std::size_t block_count(std::size_t n, std::size_t s_n, std::size_t block_len) {
  if (block_len == 0) throw InvalidParams("bootstrap: block_len must be >= 1");
  if (s_n + block_len > n)
    throw InsufficientData("bootstrap: no block fits (s_n + block_len = " + std::to_string(s_n + block_len) +
                           " > n = " + std::to_string(n) + ")");
  return n - s_n - block_len + 1;
}

}  // namespace detail

// r_k^(e) = Cov#(Y^1, Y^{k+1}) / sqrt(Cov#(Y^1, Y^1) Cov#(Y^{k+1}, Y^{k+1}))
// where # is the uniform law over (block, column) pairs. Vector Y_i is picked
// with probability w_i = #{(j, t) : j + t - 1 = i} / (J b).
inline std::vector<double> bob_population_correlations(const TimeSeries& series, std::size_t s_n,
                                                       std::size_t block_len) {
  const std::size_t n = series.size();
  const std::size_t J = detail::block_count(n, s_n, block_len);
  const std::size_t n_vec = n - s_n;
  const auto x = series.values();

  // 0-based: vector i is covered by blocks j in [max(0, i-b+1), min(i, J-1)].
  std::vector<double> w(n_vec);
  const double total = static_cast<double>(J) * static_cast<double>(block_len);
  for (std::size_t i = 0; i < n_vec; ++i) {
    const std::size_t lo = i + 1 >= block_len ? i + 1 - block_len : 0;
    const std::size_t hi = std::min(i, J - 1);
    w[i] = static_cast<double>(hi - lo + 1) / total;
  }

  std::vector<double> mean(s_n + 1, 0.0);
  for (std::size_t k = 0; k <= s_n; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < n_vec; ++i) m += w[i] * x[i + k];
    mean[k] = m;
  }
  std::vector<double> var(s_n + 1, 0.0);
  for (std::size_t k = 0; k <= s_n; ++k) {
    double v = 0.0, raw = 0.0;
    for (std::size_t i = 0; i < n_vec; ++i) {
      const double d = x[i + k] - mean[k];
      v += w[i] * d * d;
      raw += w[i] * x[i + k] * x[i + k];
    }
    // A constant coordinate leaves only rounding noise in v.
    if (!(v > 1e-20 * raw)) throw DegenerateSeries("bootstrap: a coordinate of Y has zero bootstrap variance");
    var[k] = v;
  }
  std::vector<double> r(s_n + 1);
  r[0] = 1.0;
  for (std::size_t k = 1; k <= s_n; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < n_vec; ++i) c += w[i] * (x[i] - mean[0]) * (x[i + k] - mean[k]);
    r[k] = std::clamp(c / std::sqrt(var[0] * var[k]), -1.0, 1.0);
  }
  return r;
}

// Precomputed state for drawing replicates of (M*, M*/sqrt(sigma_0*)).
class BlocksOfBlocks {
public:
  BlocksOfBlocks(const TimeSeries& series, std::size_t s_n, std::size_t block_len, std::size_t t_n)
      : n_(series.size()),
        s_n_(s_n),
        block_len_(block_len),
        blocks_(detail::block_count(series.size(), s_n, block_len)),
        t_n_(t_n),
        r_e_(bob_population_correlations(series, s_n, block_len)) {
    if (t_n_ > s_n_) throw LagOutOfRange("bootstrap: t_n must not exceed s_n");
    // Pearson correlations are shift invariant; removing the mean first keeps
    // the one-pass sums well conditioned.
    const double m = series.mean();
    x_.reserve(n_);
    for (double v : series.values()) x_.push_back(v - m);
  }

  std::size_t n() const { return n_; }
  std::size_t s_n() const { return s_n_; }
  std::size_t t_n() const { return t_n_; }
  std::size_t block_count() const { return blocks_; }
  const std::vector<double>& population_correlations() const { return r_e_; }

  // Draws one resample with `rng` and returns its statistics. The n
  // resampled vectors are treated as an iid sample; r*_k is the Pearson
  // correlation between coordinates 1 and k+1.
  ReplicateStatistic draw(RandomStream& rng) const {
    const std::size_t h = (n_ + block_len_ - 1) / block_len_;
    const std::size_t s = s_n_;
    std::vector<double> sum_xy(s + 1, 0.0), sum_y(s + 1, 0.0), sum_yy(s + 1, 0.0);
    std::size_t filled = 0;
    for (std::size_t blk = 0; blk < h && filled < n_; ++blk) {
      const std::size_t start = static_cast<std::size_t>(rng.below(blocks_));
      const std::size_t len = std::min(block_len_, n_ - filled);
      const double* base = x_.data() + start;
      for (std::size_t k = 0; k <= s; ++k) {
        const double* lag = base + k;
        double a = 0.0, b = 0.0, c = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
          a += base[t] * lag[t];
          b += lag[t];
          c += lag[t] * lag[t];
        }
        sum_xy[k] += a;
        sum_y[k] += b;
        sum_yy[k] += c;
      }
      filled += len;
    }

    const double nd = static_cast<double>(n_);
    const double var0 = sum_yy[0] - sum_y[0] * sum_y[0] / nd;
    if (!(var0 > 0.0)) throw DegenerateSeries("bootstrap: resample has a constant first coordinate");
    ReplicateStatistic out;
    double sigma0 = 1.0;
    for (std::size_t k = 1; k <= s; ++k) {
      const double vark = sum_yy[k] - sum_y[k] * sum_y[k] / nd;
      if (!(vark > 0.0)) throw DegenerateSeries("bootstrap: resample has a constant coordinate");
      const double cov = sum_xy[k] - sum_y[0] * sum_y[k] / nd;
      const double r = cov / std::sqrt(var0 * vark);
      out.M = std::max(out.M, std::abs(r - r_e_[k]));
      if (k <= t_n_) sigma0 += 2.0 * r * r;
    }
    out.selfnorm = out.M / std::sqrt(sigma0);
    return out;
  }

private:
  std::size_t n_;
  std::size_t s_n_;
  std::size_t block_len_;
  std::size_t blocks_;
  std::size_t t_n_;
  std::vector<double> r_e_;
  std::vector<double> x_;
};

// Full bootstrap test. The observed M_n and its self-normalized version are
// centred by the user's null (via max_test); replicates are centred by r^(e).
// Replicate i uses the stream derive_seed(config.seed, i), so the report is
// the same for every thread count. p-values count strict exceedances:
// #(M* > M) / N.
inline BootstrapReport bob_test(const TimeSeries& series, const BootstrapConfig& config,
                                const NullSpec& null = NullSpec::white(), const MaxTestOptions& options = {},
                                unsigned threads = 1) {
  if (config.replicates < 1) throw InvalidParams("bootstrap: replicates must be >= 1");
  detail::block_count(series.size(), config.s_n, config.block_len);

  BootstrapReport report;
  report.config = config;
  if (report.config.t_n == 0) report.config.t_n = selfnorm_truncation(series.size(), config.s_n);

  const MaxTestResult observed = max_test(series, config.s_n, null, options);
  report.observed_M = observed.M;
  report.observed_selfnorm = observed.M_selfnorm;

  const BlocksOfBlocks bob(series, config.s_n, config.block_len, report.config.t_n);
  report.r_e = bob.population_correlations();

  const std::size_t N = config.replicates;
  report.replicate_M.resize(N);
  report.replicate_selfnorm.resize(N);
  parallel_for(N, resolve_threads(threads), [&](std::size_t i) {
    RandomStream rng = make_stream(config.seed, i);
    const ReplicateStatistic st = bob.draw(rng);
    report.replicate_M[i] = st.M;
    report.replicate_selfnorm[i] = st.selfnorm;
  });

  std::size_t above_m = 0, above_s = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (report.replicate_M[i] > report.observed_M) ++above_m;
    if (report.replicate_selfnorm[i] > report.observed_selfnorm) ++above_s;
  }
  report.p_value_M = static_cast<double>(above_m) / static_cast<double>(N);
  report.p_value_selfnorm = static_cast<double>(above_s) / static_cast<double>(N);
  return report;
}

}  // namespace acfinf
