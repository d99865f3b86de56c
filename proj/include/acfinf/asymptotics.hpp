#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "acfinf/error.hpp"
#include "acfinf/estimators.hpp"

namespace acfinf {

// ---------------------------------------------------------------------------
// Gumbel limit of normalized maxima
// ---------------------------------------------------------------------------

// Norming constants for the maximum of m standard normal magnitudes:
//   a = (2 log m)^{-1/2}
//   b = (2 log m)^{1/2} - (8 log m)^{-1/2} (log log m + log 4 pi)
// The max-deviation test over s lags uses m = 2s.
struct GumbelNorming {
  double a = 0.0;
  double b = 0.0;
  std::size_t m = 0;
};

inline GumbelNorming gumbel_norming(std::size_t m) {
  if (m < 2) throw InvalidIndex("gumbel_norming: index must be >= 2, got " + std::to_string(m));
  const double lm = std::log(static_cast<double>(m));
  GumbelNorming g;
  g.m = m;
  g.a = 1.0 / std::sqrt(2.0 * lm);
  g.b = std::sqrt(2.0 * lm) - (std::log(lm) + std::log(4.0 * std::numbers::pi)) / std::sqrt(8.0 * lm);
  return g;
}

inline double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

// 1 - gumbel_cdf(x) without cancellation in the upper tail.
inline double gumbel_sf(double x) { return -std::expm1(-std::exp(-x)); }

inline double gumbel_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidAlpha("gumbel_quantile: p must lie in (0, 1)");
  return -std::log(-std::log(p));
}

// ---------------------------------------------------------------------------
// Normal and chi-square tails
// ---------------------------------------------------------------------------

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Inverse of normal_cdf by bisection; the bracket is shrunk until its width
// is below 1e-12 (or stops changing in double precision).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidAlpha("normal_quantile: p must lie in (0, 1)");
  double lo = -40.0;
  double hi = 40.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (normal_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Upper tail P(chi^2_dof > x) via the regularized upper incomplete gamma.
inline double chi2_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

// ---------------------------------------------------------------------------
// Long-run variance sigma_h = sum_k gamma_k gamma_{k+h}
// ---------------------------------------------------------------------------

enum class Scale { Correlation, Covariance };

struct LongRunVariance {
  enum class Source { TheoreticalModel, PlugInSample };

  double sigma0 = 0.0;
  // sigma_h[h] for h = 0..sigma_h.size()-1; sigma_h[0] == sigma0.
  std::vector<double> sigma_h;
  std::size_t t_n = 0;
  Source source = Source::PlugInSample;
  Scale scale = Scale::Correlation;
  // gamma_0 (theoretical or sample), converts between the two scales.
  double gamma0 = 1.0;

  double sigma0_on(Scale target) const {
    if (target == scale) return sigma0;
    const double g2 = gamma0 * gamma0;
    return target == Scale::Covariance ? sigma0 * g2 : sigma0 / g2;
  }
};

namespace detail {

// gamma_j with gamma_{-j} = gamma_j and zero outside the stored support.
inline double even_at(std::span<const double> g, long j) {
  const std::size_t a = static_cast<std::size_t>(j < 0 ? -j : j);
  return a < g.size() ? g[a] : 0.0;
}

inline double truncated_sigma(std::span<const double> g, long h) {
  const long K = static_cast<long>(g.size()) - 1;
  double s = 0.0;
  for (long k = -K; k <= K; ++k) s += even_at(g, k) * even_at(g, k + h);
  return s;
}

}  // namespace detail

// sum_{k=-K}^{K} gamma_k gamma_{k+h} for gamma given at lags 0..K. The
// truncation is accepted only when |gamma_K| * sum_k |gamma_k| <= tail_tol.
inline double sigma_h_theoretical(std::span<const double> gamma, long h, double tail_tol = 1e-12) {
  if (gamma.empty()) throw LagOutOfRange("sigma_h_theoretical: gamma must hold at least lag 0");
  double abs_sum = std::abs(gamma[0]);
  for (std::size_t k = 1; k < gamma.size(); ++k) abs_sum += 2.0 * std::abs(gamma[k]);
  const double tail = std::abs(gamma.back()) * abs_sum;
  if (gamma.size() > 1 && tail > tail_tol)
    throw InsufficientTail("sigma_h_theoretical: truncation error bound " + std::to_string(tail) +
                           " exceeds tolerance");
  return detail::truncated_sigma(gamma, h);
}

inline LongRunVariance long_run_variance_theoretical(std::span<const double> gamma, std::size_t h_max,
                                                     double tail_tol = 1e-12) {
  LongRunVariance out;
  out.source = LongRunVariance::Source::TheoreticalModel;
  out.scale = Scale::Covariance;
  out.gamma0 = gamma.empty() ? 1.0 : gamma[0];
  out.t_n = gamma.empty() ? 0 : gamma.size() - 1;
  out.sigma_h.resize(h_max + 1);
  for (std::size_t h = 0; h <= h_max; ++h)
    out.sigma_h[h] = sigma_h_theoretical(gamma, static_cast<long>(h), tail_tol);
  out.sigma0 = out.sigma_h[0];
  return out;
}

// t_n = floor(n^{1/3}) computed in integers.
inline std::size_t cube_root_floor(std::size_t n) {
  auto t = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(n))));
  while (t > 0 && t * t * t > n) --t;
  while ((t + 1) * (t + 1) * (t + 1) <= n) ++t;
  return t;
}

// Plug-in sigma_0 on the correlation scale: sum_{|k|<=t_n} rho_k^2 =
// 1 + 2 sum_{k=1}^{t_n} rho_k^2. sigma_h[h] is the same truncated sum
// sum_{|k|<=t_n} rho_k rho_{k+h} with rho zero beyond t_n, so
// |sigma_h| <= sigma_0 holds exactly by Cauchy-Schwarz. No taper is applied.
inline LongRunVariance sigma0_plugin(const AcfEstimate& acf, std::size_t t_n) {
  if (t_n > acf.max_lag)
    throw LagOutOfRange("sigma0_plugin: t_n " + std::to_string(t_n) + " exceeds max_lag " +
                        std::to_string(acf.max_lag));
  const std::span<const double> r(acf.rho.data(), t_n + 1);
  LongRunVariance out;
  out.source = LongRunVariance::Source::PlugInSample;
  out.scale = Scale::Correlation;
  out.gamma0 = acf.gamma[0];
  out.t_n = t_n;
  out.sigma_h.resize(t_n + 1);
  double s0 = 1.0;
  for (std::size_t k = 1; k <= t_n; ++k) s0 += 2.0 * r[k] * r[k];
  out.sigma_h[0] = s0;
  for (std::size_t h = 1; h <= t_n; ++h) out.sigma_h[h] = detail::truncated_sigma(r, static_cast<long>(h));
  out.sigma0 = s0;
  return out;
}

// Plug-in for the limiting variance 2 sum_{|k|<=h_max} sigma_k^2 of the
// unbounded-lag Box-Pierce statistic, where
//   sigma_k = sum_{|j|<=t_n} gamma_j gamma_{j+k}
// uses sample autocovariances up to lag t_n + h_max. The correlation scale
// divides by gamma_0^4. A sum of squares, so never negative.
inline double l2_variance_plugin(const AcfEstimate& acf, std::size_t t_n, std::size_t h_max,
                                 Scale scale = Scale::Covariance) {
  if (t_n + h_max > acf.max_lag)
    throw LagOutOfRange("l2_variance_plugin: t_n + h_max = " + std::to_string(t_n + h_max) +
                        " exceeds max_lag " + std::to_string(acf.max_lag));
  const std::span<const double> g(acf.gamma);
  const long t = static_cast<long>(t_n);
  auto sigma = [&](long k) {
    double s = 0.0;
    for (long j = -t; j <= t; ++j) s += detail::even_at(g, j) * detail::even_at(g, j + k);
    return s;
  };
  double total = sigma(0) * sigma(0);
  for (std::size_t k = 1; k <= h_max; ++k) {
    const double sk = sigma(static_cast<long>(k));
    total += 2.0 * sk * sk;
  }
  double v = 2.0 * total;
  if (scale == Scale::Correlation) {
    const double g0 = acf.gamma[0];
    v /= g0 * g0 * g0 * g0;
  }
  return v;
}

}  // namespace acfinf
