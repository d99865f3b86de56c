#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <fftw3.h>

#include "acfinf/error.hpp"
#include "acfinf/time_series.hpp"

namespace acfinf {

// Sample autocovariances gamma[0..max_lag] and autocorrelations
// rho[k] = gamma[k] / gamma[0].
//
// The divisor is n for every lag, so E gamma[k] = (1 - k/n) gamma_k for a
// zero-mean process. With `centered`, every factor (the lagged one too) has
// the full-sample mean subtracted. Negative lags follow by symmetry,
// gamma[-k] = gamma[k], and are not stored.
struct AcfEstimate {
  std::size_t max_lag = 0;
  std::vector<double> gamma;
  std::vector<double> rho;
  bool centered = false;
  std::size_t n = 0;

  // Builds an estimate directly from autocovariances. Used by the test
  // seams of the tests module; rho is derived here.
  static AcfEstimate from_gamma(std::vector<double> gamma, std::size_t n, bool centered) {
    if (gamma.empty()) throw LagOutOfRange("AcfEstimate: gamma must hold at least lag 0");
    if (!(gamma[0] > 0.0)) throw DegenerateSeries("AcfEstimate: gamma[0] must be positive");
    AcfEstimate out;
    out.max_lag = gamma.size() - 1;
    out.n = n;
    out.centered = centered;
    out.rho.resize(gamma.size());
    out.rho[0] = 1.0;
    for (std::size_t k = 1; k < gamma.size(); ++k) out.rho[k] = gamma[k] / gamma[0];
    out.gamma = std::move(gamma);
    return out;
  }
};

inline constexpr double kRhoTolerance = 1e-12;

namespace detail {

inline void check_acf_args(const TimeSeries& series, std::size_t max_lag) {
  if (max_lag >= series.size())
    throw LagOutOfRange("acf: max_lag " + std::to_string(max_lag) + " must be < n = " +
                        std::to_string(series.size()));
}

inline std::vector<double> demeaned(const TimeSeries& series, bool centered) {
  std::vector<double> y(series.values().begin(), series.values().end());
  if (centered) {
    const double m = series.mean();
    for (double& v : y) v -= m;
  }
  return y;
}

inline AcfEstimate finish(std::vector<double> gamma, std::size_t n, bool centered) {
  if (!(gamma[0] > 0.0))
    throw DegenerateSeries(centered ? "acf: constant series has zero centered variance"
                                    : "acf: all-zero series has zero variance");
  return AcfEstimate::from_gamma(std::move(gamma), n, centered);
}

// FFTW plans for real transforms of length `len`. Plan creation is not
// thread-safe in FFTW, so it is serialized here; executing a plan through the
// new-array interface is. FFTW_ESTIMATE keeps the chosen plan (and therefore
// the rounding) identical between runs.
class FftPlans {
public:
  struct Pair {
    fftw_plan forward;
    fftw_plan backward;
  };

  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  Pair get(std::size_t len) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(len);
    if (it != plans_.end()) return it->second;
    double* real = fftw_alloc_real(len);
    fftw_complex* spec = fftw_alloc_complex(len / 2 + 1);
    const int n = static_cast<int>(len);
    Pair p{fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE),
           fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE)};
    fftw_free(real);
    fftw_free(spec);
    plans_.emplace(len, p);
    return p;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  ~FftPlans() {
    for (auto& [len, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

private:
  FftPlans() = default;
  std::mutex mutex_;
  std::map<std::size_t, Pair> plans_;
};

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

}  // namespace detail

// Direct O(n * max_lag) evaluation.
inline AcfEstimate acf(const TimeSeries& series, std::size_t max_lag, bool centered) {
  detail::check_acf_args(series, max_lag);
  const std::size_t n = series.size();
  const std::vector<double> y = detail::demeaned(series, centered);
  std::vector<double> gamma(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t i = k; i < n; ++i) s += y[i - k] * y[i];
    gamma[k] = s / static_cast<double>(n);
  }
  return detail::finish(std::move(gamma), n, centered);
}

// Same contract as acf, evaluated through a zero-padded real FFT of length
// L = next power of two >= 2n, so the circular correlation has no
// wrap-around. O(n log n) regardless of max_lag.
inline AcfEstimate acf_fast(const TimeSeries& series, std::size_t max_lag, bool centered) {
  detail::check_acf_args(series, max_lag);
  const std::size_t n = series.size();
  std::size_t len = 2;
  while (len < 2 * n) len <<= 1;
  const std::size_t n_freq = len / 2 + 1;

  std::unique_ptr<double, detail::FftwFree> buf(fftw_alloc_real(len));
  std::unique_ptr<fftw_complex, detail::FftwFree> spec(fftw_alloc_complex(n_freq));
  if (!buf || !spec) throw std::bad_alloc();

  double* x = buf.get();
  const double m = centered ? series.mean() : 0.0;
  const auto values = series.values();
  for (std::size_t i = 0; i < n; ++i) x[i] = values[i] - m;
  for (std::size_t i = n; i < len; ++i) x[i] = 0.0;

  const auto plans = detail::FftPlans::instance().get(len);
  fftw_execute_dft_r2c(plans.forward, x, spec.get());
  for (std::size_t f = 0; f < n_freq; ++f) {
    const double re = spec.get()[f][0];
    const double im = spec.get()[f][1];
    spec.get()[f][0] = re * re + im * im;
    spec.get()[f][1] = 0.0;
  }
  fftw_execute_dft_c2r(plans.backward, spec.get(), x);

  const double scale = 1.0 / (static_cast<double>(len) * static_cast<double>(n));
  std::vector<double> gamma(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) gamma[k] = x[k] * scale;
  return detail::finish(std::move(gamma), n, centered);
}

enum class AcfMethod { Auto, Direct, Fast };

// Picks the direct loop when it is cheaper than the transform.
inline AcfEstimate compute_acf(const TimeSeries& series, std::size_t max_lag, bool centered,
                               AcfMethod method = AcfMethod::Auto) {
  switch (method) {
    case AcfMethod::Direct:
      return acf(series, max_lag, centered);
    case AcfMethod::Fast:
      return acf_fast(series, max_lag, centered);
    case AcfMethod::Auto:
      break;
  }
  return max_lag < 64 ? acf(series, max_lag, centered) : acf_fast(series, max_lag, centered);
}

}  // namespace acfinf
