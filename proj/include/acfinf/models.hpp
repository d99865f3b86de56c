#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acfinf/error.hpp"
#include "acfinf/rng.hpp"
#include "acfinf/time_series.hpp"

namespace acfinf {

// The four data-generating processes, all driven by iid N(0,1) innovations:
//   IID       X_i = e_i
//   AR1       X_i = b X_{i-1} + e_i
//   Bilinear  X_i = (a + b e_i) X_{i-1} + e_i
//   ARCH      X_i = sqrt(a + b X_{i-1}^2) e_i
enum class ModelKind { IID, AR1, Bilinear, ARCH };

struct ModelSpec {
  ModelKind kind = ModelKind::IID;
  double a = 0.0;
  double b = 0.0;

  static ModelSpec iid() { return {ModelKind::IID, 0.0, 0.0}; }
  static ModelSpec ar1(double b) { return {ModelKind::AR1, 0.0, b}; }
  static ModelSpec bilinear(double a, double b) { return {ModelKind::Bilinear, a, b}; }
  static ModelSpec arch(double a, double b) { return {ModelKind::ARCH, a, b}; }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline constexpr double kOverflowLimit = 1e12;
inline constexpr std::size_t kDefaultBurnIn = 1000;

inline std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::IID: return "iid";
    case ModelKind::AR1: return "ar1";
    case ModelKind::Bilinear: return "bilinear";
    case ModelKind::ARCH: return "arch";
  }
  return "unknown";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "iid") return ModelKind::IID;
  if (s == "ar1") return ModelKind::AR1;
  if (s == "bilinear") return ModelKind::Bilinear;
  if (s == "arch") return ModelKind::ARCH;
  throw InvalidParams("unknown model '" + s + "' (expected iid, ar1, bilinear or arch)");
}

// Stationarity (AR1), finite second moment (Bilinear: a^2 + b^2 < 1) and
// positivity (ARCH: a > 0, 0 <= b < 1).
inline void validate(const ModelSpec& m) {
  auto finite = std::isfinite(m.a) && std::isfinite(m.b);
  if (!finite) throw InvalidParams("model parameters must be finite");
  switch (m.kind) {
    case ModelKind::IID:
      return;
    case ModelKind::AR1:
      if (!(std::abs(m.b) < 1.0)) throw InvalidParams("AR1 requires |b| < 1");
      return;
    case ModelKind::Bilinear:
      if (!(m.a * m.a + m.b * m.b < 1.0)) throw InvalidParams("Bilinear requires a^2 + b^2 < 1");
      return;
    case ModelKind::ARCH:
      if (!(m.a > 0.0 && m.b >= 0.0 && m.b < 1.0)) throw InvalidParams("ARCH requires a > 0 and 0 <= b < 1");
      return;
  }
}

// Pre-sample state X_0: 0 for AR1/Bilinear, the stationary standard
// deviation sqrt(a / (1 - b)) for ARCH.
inline double initial_state(const ModelSpec& m) {
  return m.kind == ModelKind::ARCH ? std::sqrt(m.a / (1.0 - m.b)) : 0.0;
}

inline double step(const ModelSpec& m, double prev, double eps) {
  switch (m.kind) {
    case ModelKind::IID: return eps;
    case ModelKind::AR1: return m.b * prev + eps;
    case ModelKind::Bilinear: return (m.a + m.b * eps) * prev + eps;
    case ModelKind::ARCH: return std::sqrt(m.a + m.b * prev * prev) * eps;
  }
  return eps;
}

inline void check_overflow(double x) {
  if (!(std::abs(x) <= kOverflowLimit))
    throw Overflow("simulated value exceeds " + std::to_string(kOverflowLimit) + " in magnitude");
}

// Runs burn_in + n steps from initial_state and keeps the last n values.
// Deterministic in (model, n, burn_in, seed).
inline TimeSeries simulate(const ModelSpec& model, std::size_t n, std::size_t burn_in, std::uint64_t seed) {
  validate(model);
  if (n == 0) throw InvalidParams("simulate: n must be >= 1");
  RandomStream rng(seed);
  double x = initial_state(model);
  for (std::size_t i = 0; i < burn_in; ++i) {
    x = step(model, x, rng.normal());
    check_overflow(x);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    x = step(model, x, rng.normal());
    check_overflow(x);
    out[i] = x;
  }
  return TimeSeries(std::move(out));
}

// Autocovariances gamma_0..gamma_max_lag of the stationary process.
//   IID:      (1, 0, 0, ...)
//   AR1:      b^k / (1 - b^2)
//   Bilinear: a^k / (1 - a^2 - b^2)   (E[X_i X_{i-k}] = a gamma_{k-1} since e_i
//                                      is independent of the past and centred)
//   ARCH:     (a / (1 - b), 0, 0, ...)
// The optional return leaves room for processes without a closed form.
inline std::optional<std::vector<double>> theoretical_acf(const ModelSpec& model, std::size_t max_lag) {
  validate(model);
  std::vector<double> g(max_lag + 1, 0.0);
  switch (model.kind) {
    case ModelKind::IID:
      g[0] = 1.0;
      break;
    case ModelKind::AR1:
    case ModelKind::Bilinear: {
      const double coef = model.kind == ModelKind::AR1 ? model.b : model.a;
      const double g0 = 1.0 / (model.kind == ModelKind::AR1 ? 1.0 - model.b * model.b
                                                            : 1.0 - model.a * model.a - model.b * model.b);
      double p = 1.0;
      for (std::size_t k = 0; k <= max_lag; ++k) {
        g[k] = p * g0;
        p *= coef;
      }
      break;
    }
    case ModelKind::ARCH:
      g[0] = model.a / (1.0 - model.b);
      break;
  }
  return g;
}

// Autocorrelations r_1..r_s of the model (lag 1 first), the null used when
// testing a correctly specified model.
inline std::optional<std::vector<double>> theoretical_correlations(const ModelSpec& model, std::size_t s) {
  auto g = theoretical_acf(model, s);
  if (!g) return std::nullopt;
  std::vector<double> r(s);
  for (std::size_t k = 1; k <= s; ++k) r[k - 1] = (*g)[k] / (*g)[0];
  return r;
}

}  // namespace acfinf
