#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "acfinf/error.hpp"
#include "acfinf/models.hpp"
#include "acfinf/parallel.hpp"
#include "acfinf/rng.hpp"

namespace acfinf {

// Physical dependence measures of a simulated model.
//
//   delta_p(i) = || X_i - X_i' ||_p
//
// where X' is the same process with the innovation e_0 replaced by an iid
// copy e_0'. theta_tail[m] = sum_{i=m}^{i_max} delta_p(i) + remainder, and
// psi_tail[m] = (sum_{i=m}^{i_max} delta_p(i)^{p'})^{1/p'}, p' = min(p, 2),
// without remainder. The mixed tail
//   Delta_p(m) = sum_i min{C_p Psi_p(m), delta_p(i)}
// needs the Burkholder constant C_p and is not estimated.
struct DependenceProfile {
  double p = 2.0;
  std::vector<double> delta;
  std::vector<double> theta_tail;
  std::vector<double> psi_tail;
  // Geometric extrapolation of sum_{i>i_max} delta_p(i) from the ratio of
  // the last ten estimates; zero and flagged unreliable when the estimates
  // do not decay.
  double remainder = 0.0;
  bool remainder_reliable = true;
  std::size_t replicates = 0;
  ModelSpec model;
};

inline constexpr std::size_t kDefaultDeltaLags = 50;

namespace detail {

inline void fill_tails(DependenceProfile& prof) {
  const std::size_t m = prof.delta.size();
  if (m >= 10) {
    const double last = prof.delta[m - 1];
    const double first = prof.delta[m - 10];
    if (last == 0.0) {
      prof.remainder = 0.0;
    } else if (first > 0.0 && last < first) {
      const double ratio = std::pow(last / first, 1.0 / 9.0);
      prof.remainder = last * ratio / (1.0 - ratio);
    } else {
      prof.remainder = 0.0;
      prof.remainder_reliable = false;
    }
  } else {
    prof.remainder_reliable = false;
  }

  const double pp = std::min(prof.p, 2.0);
  prof.theta_tail.assign(m, 0.0);
  prof.psi_tail.assign(m, 0.0);
  double theta = prof.remainder;
  double psi = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    theta += prof.delta[i];
    psi += std::pow(prof.delta[i], pp);
    prof.theta_tail[i] = theta;
    prof.psi_tail[i] = std::pow(psi, 1.0 / pp);
  }
}

}  // namespace detail

// Each replicate runs a shared pre-history of burn_in steps, then two paths
// that differ only in the innovation at time 0 and share e_1..e_{i_max}.
// Replicate r draws from derive_seed(seed, r); per-replicate contributions
// are summed in replicate order so any thread count gives the same bits.
inline DependenceProfile estimate_delta(const ModelSpec& model, double p, std::size_t i_max,
                                        std::size_t replicates, std::uint64_t seed, unsigned threads = 1,
                                        std::size_t burn_in = kDefaultBurnIn) {
  validate(model);
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidParams("estimate_delta: p must be >= 1");
  if (replicates < 1000) throw InvalidParams("estimate_delta: need at least 1000 replicates");

  const std::size_t width = i_max + 1;
  std::vector<double> contrib(replicates * width);
  parallel_for(replicates, resolve_threads(threads), [&](std::size_t r) {
    RandomStream rng = make_stream(seed, r);
    double x = initial_state(model);
    for (std::size_t t = 0; t < burn_in; ++t) {
      x = step(model, x, rng.normal());
      check_overflow(x);
    }
    const double e0 = rng.normal();
    const double e0_copy = rng.normal();
    double a = step(model, x, e0);
    double b = step(model, x, e0_copy);
    double* row = contrib.data() + r * width;
    for (std::size_t i = 0; i <= i_max; ++i) {
      if (i > 0) {
        const double e = rng.normal();
        a = step(model, a, e);
        b = step(model, b, e);
      }
      check_overflow(a);
      check_overflow(b);
      row[i] = std::pow(std::abs(a - b), p);
    }
  });

  DependenceProfile prof;
  prof.p = p;
  prof.replicates = replicates;
  prof.model = model;
  prof.delta.assign(width, 0.0);
  for (std::size_t r = 0; r < replicates; ++r)
    for (std::size_t i = 0; i < width; ++i) prof.delta[i] += contrib[r * width + i];
  for (double& d : prof.delta) d = std::pow(d / static_cast<double>(replicates), 1.0 / p);
  detail::fill_tails(prof);
  return prof;
}

// zeta_p(k) = sum_j delta_p(j) delta_p(j + k), truncated at the profile's
// i_max. For p = 2 it bounds |gamma_k|.
inline double zeta_bound(const DependenceProfile& prof, std::size_t k) {
  if (k >= prof.delta.size()) throw LagOutOfRange("zeta_bound: k exceeds the profile's i_max");
  double s = 0.0;
  for (std::size_t j = 0; j + k < prof.delta.size(); ++j) s += prof.delta[j] * prof.delta[j + k];
  return s;
}

// ---------------------------------------------------------------------------
// Joint cumulants
// ---------------------------------------------------------------------------

// Plug-in joint cumulant of the columns Y_1..Y_k (k = 2, 3, 4):
//   sum over set partitions {v_1..v_p} of (-1)^{p-1} (p-1)! prod_j mean(prod_{i in v_j} Y_i)
// with raw (uncentred) sample moments.
inline double joint_cumulant(const std::vector<std::vector<double>>& columns) {
  const std::size_t k = columns.size();
  if (k < 2 || k > 4) throw BadShape("joint_cumulant: order must be 2, 3 or 4, got " + std::to_string(k));
  const std::size_t rows = columns[0].size();
  for (const auto& c : columns)
    if (c.size() != rows) throw BadShape("joint_cumulant: columns differ in length");
  if (rows < k) throw BadShape("joint_cumulant: need at least k rows");

  // Sample mean of the product over every non-empty subset (bitmask).
  const std::size_t n_masks = std::size_t{1} << k;
  std::array<double, 16> moment{};
  for (std::size_t mask = 1; mask < n_masks; ++mask) {
    double s = 0.0;
    for (std::size_t row = 0; row < rows; ++row) {
      double prod = 1.0;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (std::size_t{1} << i)) prod *= columns[i][row];
      s += prod;
    }
    moment[mask] = s / static_cast<double>(rows);
  }

  // Walk set partitions as restricted growth strings: label[0] = 0 and
  // label[i] <= 1 + max(label[0..i-1]).
  std::array<std::size_t, 4> label{};
  double total = 0.0;
  for (;;) {
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < k; ++i) blocks = std::max(blocks, label[i] + 1);
    double term = 1.0;
    for (std::size_t bl = 0; bl < blocks; ++bl) {
      std::size_t mask = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (label[i] == bl) mask |= std::size_t{1} << i;
      term *= moment[mask];
    }
    double coef = (blocks % 2 == 1) ? 1.0 : -1.0;
    for (std::size_t f = 2; f < blocks; ++f) coef *= static_cast<double>(f);
    total += coef * term;

    // Next restricted growth string.
    std::size_t i = k;
    for (;;) {
      if (--i == 0) return total;
      std::size_t prefix_max = 0;
      for (std::size_t j = 0; j < i; ++j) prefix_max = std::max(prefix_max, label[j]);
      if (label[i] <= prefix_max) {
        ++label[i];
        for (std::size_t j = i + 1; j < k; ++j) label[j] = 0;
        break;
      }
    }
  }
}

inline double joint_cumulant(const std::vector<std::vector<double>>& columns, std::size_t k) {
  if (k != columns.size())
    throw BadShape("joint_cumulant: k = " + std::to_string(k) + " but " + std::to_string(columns.size()) +
                   " columns given");
  return joint_cumulant(columns);
}

}  // namespace acfinf
