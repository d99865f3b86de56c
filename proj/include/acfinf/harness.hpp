#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "acfinf/asymptotics.hpp"
#include "acfinf/bootstrap.hpp"
#include "acfinf/correlation_tests.hpp"
#include "acfinf/error.hpp"
#include "acfinf/models.hpp"
#include "acfinf/parallel.hpp"
#include "acfinf/rng.hpp"

namespace acfinf {

// Monte Carlo experiments: simulate a model, apply one or more tests at
// several lag counts, and tabulate rejection rates.
//
// Outer replicate r simulates its series from derive_seed(seed, r); the
// bootstrap for lag index j of that replicate uses
// derive_seed(derive_seed(seed, r), j + 1) as its BootstrapConfig seed.
// Every replicate is independent of the others and its outcome is stored
// by index, so any number of threads produces the same report.

enum class TestKind { AsymptoticMax, BobM, BobSelfNorm, L2Normal };

inline std::string test_name(TestKind t) {
  switch (t) {
    case TestKind::AsymptoticMax: return "asymptotic_max";
    case TestKind::BobM: return "bob_m";
    case TestKind::BobSelfNorm: return "bob_selfnorm";
    case TestKind::L2Normal: return "l2_normal";
  }
  return "unknown";
}

inline TestKind parse_test_kind(const std::string& s) {
  if (s == "asymptotic_max") return TestKind::AsymptoticMax;
  if (s == "bob_m") return TestKind::BobM;
  if (s == "bob_selfnorm") return TestKind::BobSelfNorm;
  if (s == "l2_normal") return TestKind::L2Normal;
  throw ConfigError("unknown test '" + s + "' (expected asymptotic_max, bob_m, bob_selfnorm or l2_normal)");
}

struct BootstrapSettings {
  std::size_t block_len = 10;
  std::size_t replicates = 199;

  friend bool operator==(const BootstrapSettings&, const BootstrapSettings&) = default;
};

struct ExperimentConfig {
  ModelSpec model = ModelSpec::iid();
  std::size_t n = 1800;
  std::vector<std::size_t> s_n_list{12};
  std::vector<TestKind> tests{TestKind::AsymptoticMax};
  std::vector<double> nominal_levels{0.01, 0.05, 0.10};
  std::size_t outer_replicates = 500;
  std::optional<BootstrapSettings> bootstrap;
  std::uint64_t seed = 1;
  // 0 = ACF_THREADS or hardware concurrency.
  unsigned threads = 0;
  std::size_t burn_in = kDefaultBurnIn;
  // Record the sorted Gumbel-normalized statistics of the asymptotic test.
  bool record_ecdf = false;
  // Mean-adjusted estimator; false uses the raw estimator.
  bool centered = true;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct RejectionRow {
  std::size_t s_n = 0;
  TestKind test = TestKind::AsymptoticMax;
  std::vector<double> rates;  // one per nominal level
  std::vector<double> se;     // sqrt(p (1 - p) / R)
  std::vector<double> ecdf;   // sorted statistics, only when recorded
  std::optional<double> ks_gumbel;

  friend bool operator==(const RejectionRow&, const RejectionRow&) = default;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RejectionRow> rows;
  std::string config_hash;
  double wall_time = 0.0;

  friend bool operator==(const ExperimentResult&, const ExperimentResult&) = default;
};

// Kolmogorov-Smirnov distance between the empirical law of a sorted sample
// and a continuous CDF.
template <typename Cdf>
double ks_distance(const std::vector<double>& sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// ---------------------------------------------------------------------------
// JSON (config schema documented in docs/montecarlo_config.md)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ModelSpec& m) {
  return {{"kind", model_name(m.kind)}, {"a", m.a}, {"b", m.b}};
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
  ModelSpec m;
  m.kind = parse_model_kind(j.at("kind").get<std::string>());
  m.a = j.value("a", 0.0);
  m.b = j.value("b", 0.0);
  return m;
}

// `threads` is a scheduling hint: it is echoed in reports but left out of
// the config hash, since it cannot change any result.
inline nlohmann::json to_json(const ExperimentConfig& c, bool with_threads = true) {
  nlohmann::json tests = nlohmann::json::array();
  for (TestKind t : c.tests) tests.push_back(test_name(t));
  nlohmann::json j = {{"model", to_json(c.model)},
                      {"n", c.n},
                      {"s_n", c.s_n_list},
                      {"tests", tests},
                      {"levels", c.nominal_levels},
                      {"outer_replicates", c.outer_replicates},
                      {"seed", c.seed},
                      {"burn_in", c.burn_in},
                      {"record_ecdf", c.record_ecdf},
                      {"centered", c.centered}};
  if (c.bootstrap)
    j["bootstrap"] = {{"block_len", c.bootstrap->block_len}, {"replicates", c.bootstrap->replicates}};
  if (with_threads) j["threads"] = c.threads;
  return j;
}

inline void validate(const ExperimentConfig& c) {
  try {
    validate(c.model);
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  if (c.n < 3) throw ConfigError("n must be >= 3");
  if (c.s_n_list.empty()) throw ConfigError("s_n must list at least one lag count");
  if (c.tests.empty()) throw ConfigError("at least one test is required");
  if (c.nominal_levels.empty()) throw ConfigError("at least one nominal level is required");
  for (std::size_t i = 0; i < c.nominal_levels.size(); ++i) {
    const double a = c.nominal_levels[i];
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("nominal levels must lie in (0, 1)");
    if (i > 0 && !(a > c.nominal_levels[i - 1])) throw ConfigError("nominal levels must be sorted ascending");
  }
  if (c.outer_replicates < 1) throw ConfigError("outer_replicates must be >= 1");
  bool needs_bootstrap = false;
  for (TestKind t : c.tests) needs_bootstrap |= (t == TestKind::BobM || t == TestKind::BobSelfNorm);
  for (std::size_t s : c.s_n_list) {
    if (s < 2 || s >= c.n) throw ConfigError("every s_n must satisfy 2 <= s_n < n");
    if (c.bootstrap && s + c.bootstrap->block_len > c.n) throw ConfigError("s_n + block_len exceeds n");
  }
  if (needs_bootstrap && !c.bootstrap) throw ConfigError("bootstrap tests need a 'bootstrap' section");
  if (c.bootstrap && (c.bootstrap->block_len < 1 || c.bootstrap->replicates < 1))
    throw ConfigError("bootstrap block_len and replicates must be >= 1");
}

inline ExperimentConfig config_from_json(const nlohmann::json& in) {
  // A full report is accepted too: its embedded config is the manifest.
  const nlohmann::json& j = in.contains("config") && in.at("config").is_object() ? in.at("config") : in;
  ExperimentConfig c;
  try {
    c.model = model_from_json(j.at("model"));
    c.n = j.at("n").get<std::size_t>();
    const auto& s = j.at("s_n");
    c.s_n_list = s.is_array() ? s.get<std::vector<std::size_t>>() : std::vector<std::size_t>{s.get<std::size_t>()};
    c.tests.clear();
    if (j.contains("tests")) {
      for (const auto& t : j.at("tests")) c.tests.push_back(parse_test_kind(t.get<std::string>()));
    } else {
      c.tests.push_back(parse_test_kind(j.at("test").get<std::string>()));
    }
    if (j.contains("levels")) c.nominal_levels = j.at("levels").get<std::vector<double>>();
    c.outer_replicates = j.value("outer_replicates", c.outer_replicates);
    if (j.contains("bootstrap") && !j.at("bootstrap").is_null()) {
      BootstrapSettings b;
      b.block_len = j.at("bootstrap").value("block_len", b.block_len);
      b.replicates = j.at("bootstrap").value("replicates", b.replicates);
      c.bootstrap = b;
    }
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", 0u);
    c.burn_in = j.value("burn_in", c.burn_in);
    c.record_ecdf = j.value("record_ecdf", false);
    c.centered = j.value("centered", true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  validate(c);
  return c;
}

// FNV-1a over the canonical (key-sorted, compact) JSON of the config.
inline std::string config_hash(const ExperimentConfig& c) {
  const std::string text = to_json(c, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// Full-scale protocol: 10,000 outer replicates (1,000 for ECDF runs),
// N = 999 bootstrap draws, and n = 2e7, s_n = 5e5 for ECDF runs.
inline ExperimentConfig full_scale(ExperimentConfig c) {
  if (c.record_ecdf) {
    c.n = 20'000'000;
    c.s_n_list = {500'000};
    c.outer_replicates = 1000;
  } else {
    c.outer_replicates = 10'000;
  }
  if (c.bootstrap) c.bootstrap->replicates = 999;
  return c;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

inline ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {}) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n_s = config.s_n_list.size();
  const std::size_t n_t = config.tests.size();
  const std::size_t s_max = *std::max_element(config.s_n_list.begin(), config.s_n_list.end());

  // H0 is the model's own autocorrelation sequence.
  const auto r_true = theoretical_correlations(config.model, s_max);
  if (!r_true) throw UnknownTheoreticalAcf("run_experiment: model has no closed-form autocorrelations");
  bool white = true;
  for (double v : *r_true) white &= (v == 0.0);
  auto null_for = [&](std::size_t s) {
    return white ? NullSpec::white()
                 : NullSpec::correlations(std::vector<double>(r_true->begin(), r_true->begin() + s));
  };

  std::size_t lag_needed = s_max;
  for (std::size_t s : config.s_n_list) lag_needed = std::max(lag_needed, l2_required_lag(config.n, s, null_for(s)));
  if (lag_needed >= config.n) throw ConfigError("series too short for the requested lag counts");

  const std::size_t R = config.outer_replicates;
  // p-values per replicate, laid out [r][s][test]; Gumbel statistics [r][s].
  std::vector<double> pvals(R * n_s * n_t);
  std::vector<double> gstats(R * n_s);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  parallel_for(R, resolve_threads(config.threads), [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(config.seed, r);
    const TimeSeries x = simulate(config.model, config.n, config.burn_in, rep_seed);
    const AcfEstimate est = compute_acf(x, lag_needed, config.centered);
    for (std::size_t si = 0; si < n_s; ++si) {
      const std::size_t s = config.s_n_list[si];
      const NullSpec null = null_for(s);
      const MaxTestResult mt = max_test_from_acf(est, s, null);
      gstats[r * n_s + si] = mt.gumbel_stat;
      std::optional<BootstrapReport> boot;
      for (std::size_t ti = 0; ti < n_t; ++ti) {
        double p = 1.0;
        switch (config.tests[ti]) {
          case TestKind::AsymptoticMax:
            p = mt.p_value;
            break;
          case TestKind::BobM:
          case TestKind::BobSelfNorm:
            if (!boot) {
              BootstrapConfig bc;
              bc.s_n = s;
              bc.block_len = config.bootstrap->block_len;
              bc.replicates = config.bootstrap->replicates;
              bc.seed = derive_seed(rep_seed, si + 1);
              MaxTestOptions mo;
              mo.centered = config.centered;
              boot = bob_test(x, bc, null, mo, 1);
            }
            p = config.tests[ti] == TestKind::BobM ? boot->p_value_M : boot->p_value_selfnorm;
            break;
          case TestKind::L2Normal:
            p = l2_test_from_acf(est, s, L2Flavor::UnboundedLagNormal, null).p_value;
            break;
        }
        pvals[(r * n_s + si) * n_t + ti] = p;
      }
    }
    const std::size_t d = done.fetch_add(1) + 1;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(d, R);
    }
  });

  ExperimentResult result;
  result.config = config;
  result.config_hash = config_hash(config);
  const double Rd = static_cast<double>(R);
  for (std::size_t si = 0; si < n_s; ++si) {
    for (std::size_t ti = 0; ti < n_t; ++ti) {
      RejectionRow row;
      row.s_n = config.s_n_list[si];
      row.test = config.tests[ti];
      for (double level : config.nominal_levels) {
        std::size_t rejects = 0;
        for (std::size_t r = 0; r < R; ++r)
          if (pvals[(r * n_s + si) * n_t + ti] < level) ++rejects;
        const double rate = static_cast<double>(rejects) / Rd;
        row.rates.push_back(rate);
        row.se.push_back(std::sqrt(rate * (1.0 - rate) / Rd));
      }
      if (config.record_ecdf && row.test == TestKind::AsymptoticMax) {
        row.ecdf.resize(R);
        for (std::size_t r = 0; r < R; ++r) row.ecdf[r] = gstats[r * n_s + si];
        std::sort(row.ecdf.begin(), row.ecdf.end());
        row.ks_gumbel = ks_distance(row.ecdf, [](double v) { return gumbel_cdf(v); });
      }
      result.rows.push_back(std::move(row));
    }
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class ReportFormat { Json, Csv, Table };

struct EmitOptions {
  // Wall time differs between runs; leaving it out keeps reports
  // byte-identical when re-run from their embedded config.
  bool include_timing = false;
};

inline nlohmann::json to_json(const ExperimentResult& res, const EmitOptions& opt = {}) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : res.rows) {
    nlohmann::json jr = {{"s_n", row.s_n}, {"test", test_name(row.test)}, {"rates", row.rates}, {"se", row.se}};
    if (!row.ecdf.empty()) jr["ecdf"] = row.ecdf;
    if (row.ks_gumbel) jr["ks_gumbel"] = *row.ks_gumbel;
    rows.push_back(std::move(jr));
  }
  nlohmann::json j = {{"config", to_json(res.config)},
                      {"config_hash", res.config_hash},
                      {"seed", res.config.seed},
                      {"rows", rows}};
  if (opt.include_timing) j["wall_time_s"] = res.wall_time;
  return j;
}

inline ExperimentResult result_from_json(const nlohmann::json& j) {
  ExperimentResult res;
  res.config = config_from_json(j.at("config"));
  res.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& jr : j.at("rows")) {
    RejectionRow row;
    row.s_n = jr.at("s_n").get<std::size_t>();
    row.test = parse_test_kind(jr.at("test").get<std::string>());
    row.rates = jr.at("rates").get<std::vector<double>>();
    row.se = jr.at("se").get<std::vector<double>>();
    if (jr.contains("ecdf")) row.ecdf = jr.at("ecdf").get<std::vector<double>>();
    if (jr.contains("ks_gumbel")) row.ks_gumbel = jr.at("ks_gumbel").get<double>();
    res.rows.push_back(std::move(row));
  }
  res.wall_time = j.value("wall_time_s", 0.0);
  return res;
}

namespace detail {

inline std::string row_label(const ExperimentResult& res, TestKind t) {
  const auto& c = res.config;
  const std::string b = c.bootstrap ? std::to_string(c.bootstrap->block_len) : "?";
  switch (t) {
    case TestKind::AsymptoticMax: {
      std::string m = model_name(c.model.kind);
      std::transform(m.begin(), m.end(), m.begin(), [](unsigned char ch) { return std::toupper(ch); });
      return m;
    }
    case TestKind::BobM: return "b_n=" + b + " M";
    case TestKind::BobSelfNorm: return "b_n=" + b + " selfnorm";
    case TestKind::L2Normal: return "L2 normal";
  }
  return "?";
}

inline std::string format_pct(double rate) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * rate;
  return os.str();
}

}  // namespace detail

inline std::string emit_report(const ExperimentResult& res, ReportFormat format, const EmitOptions& opt = {}) {
  std::ostringstream os;
  switch (format) {
    case ReportFormat::Json:
      os << to_json(res, opt).dump(2) << '\n';
      break;
    case ReportFormat::Csv: {
      os << "model,s_n,test";
      for (double a : res.config.nominal_levels) os << ',' << a;
      os << '\n';
      os << std::setprecision(17);
      for (const auto& row : res.rows) {
        os << model_name(res.config.model.kind) << ',' << row.s_n << ',' << test_name(row.test);
        for (double r : row.rates) os << ',' << r;
        os << '\n';
      }
      break;
    }
    case ReportFormat::Table: {
      // Rows are tests (asymptotic first, then bootstrap M and selfnorm),
      // column groups are s_n, each with one column per nominal level, in
      // percent.
      std::vector<std::size_t> s_order;
      for (const auto& row : res.rows)
        if (std::find(s_order.begin(), s_order.end(), row.s_n) == s_order.end()) s_order.push_back(row.s_n);
      std::vector<TestKind> t_order;
      for (TestKind t : {TestKind::AsymptoticMax, TestKind::BobM, TestKind::BobSelfNorm, TestKind::L2Normal})
        if (std::find(res.config.tests.begin(), res.config.tests.end(), t) != res.config.tests.end())
          t_order.push_back(t);

      const int label_w = 18;
      const int cell_w = 7;
      const std::size_t n_lv = res.config.nominal_levels.size();
      os << std::left << std::setw(label_w) << "Test";
      for (std::size_t s : s_order)
        os << " | " << std::left << std::setw(static_cast<int>(n_lv) * cell_w) << ("s_n=" + std::to_string(s));
      os << '\n' << std::setw(label_w) << "";
      for (std::size_t si = 0; si < s_order.size(); ++si) {
        os << " | ";
        for (double a : res.config.nominal_levels) {
          std::ostringstream lv;
          lv << 100.0 * a;
          os << std::right << std::setw(cell_w) << lv.str();
        }
      }
      os << '\n';
      for (TestKind t : t_order) {
        os << std::left << std::setw(label_w) << detail::row_label(res, t);
        for (std::size_t s : s_order) {
          os << " | ";
          for (const auto& row : res.rows) {
            if (row.s_n != s || row.test != t) continue;
            for (double r : row.rates) os << std::right << std::setw(cell_w) << detail::format_pct(r);
          }
        }
        os << '\n';
      }
      break;
    }
  }
  return os.str();
}

}  // namespace acfinf
