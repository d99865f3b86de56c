// acfinf command-line interface.
//
//   acfinf acf            --input x.csv --max-lag K [--centered] [--fast]
//   acfinf test-max       --input x.csv --s-n K [--null r0.csv] [--alpha 0.05]
//   acfinf test-l2        --input x.csv --s-n K --flavor {bp,lb,normal} [--null r0.csv]
//   acfinf bootstrap-test --input x.csv --s-n K --block-len B --replicates N --seed S
//   acfinf simulate       --model ar1 --params 0.5 --n N --seed S --out x.csv
//   acfinf dependence     --model ar1 --params 0.5 --p 2 --i-max 50 --replicates 10000 --seed S
//   acfinf montecarlo     --config exp.json [--format json|csv|table]
//
// Exit codes: 0 success, 1 I/O error, 2 invalid arguments or config,
// 3 numeric failure (degenerate data, overflow).

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "acfinf/acfinf.hpp"

namespace {

using nlohmann::json;

acfinf::ModelSpec parse_model(const std::string& kind, const std::string& params) {
  acfinf::ModelSpec m;
  m.kind = acfinf::parse_model_kind(kind);
  std::vector<double> p;
  std::stringstream ss(params);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      p.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw acfinf::InvalidParams("cannot parse model parameter '" + tok + "'");
    }
  }
  switch (m.kind) {
    case acfinf::ModelKind::IID:
      if (!p.empty()) throw acfinf::InvalidParams("iid takes no parameters");
      break;
    case acfinf::ModelKind::AR1:
      // "b" or "a,b" (a ignored) are both accepted.
      if (p.size() == 1) m.b = p[0];
      else if (p.size() == 2) m.b = p[1];
      else throw acfinf::InvalidParams("ar1 expects --params b");
      break;
    case acfinf::ModelKind::Bilinear:
    case acfinf::ModelKind::ARCH:
      if (p.size() != 2) throw acfinf::InvalidParams(acfinf::model_name(m.kind) + " expects --params a,b");
      m.a = p[0];
      m.b = p[1];
      break;
  }
  acfinf::validate(m);
  return m;
}

acfinf::NullSpec read_null(const std::string& path) {
  if (path.empty()) return acfinf::NullSpec::white();
  return acfinf::NullSpec::correlations(acfinf::read_column_file(path));
}

acfinf::TimeSeries read_series(const std::string& path) {
  return acfinf::TimeSeries(acfinf::read_column_file(path));
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

int run(int argc, char** argv) {
  CLI::App app{"Inference on autocovariances of stationary time series"};
  app.require_subcommand(1);

  // acf
  std::string acf_input;
  std::size_t acf_lag = 0;
  bool acf_centered = false;
  bool acf_fast = false;
  auto* acf_cmd = app.add_subcommand("acf", "Sample autocovariances and autocorrelations (CSV lag,gamma,rho)");
  acf_cmd->add_option("--input", acf_input, "Single-column headerless CSV")->required();
  acf_cmd->add_option("--max-lag", acf_lag, "Largest lag")->required();
  acf_cmd->add_flag("--centered", acf_centered, "Subtract the sample mean");
  acf_cmd->add_flag("--fast", acf_fast, "FFT evaluation");

  // test-max
  std::string tm_input, tm_null;
  std::size_t tm_s = 0;
  double tm_alpha = 0.05;
  bool tm_uncentered = false;
  auto* tm_cmd = app.add_subcommand("test-max", "Maximum-deviation (Gumbel) test");
  tm_cmd->add_option("--input", tm_input)->required();
  tm_cmd->add_option("--s-n", tm_s, "Number of lags")->required();
  tm_cmd->add_option("--null", tm_null, "CSV of null correlations r_1..r_s (default white noise)");
  tm_cmd->add_option("--alpha", tm_alpha, "Nominal level");
  tm_cmd->add_flag("--uncentered", tm_uncentered, "Use the raw (not mean-adjusted) estimator");

  // test-l2
  std::string l2_input, l2_null, l2_flavor = "normal";
  std::size_t l2_s = 0;
  double l2_alpha = 0.05;
  auto* l2_cmd = app.add_subcommand("test-l2", "Box-Pierce family tests");
  l2_cmd->add_option("--input", l2_input)->required();
  l2_cmd->add_option("--s-n", l2_s)->required();
  l2_cmd->add_option("--flavor", l2_flavor, "bp, lb or normal")->check(CLI::IsMember({"bp", "lb", "normal"}));
  l2_cmd->add_option("--null", l2_null, "CSV of null correlations r_1..r_s (normal flavor)");
  l2_cmd->add_option("--alpha", l2_alpha, "Nominal level");

  // bootstrap-test
  std::string bt_input, bt_null;
  acfinf::BootstrapConfig bt_cfg;
  bool bt_summary = false;
  unsigned bt_threads = 0;
  double bt_alpha = 0.05;
  auto* bt_cmd = app.add_subcommand("bootstrap-test", "Blocks-of-blocks bootstrap max-deviation tests");
  bt_cmd->add_option("--input", bt_input)->required();
  bt_cmd->add_option("--s-n", bt_cfg.s_n)->required();
  bt_cmd->add_option("--block-len", bt_cfg.block_len)->required();
  bt_cmd->add_option("--replicates", bt_cfg.replicates)->required();
  bt_cmd->add_option("--seed", bt_cfg.seed)->required();
  bt_cmd->add_option("--null", bt_null, "CSV of null correlations r_1..r_s");
  bt_cmd->add_option("--alpha", bt_alpha, "Nominal level");
  bt_cmd->add_option("--threads", bt_threads, "Worker threads (0 = ACF_THREADS or all cores)");
  bt_cmd->add_flag("--summary", bt_summary, "Omit replicate arrays");

  // simulate
  std::string sim_model, sim_params, sim_out;
  std::size_t sim_n = 0, sim_burn = acfinf::kDefaultBurnIn;
  std::uint64_t sim_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate one of the four models");
  sim_cmd->add_option("--model", sim_model)->required()->check(CLI::IsMember({"iid", "ar1", "bilinear", "arch"}));
  sim_cmd->add_option("--params", sim_params, "Comma-separated a,b (ar1: b)");
  sim_cmd->add_option("--n", sim_n)->required();
  sim_cmd->add_option("--seed", sim_seed)->required();
  sim_cmd->add_option("--burn-in", sim_burn);
  sim_cmd->add_option("--out", sim_out, "Output CSV (default stdout)");

  // dependence
  std::string dep_model, dep_params;
  double dep_p = 2.0;
  std::size_t dep_imax = acfinf::kDefaultDeltaLags, dep_reps = 10000;
  std::uint64_t dep_seed = 0;
  unsigned dep_threads = 0;
  auto* dep_cmd = app.add_subcommand("dependence", "Monte Carlo physical dependence measures (CSV i,delta,theta_tail)");
  dep_cmd->add_option("--model", dep_model)->required()->check(CLI::IsMember({"iid", "ar1", "bilinear", "arch"}));
  dep_cmd->add_option("--params", dep_params);
  dep_cmd->add_option("--p", dep_p);
  dep_cmd->add_option("--i-max", dep_imax);
  dep_cmd->add_option("--replicates", dep_reps);
  dep_cmd->add_option("--seed", dep_seed)->required();
  dep_cmd->add_option("--threads", dep_threads);

  // montecarlo
  std::string mc_config, mc_format = "json";
  bool mc_full = false, mc_timing = false;
  int mc_threads = -1;
  auto* mc_cmd = app.add_subcommand("montecarlo", "Run a rejection-rate / ECDF experiment from a JSON config");
  mc_cmd->add_option("--config", mc_config, "Experiment config (or a previous report)")->required();
  mc_cmd->add_option("--format", mc_format)->check(CLI::IsMember({"json", "csv", "table"}));
  mc_cmd->add_flag("--full-scale", mc_full, "Use full-scale sizes (10000 replicates, N = 999)");
  mc_cmd->add_flag("--timing", mc_timing, "Include wall time in the JSON report");
  mc_cmd->add_option("--threads", mc_threads, "Override the config's thread hint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*acf_cmd) {
    const auto series = read_series(acf_input);
    const auto est = acf_fast ? acfinf::acf_fast(series, acf_lag, acf_centered)
                              : acfinf::acf(series, acf_lag, acf_centered);
    acfinf::write_acf_csv(std::cout, est);
  } else if (*tm_cmd) {
    if (!(tm_alpha > 0.0 && tm_alpha < 1.0)) throw acfinf::InvalidAlpha("--alpha must lie in (0, 1)");
    const auto series = read_series(tm_input);
    acfinf::MaxTestOptions opt;
    opt.centered = !tm_uncentered;
    const auto r = acfinf::max_test(series, tm_s, read_null(tm_null), opt);
    print_json({{"statistic", r.gumbel_stat},
                {"p_value", r.p_value},
                {"sigma0_hat", r.sigma0_hat},
                {"decision", r.p_value < tm_alpha ? "reject" : "accept"},
                {"M", r.M},
                {"M_selfnorm", r.M_selfnorm},
                {"s_n", r.s_n},
                {"t_n", r.t_n},
                {"centered", r.centered},
                {"alpha", tm_alpha}});
  } else if (*l2_cmd) {
    if (!(l2_alpha > 0.0 && l2_alpha < 1.0)) throw acfinf::InvalidAlpha("--alpha must lie in (0, 1)");
    const auto series = read_series(l2_input);
    const auto r = acfinf::l2_test(series, l2_s, acfinf::parse_flavor(l2_flavor), read_null(l2_null));
    const double stat = r.flavor == acfinf::L2Flavor::BoxPierce ? r.Q
                        : r.flavor == acfinf::L2Flavor::LjungBox ? r.Q_lb
                                                                  : r.T;
    print_json({{"flavor", acfinf::flavor_name(r.flavor)},
                {"statistic", stat},
                {"p_value", r.p_value},
                {"decision", r.p_value < l2_alpha ? "reject" : "accept"},
                {"Q", r.Q},
                {"Q_lb", r.Q_lb},
                {"T", r.T},
                {"variance_used", r.variance_used},
                {"s_n", r.s_n},
                {"alpha", l2_alpha}});
  } else if (*bt_cmd) {
    const auto series = read_series(bt_input);
    const auto rep = acfinf::bob_test(series, bt_cfg, read_null(bt_null), {}, acfinf::resolve_threads(bt_threads));
    json j = {{"observed_M", rep.observed_M},
              {"observed_selfnorm", rep.observed_selfnorm},
              {"p_value_M", rep.p_value_M},
              {"p_value_selfnorm", rep.p_value_selfnorm},
              {"decision_M", rep.p_value_M < bt_alpha ? "reject" : "accept"},
              {"decision_selfnorm", rep.p_value_selfnorm < bt_alpha ? "reject" : "accept"},
              {"r_e", rep.r_e},
              {"config",
               {{"s_n", rep.config.s_n},
                {"block_len", rep.config.block_len},
                {"replicates", rep.config.replicates},
                {"seed", rep.config.seed},
                {"t_n", rep.config.t_n}}}};
    if (!bt_summary) {
      j["replicate_M"] = rep.replicate_M;
      j["replicate_selfnorm"] = rep.replicate_selfnorm;
    }
    print_json(j);
  } else if (*sim_cmd) {
    const auto model = parse_model(sim_model, sim_params);
    const auto series = acfinf::simulate(model, sim_n, sim_burn, sim_seed);
    const std::vector<double> v(series.values().begin(), series.values().end());
    if (sim_out.empty()) {
      acfinf::write_column(std::cout, v);
    } else {
      std::ofstream out(sim_out);
      if (!out) throw acfinf::IoError("cannot write '" + sim_out + "'");
      acfinf::write_column(out, v);
    }
  } else if (*dep_cmd) {
    const auto model = parse_model(dep_model, dep_params);
    const auto prof =
        acfinf::estimate_delta(model, dep_p, dep_imax, dep_reps, dep_seed, acfinf::resolve_threads(dep_threads));
    std::cout << "i,delta,theta_tail\n" << std::setprecision(17);
    for (std::size_t i = 0; i < prof.delta.size(); ++i)
      std::cout << i << ',' << prof.delta[i] << ',' << prof.theta_tail[i] << '\n';
    if (!prof.remainder_reliable) std::cerr << "warning: tail remainder could not be extrapolated\n";
  } else if (*mc_cmd) {
    std::ifstream in(mc_config);
    if (!in) throw acfinf::IoError("cannot open '" + mc_config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw acfinf::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    auto cfg = acfinf::config_from_json(j);
    if (mc_full) cfg = acfinf::full_scale(cfg);
    if (mc_threads >= 0) cfg.threads = static_cast<unsigned>(mc_threads);
    std::size_t last_pct = 0;
    const auto result = acfinf::run_experiment(cfg, [&](std::size_t done, std::size_t total) {
      const std::size_t pct = 100 * done / total;
      if (pct >= last_pct + 10 || done == total) {
        last_pct = pct;
        std::cerr << "montecarlo: " << done << "/" << total << " replicates\n";
      }
    });
    std::cerr << "montecarlo: finished in " << std::fixed << std::setprecision(1) << result.wall_time << " s\n";
    const auto fmt = mc_format == "csv"     ? acfinf::ReportFormat::Csv
                     : mc_format == "table" ? acfinf::ReportFormat::Table
                                            : acfinf::ReportFormat::Json;
    acfinf::EmitOptions eo;
    eo.include_timing = mc_timing;
    std::cout << acfinf::emit_report(result, fmt, eo);
    if (!std::cout) throw acfinf::IoError("failed to write the report");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const acfinf::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
