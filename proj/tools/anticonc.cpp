// Command-line front end: one subcommand per model plus `run` for config files.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;
constexpr int kExitNumeric = 4;

struct Flags {
  std::map<std::string, std::string> values;
  std::string config;
  bool sweep = false;
};

const char* const kValueFlags[][2] = {
    {"n", "Problem size (matrix order N for matrix-wigner, box parameter for fpp)"},
    {"p", "Dimension for matrix-covariance"},
    {"alpha", "Coupling strength"},
    {"beta", "Inverse temperature (sk) or mixing strength (euclidean-rhee)"},
    {"delta-mult", "delta = multiplier x the model's fluctuation scale"},
    {"samples", "Number of coupled replicates (>= 100)"},
    {"seed", "64-bit seed"},
    {"confidence", "Hoeffding confidence level in (0.5, 1)"},
    {"density", "std-gaussian, exponential-rate-1 or half-gaussian"},
    {"functional", "tsp-exact, tsp-2opt, matching-exact or nn-sum"},
    {"slack", "Corridor exponent slack (fpp-corridor)"},
    {"m", "Geodesic edges in the fpp-graded lower bound"},
    {"threads", "Worker threads (0 = all cores)"},
    {"report", "Write the JSON report to this path"},
    {"dump-csv", "Write per-replicate rows replicate,x,y,gap"},
};

void add_flags(CLI::App* sub, Flags& flags) {
  for (const auto& [name, help] : kValueFlags) {
    sub->add_option_function<std::string>(
        std::string("--") + name, [&flags, key = std::string(name)](const std::string& v) { flags.values[key] = v; },
        help);
  }
  sub->add_option("--config", flags.config, "key=value file; flags override its entries");
  sub->add_flag("--sweep", flags.sweep, "Also evaluate the certificate at multipliers 0.02 0.05 0.1 0.2 0.5");
}

anticonc::ExperimentConfig build_config(const std::string& model, const Flags& flags) {
  anticonc::ExperimentConfig cfg;
  bool have_model = false;
  if (!model.empty()) {
    cfg.model = anticonc::model_from_string(model);
    have_model = true;
  }
  if (!flags.config.empty()) {
    for (const auto& [k, v] : anticonc::read_config_file(flags.config)) {
      if (k == "model") {
        if (have_model && anticonc::model_from_string(v) != cfg.model) {
          throw anticonc::ConfigError("config file names model '" + v + "' but the subcommand is '" + model + "'");
        }
        have_model = true;
      }
      anticonc::apply_setting(cfg, k, v);
    }
  }
  if (!have_model) throw anticonc::ConfigError("no model given (use a model subcommand or model= in --config)");
  for (const auto& [k, v] : flags.values) anticonc::apply_setting(cfg, k, v);
  if (flags.sweep) cfg.sweep = true;
  return cfg;
}

void print_summary(const anticonc::ExperimentReport& r) {
  const auto& c = r.certificate;
  std::printf("model          %s (n=%zu%s)\n", std::string(anticonc::to_string(r.config.model)).c_str(), r.config.n,
              r.config.p ? (", p=" + std::to_string(r.config.p)).c_str() : "");
  std::printf("samples        %zu  seed %llu\n", c.samples, static_cast<unsigned long long>(r.config.seed));
  std::printf("gap X-Y        min %.6g  median %.6g  mean %.6g  max %.6g\n", r.gaps.min, r.gaps.median, r.gaps.mean,
              r.gaps.max);
  std::printf("delta          %.6g  (%.3g x scale %.6g)\n", c.delta, r.config.delta_multiplier, r.fluctuation_scale);
  std::printf("p_close        %.6f  + slack %.6f\n", c.p_close_hat, c.p_close_slack);
  std::printf("tv bound       %.6f  (affinity %.12f over %.0f coordinates)\n", r.tv.value, r.tv.per_coordinate_affinity,
              r.tv.coordinate_count);
  std::printf("bound          %.6f\n", c.bound);
  std::printf("concentration  %.6f  (<= %.6f: %s)\n", r.concentration.value, r.concentration.bound_plus_slack,
              r.concentration.within_bound ? "yes" : "no");
  for (const auto& s : r.sweep) {
    std::printf("  sweep x%-5g delta %-10.6g p_close %.6f bound %.6f concentration %.6f\n", s.multiplier, s.delta,
                s.p_close_hat, s.bound, s.concentration);
  }
  std::printf("checks         %zu, violations %zu\n", r.violations.checks, r.violations.count);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anti-concentration certificates from couplings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ANTICONC_VERSION);

  Flags flags;
  std::string chosen;
  for (anticonc::Model m : anticonc::all_models()) {
    const std::string name(anticonc::to_string(m));
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " coupling experiment");
    add_flags(sub, flags);
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI::App* run_cmd = app.add_subcommand("run", "Run the experiment described by --config (needs model=)");
  add_flags(run_cmd, flags);
  CLI::App* list_cmd = app.add_subcommand("list", "List the available models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (list_cmd->parsed()) {
    for (anticonc::Model m : anticonc::all_models()) std::cout << anticonc::to_string(m) << '\n';
    return kExitOk;
  }

  try {
    const anticonc::ExperimentConfig cfg = build_config(chosen, flags);
    const anticonc::Experiment exp = anticonc::run(cfg);
    print_summary(exp.report);
    if (!cfg.report_path.empty()) anticonc::emit_report(exp.report, cfg.report_path);
    if (!cfg.csv_path.empty()) anticonc::dump_csv(exp, cfg.csv_path);
    return kExitOk;
  } catch (const anticonc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const anticonc::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const anticonc::ViolationError& e) {
    std::cerr << "violation: " << e.what() << '\n';
    return kExitViolation;
  } catch (const anticonc::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << " (partial estimate " << e.partial_estimate() << ", error "
              << e.error_estimate() << ")\n";
    return kExitNumeric;
  } catch (const anticonc::InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitViolation;
  }
}
