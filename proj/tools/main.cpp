// sleigh: simulate, verify and sweep the energy-shaping controller for the
// Chaplygin sleigh.
//
//   sleigh simulate [--config paper.toml] [--override controller.k=0.2] [--out dir]
//   sleigh verify   [--config paper.toml] [--seed 7]
//   sleigh sweep    --param controller.k --values 0.05,0.1,0.2

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "sleigh/app.hpp"
#include "sleigh/config.hpp"
#include "sleigh/parallel.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::int64_t seed = -1;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Run configuration (TOML); defaults to the built-in paper setup");
  cmd->add_option("--override", o.overrides, "key.path=value, repeatable")->take_all();
  cmd->add_option("--out", o.out, "Output directory (overrides outputs.directory)");
  cmd->add_option("--seed", o.seed, "Seed for randomized verification sweeps")->check(CLI::NonNegativeNumber);
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
}

sleigh::RunConfig load(const CommonOptions& o, std::vector<std::string> extra = {}) {
  std::vector<std::string> overrides = o.overrides;
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  sleigh::RunConfig cfg = o.config.empty()
                              ? sleigh::parse_run_config(sleigh::default_config_toml(), overrides, "<default>")
                              : sleigh::load_run_config(o.config, overrides);
  if (!o.out.empty()) cfg.outputs.directory = o.out;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  return cfg;
}

std::string to_toml_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // TOML floats need a decimal point or exponent.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Discontinuous energy-shaping control of the Chaplygin sleigh"};
  cli.require_subcommand(1);

  CommonOptions sim_opts, verify_opts, sweep_opts;
  auto* sim = cli.add_subcommand("simulate", "Run every scenario, write CSV trajectories and summary.json");
  add_common(sim, sim_opts);
  auto* verify = cli.add_subcommand("verify", "Run the sampling verification sweeps only");
  add_common(verify, verify_opts);
  auto* sweep = cli.add_subcommand("sweep", "Grid over one parameter, emitting sweep.csv");
  add_common(sweep, sweep_opts);
  std::string parameter;
  std::vector<double> values;
  sweep->add_option("--param", parameter, "Dotted config key, e.g. controller.k")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : sleigh::app::kConfigError;
  }

  try {
    if (*sim) {
      sleigh::set_thread_count(sim_opts.jobs);
      return sleigh::app::run_simulate(load(sim_opts), std::cout);
    }
    if (*verify) {
      sleigh::set_thread_count(verify_opts.jobs);
      return sleigh::app::run_verify(load(verify_opts), std::cout);
    }
    sleigh::set_thread_count(sweep_opts.jobs);
    return sleigh::app::run_sweep(
        parameter, values,
        [&](double v) { return load(sweep_opts, {parameter + "=" + to_toml_number(v)}); }, std::cout);
  } catch (const sleigh::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return sleigh::app::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sleigh::app::kSimulationError;
  }
}
