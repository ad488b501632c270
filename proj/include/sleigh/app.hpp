#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "sleigh/analysis.hpp"
#include "sleigh/config.hpp"
#include "sleigh/integrator.hpp"

namespace sleigh::app {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailure = 1,
  kConfigError = 2,
  kSimulationError = 3,
};

struct ScenarioResult {
  Scenario scenario;
  RunOutcome outcome;
  std::optional<ConvergenceSummary> metrics;
  std::vector<VerificationReport> reports;
};

/// Per-trajectory checks: invariance of U, energy audit, rate agreement,
/// constraint residual, boundedness.
std::vector<VerificationReport> trajectory_reports(const Trajectory& traj, const RunConfig& cfg,
                                                   const ConvergenceSummary& metrics);

/// Runs every scenario (in parallel unless exec says otherwise).
std::vector<ScenarioResult> run_scenarios(const RunConfig& cfg, Execution exec = Execution::Parallel);

/// Sampling sweeps that do not need trajectories, seeded from cfg.seed.
std::vector<VerificationReport> verification_suite(const RunConfig& cfg,
                                                   Execution exec = Execution::Parallel);

/// `simulate`: CSV per scenario plus summary.json in cfg.outputs.directory.
int run_simulate(const RunConfig& cfg, std::ostream& log);

/// `verify`: sweeps only, summary.json in cfg.outputs.directory.
int run_verify(const RunConfig& cfg, std::ostream& log);

/// `sweep`: one config per parameter value; sweep.csv metrics table in the
/// output directory of the first config.
/// @throws ConfigError from make_config
int run_sweep(const std::string& parameter, const std::vector<double>& values,
              const std::function<RunConfig(double)>& make_config, std::ostream& log);

}  // namespace sleigh::app
