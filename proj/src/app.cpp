#include "sleigh/app.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sleigh/report_json.hpp"
#include "sleigh/trajectory_io.hpp"

namespace sleigh::app {

namespace {

using json = nlohmann::ordered_json;

json config_json(const RunConfig& cfg) {
  const auto& m = cfg.model;
  json damping{{"kind", damping_name(m.damping())}};
  if (const auto* c = std::get_if<ConstantDamping>(&m.damping())) {
    damping["d1"] = c->d1;
    damping["d2"] = c->d2;
  } else if (const auto* c = std::get_if<CoulombDamping>(&m.damping())) {
    damping["epsilon"] = c->epsilon;
  }
  const auto& c = cfg.controller;
  const auto& g = c.potential_gains();
  const auto& d = c.injected_damping();
  const auto& i = cfg.integrator;
  return json{
      {"model", {{"mass", m.mass()}, {"inertia", m.inertia()}, {"offset", m.offset()}, {"damping", damping}}},
      {"controller",
       {{"gains", {g[0], g[1], g[2]}},
        {"k", c.singular_damping()},
        {"injected_damping", {{d(0, 0), d(0, 1)}, {d(1, 0), d(1, 1)}}},
        {"form", to_string(c.form())}}},
      {"integrator",
       {{"rel_tol", i.rel_tol},
        {"abs_tol", i.abs_tol},
        {"dt_init", i.dt_init},
        {"dt_min", i.dt_min},
        {"dt_max", i.dt_max},
        {"t_final", i.t_final},
        {"stop_tol", i.stop_tol},
        {"record_interval", i.record_interval},
        {"heading_guard", i.heading_guard}}},
  };
}

json state_json(const QState& s) { return json{s.q[0], s.q[1], s.q[2], s.p[0], s.p[1]}; }

bool all_passed(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports) {
    if (!r.passed) return false;
  }
  return true;
}

void print_reports(std::ostream& log, const std::string& prefix,
                   const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports) {
    log << (r.passed ? "[PASS] " : "[FAIL] ") << prefix << r.name << ": " << r.detail << '\n';
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

int exit_code(bool any_simulation_error, bool any_failure) {
  if (any_simulation_error) return kSimulationError;
  return any_failure ? kVerificationFailure : kOk;
}

}  // namespace

std::vector<VerificationReport> trajectory_reports(const Trajectory& traj, const RunConfig& cfg,
                                                   const ConvergenceSummary& metrics) {
  return {check_invariance_of_U(traj), energy_audit(traj, cfg.integrator), rate_agreement(traj),
          constraint_audit(traj), boundedness_check(metrics)};
}

std::vector<ScenarioResult> run_scenarios(const RunConfig& cfg, Execution exec) {
  std::vector<QState> initials;
  for (const auto& s : cfg.scenarios) initials.push_back(s.initial);
  auto outcomes = batch_simulate(initials, cfg.model, cfg.controller, cfg.integrator, exec);

  std::vector<ScenarioResult> results(cfg.scenarios.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    r.scenario = cfg.scenarios[i];
    r.outcome = std::move(outcomes[i]);
    if (r.outcome.ok()) {
      r.metrics = convergence_metrics(*r.outcome.trajectory, cfg.model, cfg.controller, cfg.integrator);
      r.reports = trajectory_reports(*r.outcome.trajectory, cfg, *r.metrics);
    }
  }
  return results;
}

std::vector<VerificationReport> verification_suite(const RunConfig& cfg, Execution exec) {
  const auto& v = cfg.verification;
  SchwarzSweepSpec schwarz;
  schwarz.functions = v.schwarz_functions;
  schwarz.seed = cfg.seed;
  ResidualSearchSpec residual;
  residual.samples = v.residual_samples;
  residual.seed = cfg.seed + 1;
  MatchingSpec matching;
  matching.samples = v.matching_samples;
  matching.seed = cfg.seed + 2;
  RobustnessSpec robust;
  robust.seed = cfg.seed + 3;

  return {schwarz_sweep(schwarz, exec),
          equilibrium_residual_search(cfg.controller.potential_gains(), residual, exec),
          check_matching(cfg.model, cfg.controller, matching, exec),
          check_mass_independence(cfg.model, cfg.controller, robust),
          check_form_agreement(cfg.model, cfg.controller, robust),
          check_damping_independence(cfg.model, cfg.controller, robust)};
}

int run_simulate(const RunConfig& cfg, std::ostream& log) {
  const auto& dir = cfg.outputs.directory;
  std::filesystem::create_directories(dir);

  const auto results = run_scenarios(cfg);
  const auto suite = verification_suite(cfg);

  bool any_error = false;
  bool any_failure = !all_passed(suite);
  json scenarios = json::array();
  for (const auto& r : results) {
    json s{{"name", r.scenario.name}, {"initial", state_json(r.scenario.initial)}};
    if (!r.outcome.ok()) {
      any_error = true;
      const auto& e = *r.outcome.error;
      s["status"] = "error";
      s["error"] = json{{"kind", to_string(e.kind())},
                        {"message", e.what()},
                        {"t", e.time()},
                        {"state", state_json(e.state())}};
      log << "[ERROR] " << r.scenario.name << ": " << to_string(e.kind()) << ": " << e.what() << '\n';
    } else {
      s["status"] = "ok";
      if (cfg.outputs.csv) {
        const std::string file = r.scenario.name + ".csv";
        write_trajectory_csv(dir / file, *r.outcome.trajectory);
        s["csv"] = file;
      }
      s["metrics"] = *r.metrics;
      s["integrator"] = r.outcome.trajectory->stats;
      s["reports"] = r.reports;
      any_failure = any_failure || !all_passed(r.reports);
      log << r.scenario.name << ": |q(T)|/|q(0)| = " << r.metrics->decay_ratio
          << ", H_d(T) = " << r.metrics->final_H_d << '\n';
      print_reports(log, r.scenario.name + ".", r.reports);
    }
    scenarios.push_back(std::move(s));
  }
  print_reports(log, "", suite);

  const int code = exit_code(any_error, any_failure);
  if (cfg.outputs.json) {
    json summary{{"command", "simulate"},
                 {"seed", cfg.seed},
                 {"config", config_json(cfg)},
                 {"scenarios", scenarios},
                 {"verification", suite},
                 {"all_passed", code == kOk},
                 {"exit_code", code}};
    write_json(dir / "summary.json", summary);
  }
  return code;
}

int run_verify(const RunConfig& cfg, std::ostream& log) {
  const auto suite = verification_suite(cfg);
  print_reports(log, "", suite);
  const int code = exit_code(false, !all_passed(suite));
  if (cfg.outputs.json) {
    std::filesystem::create_directories(cfg.outputs.directory);
    json summary{{"command", "verify"},
                 {"seed", cfg.seed},
                 {"config", config_json(cfg)},
                 {"verification", suite},
                 {"all_passed", code == kOk},
                 {"exit_code", code}};
    write_json(cfg.outputs.directory / "summary.json", summary);
  }
  return code;
}

int run_sweep(const std::string& parameter, const std::vector<double>& values,
              const std::function<RunConfig(double)>& make_config, std::ostream& log) {
  if (values.empty()) throw ConfigError("sweep: no parameter values given");
  std::vector<RunConfig> configs;
  for (double v : values) configs.push_back(make_config(v));

  struct Job {
    std::size_t config;
    std::size_t scenario;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t s = 0; s < configs[c].scenarios.size(); ++s) jobs.push_back({c, s});
  }
  std::vector<RunOutcome> outcomes(jobs.size());
  for_each_index(jobs.size(), Execution::Parallel, [&](std::size_t j) {
    const RunConfig& cfg = configs[jobs[j].config];
    try {
      outcomes[j].trajectory =
          simulate(cfg.scenarios[jobs[j].scenario].initial, cfg.model, cfg.controller, cfg.integrator);
    } catch (const SimulationError& e) {
      outcomes[j].error = e;
    }
  });

  const auto& dir = configs.front().outputs.directory;
  std::filesystem::create_directories(dir);
  std::ofstream table(dir / "sweep.csv", std::ios::binary);
  if (!table) throw std::runtime_error((dir / "sweep.csv").string() + ": cannot open for writing");
  table << "parameter,value,scenario,status,final_q_norm,decay_ratio,final_H_d,H_d_monotone,min_abs_w1\n";

  bool any_error = false;
  bool any_failure = false;
  char buf[256];
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const RunConfig& cfg = configs[jobs[j].config];
    const double value = values[jobs[j].config];
    const std::string& name = cfg.scenarios[jobs[j].scenario].name;
    if (!outcomes[j].ok()) {
      any_error = true;
      std::snprintf(buf, sizeof buf, "%.17g", value);
      table << parameter << ',' << buf << ',' << name << ',' << to_string(outcomes[j].error->kind())
            << ",,,,,\n";
      continue;
    }
    const auto m = convergence_metrics(*outcomes[j].trajectory, cfg.model, cfg.controller, cfg.integrator);
    any_failure = any_failure || !m.H_d_monotone || !(m.min_abs_w1 > 0.0);
    std::snprintf(buf, sizeof buf, "%.17g,%s,ok,%.17g,%.17g,%.17g,%d,%.17g", value, name.c_str(),
                  m.final_q_norm, m.decay_ratio, m.final_H_d, m.H_d_monotone ? 1 : 0, m.min_abs_w1);
    table << parameter << ',' << buf << '\n';
    log << parameter << '=' << value << ' ' << name << ": |q(T)|/|q(0)| = " << m.decay_ratio
        << ", H_d(T) = " << m.final_H_d << '\n';
  }
  return exit_code(any_error, any_failure);
}

}  // namespace sleigh::app
