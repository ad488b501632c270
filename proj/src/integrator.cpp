#include "sleigh/integrator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sleigh/dopri5.hpp"
#include "sleigh/transforms.hpp"

namespace sleigh {

namespace {

using State5 = Eigen::Matrix<double, 5, 1>;

// Anything this large is treated as divergence.
constexpr double kDivergenceBound = 1e12;

State5 pack(const QState& s) {
  State5 y;
  y << s.q, s.p;
  return y;
}

QState unpack(const State5& y) { return {y.head<3>(), y.tail<2>()}; }

Vec2 input_for(const QState& state, const ModelParams& model, const ControllerParams& ctrl,
               LoopMode loop) {
  if (loop == LoopMode::Open) return Vec2::Zero();
  // The plant is its own best estimate; the velocity form never reads it.
  return control_from_q(sense(state, model), ctrl, model);
}

std::string describe(const QState& s) {
  std::ostringstream os;
  os.precision(17);
  os << "(x=" << s.q[0] << ", y=" << s.q[1] << ", theta=" << s.q[2] << ", p1=" << s.p[0]
     << ", p2=" << s.p[1] << ")";
  return os.str();
}

}  // namespace

void IntegratorConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(std::isfinite(rel_tol) && rel_tol > 0.0, "integrator.rel_tol must be > 0");
  require(std::isfinite(abs_tol) && abs_tol > 0.0, "integrator.abs_tol must be > 0");
  require(std::isfinite(dt_min) && dt_min > 0.0, "integrator.dt_min must be > 0");
  require(std::isfinite(dt_init) && dt_init >= dt_min, "integrator.dt_init must be >= dt_min");
  require(std::isfinite(dt_max) && dt_max >= dt_init, "integrator.dt_max must be >= dt_init");
  require(std::isfinite(t_final) && t_final > 0.0, "integrator.t_final must be > 0");
  require(std::isfinite(stop_tol) && stop_tol >= 0.0, "integrator.stop_tol must be >= 0");
  require(std::isfinite(record_interval) && record_interval > 0.0,
          "integrator.record_interval must be > 0");
  require(std::isfinite(heading_guard) && heading_guard >= kSingularityGuard,
          "integrator.heading_guard must be >= 1e-9");
}

IntegratorConfig IntegratorConfig::tightened(double factor) const {
  IntegratorConfig out = *this;
  out.rel_tol /= factor;
  out.abs_tol /= factor;
  return out;
}

std::string to_string(SimulationErrorKind kind) {
  switch (kind) {
    case SimulationErrorKind::InitialSingularity: return "InitialSingularity";
    case SimulationErrorKind::StepUnderflow: return "StepUnderflow";
    case SimulationErrorKind::NonFinite: return "NonFinite";
    case SimulationErrorKind::Singularity: return "Singularity";
  }
  return "Unknown";
}

TrajectorySample make_sample(double t, const QState& state, const ModelParams& model,
                             const ControllerParams& ctrl, LoopMode loop) {
  TrajectorySample row;
  row.t = t;
  row.state = state;
  row.z = q_to_z(state.q);
  row.w = z_to_w(row.z);
  row.u = input_for(state, model, ctrl, loop);
  row.H = hamiltonian(state, model);
  row.H_d = closed_loop_energy(row.w, state.p, ctrl, model);
  row.H_d_rate = dissipation_rate(row.w, state.p, ctrl, model);
  row.min_abs_w1 = std::abs(row.w.w[0]);
  const SensorReading reading = sense(state, model);
  row.constraint_residual = constraint_residual(state.q, reading.q_dot);
  return row;
}

Trajectory simulate(const QState& initial, const ModelParams& model, const ControllerParams& ctrl,
                    const IntegratorConfig& cfg, LoopMode loop) {
  cfg.validate();
  if (!initial.finite()) {
    throw SimulationError(SimulationErrorKind::NonFinite,
                          "initial state is not finite: " + describe(initial), 0.0, initial);
  }
  if (!(std::abs(initial.theta()) > cfg.heading_guard)) {
    throw SimulationError(SimulationErrorKind::InitialSingularity,
                          "initial heading |theta| <= " + std::to_string(cfg.heading_guard) +
                              " is too close to the w1 = 0 singular set: " + describe(initial),
                          0.0, initial);
  }

  auto rhs = [&model, &ctrl, loop](double, const State5& y) -> State5 {
    const QState s = unpack(y);
    const QStateRate r = open_loop_rhs(s, input_for(s, model, ctrl, loop), model);
    State5 out;
    out << r.q_dot, r.p_dot;
    return out;
  };

  typename DormandPrince5<5>::Options opt;
  opt.rel_tol = cfg.rel_tol;
  opt.abs_tol = cfg.abs_tol;
  opt.dt_init = cfg.dt_init;
  opt.dt_min = cfg.dt_min;
  opt.dt_max = cfg.dt_max;
  DormandPrince5<5> stepper(rhs, 0.0, pack(initial), opt);

  Trajectory traj;
  double min_abs_w1 = std::numeric_limits<double>::infinity();
  auto record = [&](double t, const QState& s) {
    TrajectorySample row;
    try {
      row = make_sample(t, s, model, ctrl, loop);
    } catch (const SingularityError& e) {
      throw SimulationError(SimulationErrorKind::Singularity,
                            std::string("recorded state inside singularity guard: ") + e.what(),
                            t, s);
    }
    if (!s.finite() || !row.u.allFinite() || !std::isfinite(row.H_d)) {
      throw SimulationError(SimulationErrorKind::NonFinite, "non-finite recorded row at " +
                                                                describe(s),
                            t, s);
    }
    min_abs_w1 = std::min(min_abs_w1, row.min_abs_w1);
    row.min_abs_w1 = min_abs_w1;
    traj.samples.push_back(row);
  };

  record(0.0, initial);
  std::size_t next_index = 1;
  auto grid_time = [&cfg](std::size_t i) {
    return std::min(static_cast<double>(i) * cfg.record_interval, cfg.t_final);
  };

  while (stepper.t() < cfg.t_final) {
    const auto status = stepper.step(cfg.t_final);
    const QState current = unpack(stepper.y());
    if (status == DormandPrince5<5>::Status::Underflow) {
      throw SimulationError(SimulationErrorKind::StepUnderflow,
                            "step size fell below dt_min at t=" + std::to_string(stepper.t()) +
                                " state " + describe(current),
                            stepper.t(), current);
    }
    if (status == DormandPrince5<5>::Status::NonFinite || !current.finite() ||
        stepper.y().cwiseAbs().maxCoeff() > kDivergenceBound) {
      throw SimulationError(SimulationErrorKind::NonFinite,
                            "divergence detected at t=" + std::to_string(stepper.t()), stepper.t(),
                            current);
    }
    if (std::abs(current.theta()) < kSingularityGuard) {
      throw SimulationError(SimulationErrorKind::Singularity,
                            "accepted state inside singularity guard", stepper.t(), current);
    }
    min_abs_w1 = std::min(min_abs_w1, std::abs(current.theta()));

    // Grid points inside this step come from the continuous extension; the
    // end time is recorded from the accepted state itself.
    for (double tg = grid_time(next_index); tg <= stepper.t() && tg < cfg.t_final;
         tg = grid_time(next_index)) {
      record(tg, unpack(stepper.dense(tg)));
      ++next_index;
    }

    if (cfg.stop_tol > 0.0 && current.q.norm() + current.p.norm() < cfg.stop_tol) {
      traj.stats.stopped_early = true;
      if (stepper.t() > traj.back().t) record(stepper.t(), current);
      break;
    }
  }
  if (!traj.stats.stopped_early) record(cfg.t_final, unpack(stepper.y()));

  traj.stats.accepted = stepper.accepted();
  traj.stats.rejected = stepper.rejected();
  traj.stats.singular_rejections = stepper.singular_rejections();
  traj.stats.smallest_step = stepper.smallest_step();
  return traj;
}

std::vector<RunOutcome> batch_simulate(std::span<const QState> initials, const ModelParams& model,
                                       const ControllerParams& ctrl, const IntegratorConfig& cfg,
                                       Execution exec, LoopMode loop) {
  std::vector<RunOutcome> out(initials.size());
  for_each_index(initials.size(), exec, [&](std::size_t i) {
    try {
      out[i].trajectory = simulate(initials[i], model, ctrl, cfg, loop);
    } catch (const SimulationError& e) {
      out[i].error = e;
    }
  });
  return out;
}

}  // namespace sleigh
