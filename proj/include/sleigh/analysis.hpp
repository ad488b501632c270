#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sleigh/controller.hpp"
#include "sleigh/integrator.hpp"
#include "sleigh/model.hpp"
#include "sleigh/parallel.hpp"
#include "sleigh/types.hpp"

namespace sleigh {

/// Where a check attained its worst margin.
struct Witness {
  std::string label;
  std::vector<double> values;
};

/// Outcome of one numerical check. `margin` is signed: >= 0 means the check
/// held with that much room, < 0 means it was violated by that amount.
struct VerificationReport {
  std::string name;
  bool passed = false;
  double margin = 0.0;
  std::optional<Witness> witness;
  std::string detail;
};

// -----------------------------------------------------------------------------
// Integral inequality  -(1/(b-a)) (int f)^2 >= -int f^2
// -----------------------------------------------------------------------------

struct SchwarzSides {
  double lhs = 0.0;  ///< -(1/(b-a)) (int f)^2
  double rhs = 0.0;  ///< -int f^2
};

/// Both sides by the trapezoidal rule on the grid (x, f). x must be strictly
/// increasing with at least two points.
/// @throws std::invalid_argument on a degenerate grid.
SchwarzSides schwarz_sides(std::span<const double> x, std::span<const double> f);

/// Passes when lhs - rhs >= -tol * (1 + |rhs|).
/// @throws std::invalid_argument on a degenerate grid.
VerificationReport check_schwarz(std::span<const double> x, std::span<const double> f,
                                 double tol = 1e-12);

struct SchwarzSweepSpec {
  std::size_t functions = 1000;
  std::size_t grid_points = 257;
  std::uint64_t seed = 0;
  double tol = 1e-12;
};

/// Random piecewise-linear functions on random intervals; worst margin over all.
VerificationReport schwarz_sweep(const SchwarzSweepSpec& spec, Execution exec = Execution::Parallel);

// -----------------------------------------------------------------------------
// Invariance of U along a trajectory
// -----------------------------------------------------------------------------

/// Passes iff every recorded |w1| is strictly positive.
VerificationReport check_invariance_of_U(const Trajectory& traj);

// -----------------------------------------------------------------------------
// Equilibria of the closed loop with H_d rate identically zero
// -----------------------------------------------------------------------------

/// L w = (d f_w^{-1}/d w)^T (Q_z^perp)^T a  at z = f_w^{-1}(w), solved for the
/// scalar a in the least-squares sense.
struct ResidualSystem {
  WState w;
  Vec3 residual = Vec3::Zero();
  double multiplier = 0.0;
};

ResidualSystem equilibrium_residual(const WState& w, const Vec3& gains);

struct ResidualSearchSpec {
  std::size_t samples = 100000;
  double box = 10.0;          ///< each w_i uniform in [-box, box]
  double min_abs_w1 = 0.01;   ///< rejection bound keeping samples inside U
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

/// Fails iff some sample has residual norm < tol while |w1| >= tol.
VerificationReport equilibrium_residual_search(const Vec3& gains, const ResidualSearchSpec& spec,
                                               Execution exec = Execution::Parallel);

// -----------------------------------------------------------------------------
// Matching: open loop + feedback vs the closed-loop pH vector field
// -----------------------------------------------------------------------------

struct MatchingSpec {
  std::size_t samples = 1000;
  double w_box = 5.0;
  double p_box = 5.0;
  double min_abs_w1 = 0.01;
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

/// (w_dot, p_dot) from the open-loop plant driven by control_from_q, pushed
/// forward through d f_z/d q and d f_w/d z.
WStateRate pushed_forward_rhs(const WState& w, const Vec2& p, const ModelParams& model,
                              const ControllerParams& ctrl);

/// Relative deviation |a - b|_inf / max(1, |b|_inf).
double matching_deviation(const WStateRate& a, const WStateRate& b);

/// Plant driven with `plant_ctrl`, compared against the target built from
/// `target_ctrl`. Passing the same gains twice is the matching check proper.
VerificationReport check_matching(const ModelParams& model, const ControllerParams& plant_ctrl,
                                  const ControllerParams& target_ctrl, const MatchingSpec& spec,
                                  Execution exec = Execution::Parallel);

VerificationReport check_matching(const ModelParams& model, const ControllerParams& ctrl,
                                  const MatchingSpec& spec, Execution exec = Execution::Parallel);

// -----------------------------------------------------------------------------
// Robustness of the feedback to inertia and damping data
// -----------------------------------------------------------------------------

struct RobustnessSpec {
  std::size_t samples = 100;
  double q_box = 5.0;
  double p_box = 5.0;
  double min_abs_theta = 0.01;
  double mass_scale = 10.0;
  double tol = 1e-12;
  std::uint64_t seed = 0;
};

/// Velocity form fed a model estimate with mass and inertia scaled by
/// `mass_scale` must return the unscaled output; margin = tol - max |du|.
VerificationReport check_mass_independence(const ModelParams& plant, const ControllerParams& ctrl,
                                           const RobustnessSpec& spec);

/// Momentum form with the true model vs velocity form; margin = tol - max |du|.
VerificationReport check_form_agreement(const ModelParams& plant, const ControllerParams& ctrl,
                                        const RobustnessSpec& spec);

/// Control output under Zero, Constant(1, 1) and the plant's own damping must
/// be bitwise identical at every sample.
VerificationReport check_damping_independence(const ModelParams& plant, const ControllerParams& ctrl,
                                              const RobustnessSpec& spec);

// -----------------------------------------------------------------------------
// Trajectory audits and convergence
// -----------------------------------------------------------------------------

/// H_d(t_{i+1}) - H_d(t_i) <= 10 (abs_tol + rel_tol H_d(t_i)) for every pair.
VerificationReport energy_audit(const Trajectory& traj, const IntegratorConfig& cfg);

/// Trapezoid of the analytic rate vs the recorded increment, tolerance
/// max(5% |dH_d|, 1e-6). Only smooth segments are checked: those where the
/// trapezoid error estimate h^3/12 |rate''| is at most a fifth of the tolerance.
VerificationReport rate_agreement(const Trajectory& traj);

/// |xdot sin(theta) - ydot cos(theta)| < tol at every sample.
VerificationReport constraint_audit(const Trajectory& traj, double tol = 1e-6);

struct ConvergenceSummary {
  double initial_q_norm = 0.0;
  double final_q_norm = 0.0;
  double decay_ratio = 0.0;
  double initial_H_d = 0.0;
  double final_H_d = 0.0;
  bool H_d_monotone = false;
  std::size_t audit_violations = 0;
  double sup_wp_norm = 0.0;
  /// sqrt(2 H_d(0) / min(eig(M^{-1}), min(L))), the radius of the initial sublevel set.
  double level_set_bound = 0.0;
  double min_abs_w1 = 0.0;
  double final_time = 0.0;
};

ConvergenceSummary convergence_metrics(const Trajectory& traj, const ModelParams& model,
                                       const ControllerParams& ctrl, const IntegratorConfig& cfg);

/// sup |(w, p)| stays within the level-set bound.
VerificationReport boundedness_check(const ConvergenceSummary& summary);

}  // namespace sleigh
