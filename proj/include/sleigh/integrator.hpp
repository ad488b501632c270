#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleigh/controller.hpp"
#include "sleigh/model.hpp"
#include "sleigh/parallel.hpp"
#include "sleigh/types.hpp"

namespace sleigh {

/// Default admission bound: initial headings with |theta| <= this are refused.
inline constexpr double kInitialHeadingGuard = 1e-3;

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.1;
  double t_final = 100.0;
  /// Stop once |q| + |p| < stop_tol; zero disables.
  double stop_tol = 0.0;
  double record_interval = 0.02;
  /// Admission bound on |theta(0)|; never below kSingularityGuard.
  double heading_guard = kInitialHeadingGuard;

  /// @throws std::invalid_argument naming the offending field.
  void validate() const;
  IntegratorConfig tightened(double factor) const;
};

enum class LoopMode { Closed, Open };

/// One recorded row. w-frame columns are computed through the transforms.
struct TrajectorySample {
  double t = 0.0;
  QState state;
  ZState z;
  WState w;
  Vec2 u = Vec2::Zero();
  double H = 0.0;
  double H_d = 0.0;
  double H_d_rate = 0.0;
  double min_abs_w1 = 0.0;
  double constraint_residual = 0.0;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t singular_rejections = 0;
  double smallest_step = 0.0;
  bool stopped_early = false;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  IntegratorStats stats;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
  bool empty() const { return samples.empty(); }
};

enum class SimulationErrorKind { InitialSingularity, StepUnderflow, NonFinite, Singularity };

std::string to_string(SimulationErrorKind kind);

class SimulationError : public std::runtime_error {
 public:
  SimulationError(SimulationErrorKind kind, const std::string& what, double t, QState state)
      : std::runtime_error(what), kind_(kind), t_(t), state_(state) {}
  SimulationErrorKind kind() const noexcept { return kind_; }
  double time() const noexcept { return t_; }
  const QState& state() const noexcept { return state_; }

 private:
  SimulationErrorKind kind_;
  double t_;
  QState state_;
};

/// Integrates the plant in (q, p) with Dormand-Prince 5(4), PI step control,
/// and fixed-interval recording from the continuous extension.
///
/// The control law is evaluated from plant measurements; a trial stage that
/// lands inside the singularity guard rejects the step.
/// @throws SimulationError
Trajectory simulate(const QState& initial, const ModelParams& model, const ControllerParams& ctrl,
                    const IntegratorConfig& cfg, LoopMode loop = LoopMode::Closed);

/// Builds the recorded row for a state (u evaluated as in `simulate`).
TrajectorySample make_sample(double t, const QState& state, const ModelParams& model,
                             const ControllerParams& ctrl, LoopMode loop);

struct RunOutcome {
  std::optional<Trajectory> trajectory;
  std::optional<SimulationError> error;
  bool ok() const { return trajectory.has_value(); }
};

/// Independent runs, order preserved; a failing run does not abort the batch.
std::vector<RunOutcome> batch_simulate(std::span<const QState> initials, const ModelParams& model,
                                       const ControllerParams& ctrl, const IntegratorConfig& cfg,
                                       Execution exec = Execution::Parallel,
                                       LoopMode loop = LoopMode::Closed);

}  // namespace sleigh
