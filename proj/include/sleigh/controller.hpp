#pragma once

#include <string>

#include "sleigh/model.hpp"
#include "sleigh/types.hpp"

namespace sleigh {

/// How grad_p H is obtained: from momentum through a model estimate, or from
/// measured configuration rates (no inertia data needed).
enum class ControlForm { Momentum, Velocity };

std::string to_string(ControlForm form);
ControlForm parse_control_form(const std::string& name);

/// Shaping gains for the discontinuous energy-shaping law
///
///   u = -Q_w^T L w - D_hat grad_p H - diag(0, k / w1^2) grad_p H.
class ControllerParams {
 public:
  /// @throws std::invalid_argument unless every gain is > 0 and D_hat is
  /// symmetric positive definite.
  ControllerParams(const Vec3& potential_gains, double singular_damping,
                   const Mat2& injected_damping, ControlForm form = ControlForm::Velocity);

  /// Diagonal of L.
  const Vec3& potential_gains() const { return gains_; }
  /// k.
  double singular_damping() const { return k_; }
  /// D_hat.
  const Mat2& injected_damping() const { return d_hat_; }
  ControlForm form() const { return form_; }

  ControllerParams with_singular_damping(double k) const;
  ControllerParams with_form(ControlForm form) const;

 private:
  Vec3 gains_;
  double k_;
  Mat2 d_hat_;
  ControlForm form_;
};

/// Control law in (w, grad_p H) form.
/// @throws SingularityError if |w1| < kSingularityGuard.
Vec2 control(const WState& w, const Vec2& grad_p, const ControllerParams& params);

/// grad_p H = M_hat^{-1} p using a model estimate.
Vec2 momentum_gradient(const QState& state, const ModelParams& model_estimate);

/// grad_p H from measured (q, q_dot); never touches inertia parameters.
Vec2 measured_momentum_gradient(const Vec3& q, const Vec3& q_dot);

/// Control law fed from plant measurements.
///
/// Momentum form: grad_p H = M_hat^{-1} p from `model_estimate`.
/// Velocity form: grad_p H reconstructed from (q, q_dot); `model_estimate`
/// is ignored entirely.
/// @throws SingularityError if |theta| < kSingularityGuard.
Vec2 control_from_q(const SensorReading& reading, const ControllerParams& params,
                    const ModelParams& model_estimate);

/// H_d = 1/2 p^T M^{-1} p + 1/2 w^T L w.
double closed_loop_energy(const WState& w, const Vec2& p, const ControllerParams& params,
                          const ModelParams& model);

/// grad_w H_d = L w.
Vec3 closed_loop_energy_grad_w(const WState& w, const ControllerParams& params);

/// grad_p H_d = M^{-1} p.
Vec2 closed_loop_energy_grad_p(const Vec2& p, const ModelParams& model);

/// D_d = D_w + D_hat + D_i(w), with D_w the plant damping at the matching (q, p).
/// @throws SingularityError if |w1| < kSingularityGuard.
Mat2 closed_loop_damping(const WState& w, const Vec2& p, const ControllerParams& params,
                         const ModelParams& model);

/// Analytic H_d rate: -grad_p H_d^T D_d grad_p H_d (<= 0).
/// @throws SingularityError if |w1| < kSingularityGuard.
double dissipation_rate(const WState& w, const Vec2& p, const ControllerParams& params,
                        const ModelParams& model);

/// Target closed-loop port-Hamiltonian vector field
///
///   [w_dot; p_dot] = [[0, Q_w], [-Q_w^T, J(p) - D_d]] [grad_w H_d; grad_p H_d].
///
/// Used as the matching oracle for open-loop dynamics plus feedback.
/// @throws SingularityError if |w1| < kSingularityGuard.
WStateRate closed_loop_rhs_w(const WState& w, const Vec2& p, const ControllerParams& params,
                             const ModelParams& model);

}  // namespace sleigh
