#include "sleigh/controller.hpp"

#include <cmath>
#include <stdexcept>

#include "sleigh/transforms.hpp"

namespace sleigh {

std::string to_string(ControlForm form) {
  return form == ControlForm::Momentum ? "momentum" : "velocity";
}

ControlForm parse_control_form(const std::string& name) {
  if (name == "momentum") return ControlForm::Momentum;
  if (name == "velocity") return ControlForm::Velocity;
  throw std::invalid_argument("controller.form must be \"momentum\" or \"velocity\", got \"" +
                              name + "\"");
}

ControllerParams::ControllerParams(const Vec3& potential_gains, double singular_damping,
                                   const Mat2& injected_damping, ControlForm form)
    : gains_(potential_gains), k_(singular_damping), d_hat_(injected_damping), form_(form) {
  if (!gains_.allFinite() || !(gains_.minCoeff() > 0.0)) {
    throw std::invalid_argument("controller.gains: l1, l2, l3 must be finite and > 0");
  }
  if (!std::isfinite(k_) || !(k_ > 0.0)) {
    throw std::invalid_argument("controller.k must be finite and > 0");
  }
  if (!d_hat_.allFinite() || d_hat_(0, 1) != d_hat_(1, 0)) {
    throw std::invalid_argument("controller.injected_damping must be finite and symmetric");
  }
  Eigen::LLT<Mat2> llt(d_hat_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("controller.injected_damping must be positive definite");
  }
}

ControllerParams ControllerParams::with_singular_damping(double k) const {
  return ControllerParams(gains_, k, d_hat_, form_);
}

ControllerParams ControllerParams::with_form(ControlForm form) const {
  return ControllerParams(gains_, k_, d_hat_, form);
}

Vec2 control(const WState& w, const Vec2& grad_p, const ControllerParams& params) {
  const Mat32 Qw = input_matrix_w(w);
  const Vec3 Lw = params.potential_gains().cwiseProduct(w.w);
  const double w1 = w.w[0];
  Vec2 u = -Qw.transpose() * Lw - params.injected_damping() * grad_p;
  u[1] -= params.singular_damping() / (w1 * w1) * grad_p[1];
  return u;
}

Vec2 momentum_gradient(const QState& state, const ModelParams& model_estimate) {
  return passive_output(state, model_estimate);
}

Vec2 measured_momentum_gradient(const Vec3& q, const Vec3& q_dot) {
  const ZState z = q_to_z(q);
  const Vec3 z_dot = jacobian_q_to_z(q) * q_dot;
  return velocity_to_momentum_gradient(z, z_dot.head<2>());
}

Vec2 control_from_q(const SensorReading& reading, const ControllerParams& params,
                    const ModelParams& model_estimate) {
  const WState w = z_to_w(q_to_z(reading.state.q));
  const Vec2 grad_p = params.form() == ControlForm::Momentum
                          ? momentum_gradient(reading.state, model_estimate)
                          : measured_momentum_gradient(reading.state.q, reading.q_dot);
  return control(w, grad_p, params);
}

double closed_loop_energy(const WState& w, const Vec2& p, const ControllerParams& params,
                          const ModelParams& model) {
  const Vec2 v = closed_loop_energy_grad_p(p, model);
  return 0.5 * p.dot(v) + 0.5 * w.w.dot(closed_loop_energy_grad_w(w, params));
}

Vec3 closed_loop_energy_grad_w(const WState& w, const ControllerParams& params) {
  return params.potential_gains().cwiseProduct(w.w);
}

Vec2 closed_loop_energy_grad_p(const Vec2& p, const ModelParams& model) {
  return {p[0] / model.mass(), p[1] / model.rotational_inertia()};
}

Mat2 closed_loop_damping(const WState& w, const Vec2& p, const ControllerParams& params,
                         const ModelParams& model) {
  const double w1 = w.w[0];
  if (!(std::abs(w1) >= kSingularityGuard)) throw SingularityError("closed_loop_damping", w1);
  const QState state{z_to_q(w_to_z(w)), p};
  Mat2 Dd = damping_matrix(model.damping(), state) + params.injected_damping();
  Dd(1, 1) += params.singular_damping() / (w1 * w1);
  return Dd;
}

double dissipation_rate(const WState& w, const Vec2& p, const ControllerParams& params,
                        const ModelParams& model) {
  const Vec2 v = closed_loop_energy_grad_p(p, model);
  return -v.dot(closed_loop_damping(w, p, params, model) * v);
}

WStateRate closed_loop_rhs_w(const WState& w, const Vec2& p, const ControllerParams& params,
                             const ModelParams& model) {
  const Mat32 Qw = input_matrix_w(w);
  const Vec3 grad_w = closed_loop_energy_grad_w(w, params);
  const Vec2 grad_p = closed_loop_energy_grad_p(p, model);
  WStateRate rate;
  rate.w_dot = Qw * grad_p;
  rate.p_dot = -Qw.transpose() * grad_w +
               (interconnection(p, model) - closed_loop_damping(w, p, params, model)) * grad_p;
  return rate;
}

}  // namespace sleigh
