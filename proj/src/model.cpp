#include "sleigh/model.hpp"

#include <cmath>
#include <stdexcept>

namespace sleigh {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_damping(const DampingModel& damping) {
  std::visit(Overloaded{
                 [](const ZeroDamping&) {},
                 [](const ConstantDamping& d) {
                   if (!(d.d1 >= 0.0) || !(d.d2 >= 0.0) || !std::isfinite(d.d1) ||
                       !std::isfinite(d.d2)) {
                     throw std::invalid_argument("constant damping: d1, d2 must be finite and >= 0");
                   }
                 },
                 [](const CoulombDamping& d) {
                   if (!(d.epsilon > 0.0) || !std::isfinite(d.epsilon)) {
                     throw std::invalid_argument("coulomb damping: epsilon must be finite and > 0");
                   }
                 },
             },
             damping);
}

}  // namespace

Mat2 damping_matrix(const DampingModel& damping, const QState& state) {
  const Vec2& p = state.p;
  return std::visit(Overloaded{
                        [](const ZeroDamping&) -> Mat2 { return Mat2::Zero(); },
                        [](const ConstantDamping& d) -> Mat2 {
                          return Vec2(d.d1, d.d2).asDiagonal();
                        },
                        [&p](const CoulombDamping& d) -> Mat2 {
                          return Vec2(1.0 / std::sqrt(d.epsilon + p[0] * p[0]),
                                      1.0 / std::sqrt(d.epsilon + p[1] * p[1]))
                              .asDiagonal();
                        },
                    },
                    damping);
}

std::string damping_name(const DampingModel& damping) {
  return std::visit(Overloaded{
                        [](const ZeroDamping&) { return std::string("zero"); },
                        [](const ConstantDamping&) { return std::string("constant"); },
                        [](const CoulombDamping&) { return std::string("coulomb"); },
                    },
                    damping);
}

ModelParams::ModelParams(double mass, double inertia, double offset, DampingModel damping)
    : mass_(mass), inertia_(inertia), offset_(offset), damping_(damping) {
  if (!std::isfinite(mass) || !std::isfinite(inertia) || !std::isfinite(offset)) {
    throw std::invalid_argument("model: parameters must be finite");
  }
  if (!(mass > 0.0)) throw std::invalid_argument("model.mass must be > 0");
  if (!(inertia >= 0.0)) throw std::invalid_argument("model.inertia must be >= 0");
  if (!(offset >= 0.0)) throw std::invalid_argument("model.offset must be >= 0");
  if (!(rotational_inertia() > 0.0)) {
    throw std::invalid_argument("model: inertia + mass*offset^2 must be > 0");
  }
  validate_damping(damping_);
}

ModelParams ModelParams::with_damping(DampingModel damping) const {
  return ModelParams(mass_, inertia_, offset_, damping);
}

ModelParams ModelParams::with_offset(double offset) const {
  return ModelParams(mass_, inertia_, offset, damping_);
}

Mat2 mass_matrix(const ModelParams& params) {
  return Vec2(params.mass(), params.rotational_inertia()).asDiagonal();
}

Mat32 input_matrix_q(const Vec3& q) {
  const double c = std::cos(q[2]);
  const double s = std::sin(q[2]);
  Mat32 Q;
  Q << c, 0.0,
       s, 0.0,
       0.0, 1.0;
  return Q;
}

Mat2 interconnection(const Vec2& p, const ModelParams& params) {
  const double g = params.mass() * params.offset() / params.rotational_inertia() * p[1];
  Mat2 J;
  J << 0.0, g,
       -g, 0.0;
  return J;
}

Vec2 passive_output(const QState& state, const ModelParams& params) {
  return {state.p[0] / params.mass(), state.p[1] / params.rotational_inertia()};
}

double hamiltonian(const QState& state, const ModelParams& params) {
  return 0.5 * state.p.dot(passive_output(state, params));
}

QStateRate open_loop_rhs(const QState& state, const Vec2& u, const ModelParams& params) {
  if (!state.finite() || !u.allFinite()) {
    throw NonFiniteError("open_loop_rhs: non-finite state or input");
  }
  // grad_q H = 0, so the -Q^T grad_q H block drops out.
  const Vec2 v = passive_output(state, params);
  QStateRate rate;
  rate.q_dot = input_matrix_q(state.q) * v;
  rate.p_dot = (interconnection(state.p, params) - damping_matrix(params.damping(), state)) * v + u;
  return rate;
}

double constraint_residual(const Vec3& q, const Vec3& q_dot) {
  return q_dot[0] * std::sin(q[2]) - q_dot[1] * std::cos(q[2]);
}

SensorReading sense(const QState& state, const ModelParams& plant) {
  return {state, input_matrix_q(state.q) * passive_output(state, plant)};
}

}  // namespace sleigh
