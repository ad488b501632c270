#pragma once

#include <string>
#include <variant>

#include "sleigh/types.hpp"

namespace sleigh {

// =============================================================================
// Damping models
// =============================================================================

struct ZeroDamping {};

/// D = diag(d1, d2), d1, d2 >= 0.
struct ConstantDamping {
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Smooth Coulomb-friction approximation D = diag(1/sqrt(eps + p1^2), 1/sqrt(eps + p2^2)).
struct CoulombDamping {
  double epsilon = 0.1;
};

using DampingModel = std::variant<ZeroDamping, ConstantDamping, CoulombDamping>;

/// Symmetric positive semidefinite damping matrix D(q, p).
Mat2 damping_matrix(const DampingModel& damping, const QState& state);

/// Stable lowercase name: "zero", "constant" or "coulomb".
std::string damping_name(const DampingModel& damping);

// =============================================================================
// Model parameters
// =============================================================================

/// Open-loop sleigh physics. Validated on construction; offset = 0 gives the
/// knife-edge system.
class ModelParams {
 public:
  /// @throws std::invalid_argument if mass <= 0, inertia < 0, offset < 0,
  /// inertia + mass*offset^2 <= 0, or the damping parameters are invalid.
  ModelParams(double mass, double inertia, double offset, DampingModel damping = ZeroDamping{});

  double mass() const { return mass_; }
  double inertia() const { return inertia_; }
  double offset() const { return offset_; }
  const DampingModel& damping() const { return damping_; }

  /// J + m l^2, the rotational inertia about the contact point.
  double rotational_inertia() const { return inertia_ + mass_ * offset_ * offset_; }

  ModelParams with_damping(DampingModel damping) const;
  ModelParams with_offset(double offset) const;

 private:
  double mass_;
  double inertia_;
  double offset_;
  DampingModel damping_;
};

// =============================================================================
// Port-Hamiltonian structure
// =============================================================================

/// M = diag(m, J + m l^2).
Mat2 mass_matrix(const ModelParams& params);

/// Q(q): maps momentum-space velocities to configuration rates.
Mat32 input_matrix_q(const Vec3& q);

/// Skew-symmetric gyroscopic term J(p).
Mat2 interconnection(const Vec2& p, const ModelParams& params);

/// y = grad_p H = M^{-1} p.
Vec2 passive_output(const QState& state, const ModelParams& params);

/// H = 1/2 p^T M^{-1} p.
double hamiltonian(const QState& state, const ModelParams& params);

/// (q_dot, p_dot) of the open-loop system under input u.
/// @throws NonFiniteError on non-finite state or input.
QStateRate open_loop_rhs(const QState& state, const Vec2& u, const ModelParams& params);

/// No-slip residual xdot*sin(theta) - ydot*cos(theta).
double constraint_residual(const Vec3& q, const Vec3& q_dot);

/// What the plant exposes to a controller that measures configuration and
/// its rate rather than momentum.
struct SensorReading {
  QState state;
  Vec3 q_dot = Vec3::Zero();
};

/// Samples the true plant: q_dot = Q(q) M^{-1} p.
SensorReading sense(const QState& state, const ModelParams& plant);

}  // namespace sleigh
