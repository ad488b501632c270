#pragma once

#include "sleigh/types.hpp"

// Coordinate chain q -> z -> w used to design and analyse the controller.
//
//   z = f_z(q) = (theta, x cos(theta) + y sin(theta), x sin(theta) - y cos(theta))
//   w = f_w(z) = (z1, z2/z1 - 2 z3/z1^2, 2 z3/z1^2)
//   z = f_w^{-1}(w) = (w1, w1 w2 + w1 w3, w1^2 w3 / 2)
//
// f_w^{-1} is smooth and collapses the whole plane w1 = 0 onto z = 0, so
// regulating w1 to zero with w bounded drives q to the origin. Everything that
// divides by w1 refuses |w1| < kSingularityGuard with a SingularityError.

namespace sleigh {

ZState q_to_z(const Vec3& q);
Vec3 z_to_q(const ZState& z);

/// @throws SingularityError if |z1| < kSingularityGuard.
WState z_to_w(const ZState& z);
ZState w_to_z(const WState& w);

/// d f_z / d q.
Mat3 jacobian_q_to_z(const Vec3& q);

/// d f_w / d z. @throws SingularityError if |z1| < kSingularityGuard.
Mat3 jacobian_z_to_w(const ZState& z);

/// d f_w^{-1} / d w.
Mat3 jacobian_w_to_z(const WState& w);

/// Q_z(z) = (d f_z/d q) Q(q) = [[0, 1], [1, -z3], [0, z2]].
Mat32 input_matrix_z(const ZState& z);

/// Left annihilator of Q_z: [-z2, 0, 1].
Row3 annihilator_z(const ZState& z);

/// Q_w(w) = (d f_w/d z) Q_z(z) at z = f_w^{-1}(w):
///
///   [[0,    1                            ],
///    [1/w1, -(3 w2 + w3)/w1 - w1 w3 / 2  ],
///    [0,    2 w2 / w1                    ]]
///
/// @throws SingularityError if |w1| < kSingularityGuard.
Mat32 input_matrix_w(const WState& w);

/// grad_p H recovered from (z3, z1_dot, z2_dot) without the mass matrix:
/// [[z3, 1], [1, 0]] (z1_dot, z2_dot).
Vec2 velocity_to_momentum_gradient(const ZState& z, const Vec2& z_dot12);

}  // namespace sleigh
