#include "sleigh/transforms.hpp"

#include <cmath>

namespace sleigh {

namespace {

void guard(const char* where, double w1) {
  if (!(std::abs(w1) >= kSingularityGuard)) throw SingularityError(where, w1);
}

}  // namespace

ZState q_to_z(const Vec3& q) {
  const double c = std::cos(q[2]);
  const double s = std::sin(q[2]);
  return {Vec3(q[2], q[0] * c + q[1] * s, q[0] * s - q[1] * c)};
}

Vec3 z_to_q(const ZState& z) {
  // The rotation block of f_z is orthogonal and symmetric, hence its own inverse.
  const double c = std::cos(z.z[0]);
  const double s = std::sin(z.z[0]);
  return {z.z[1] * c + z.z[2] * s, z.z[1] * s - z.z[2] * c, z.z[0]};
}

WState z_to_w(const ZState& z) {
  const double z1 = z.z[0];
  guard("z_to_w", z1);
  const double w3 = 2.0 * z.z[2] / (z1 * z1);
  return {Vec3(z1, z.z[1] / z1 - w3, w3)};
}

ZState w_to_z(const WState& w) {
  const double w1 = w.w[0];
  return {Vec3(w1, w1 * w.w[1] + w1 * w.w[2], 0.5 * w1 * w1 * w.w[2])};
}

Mat3 jacobian_q_to_z(const Vec3& q) {
  const double c = std::cos(q[2]);
  const double s = std::sin(q[2]);
  Mat3 Jz;
  Jz << 0.0, 0.0, 1.0,
        c, s, -q[0] * s + q[1] * c,
        s, -c, q[0] * c + q[1] * s;
  return Jz;
}

Mat3 jacobian_z_to_w(const ZState& z) {
  const double z1 = z.z[0];
  guard("jacobian_z_to_w", z1);
  const double z2 = z.z[1];
  const double z3 = z.z[2];
  const double inv1 = 1.0 / z1;
  const double inv2 = inv1 * inv1;
  const double inv3 = inv2 * inv1;
  Mat3 Jw;
  Jw << 1.0, 0.0, 0.0,
        -z2 * inv2 + 4.0 * z3 * inv3, inv1, -2.0 * inv2,
        -4.0 * z3 * inv3, 0.0, 2.0 * inv2;
  return Jw;
}

Mat3 jacobian_w_to_z(const WState& w) {
  const double w1 = w.w[0];
  const double w2 = w.w[1];
  const double w3 = w.w[2];
  Mat3 Jinv;
  Jinv << 1.0, 0.0, 0.0,
          w2 + w3, w1, w1,
          w1 * w3, 0.0, 0.5 * w1 * w1;
  return Jinv;
}

Mat32 input_matrix_z(const ZState& z) {
  Mat32 Qz;
  Qz << 0.0, 1.0,
        1.0, -z.z[2],
        0.0, z.z[1];
  return Qz;
}

Row3 annihilator_z(const ZState& z) { return {-z.z[1], 0.0, 1.0}; }

Mat32 input_matrix_w(const WState& w) {
  const double w1 = w.w[0];
  guard("input_matrix_w", w1);
  const double w2 = w.w[1];
  const double w3 = w.w[2];
  Mat32 Qw;
  Qw << 0.0, 1.0,
        1.0 / w1, -(3.0 * w2 + w3) / w1 - 0.5 * w1 * w3,
        0.0, 2.0 * w2 / w1;
  return Qw;
}

Vec2 velocity_to_momentum_gradient(const ZState& z, const Vec2& z_dot12) {
  return {z.z[2] * z_dot12[0] + z_dot12[1], z_dot12[0]};
}

}  // namespace sleigh
