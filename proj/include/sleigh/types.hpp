#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sleigh {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Row3 = Eigen::RowVector3d;

/// Absolute guard on |z1| = |w1| = |theta| below which w-frame quantities are
/// refused instead of evaluated.
inline constexpr double kSingularityGuard = 1e-9;

/// Configuration q = (x, y, theta) and momentum p = (p1, p2).
///
/// theta is an unwrapped real coordinate; it enters the transforms directly.
struct QState {
  Vec3 q = Vec3::Zero();
  Vec2 p = Vec2::Zero();

  double x() const { return q[0]; }
  double y() const { return q[1]; }
  double theta() const { return q[2]; }
  bool finite() const { return q.allFinite() && p.allFinite(); }
};

/// Time derivative of a QState.
struct QStateRate {
  Vec3 q_dot = Vec3::Zero();
  Vec2 p_dot = Vec2::Zero();
};

/// Rotated configuration z = f_z(q).
struct ZState {
  Vec3 z = Vec3::Zero();
};

/// Shaped configuration w = f_w(z). Points with w1 = 0 lie outside U.
struct WState {
  Vec3 w = Vec3::Zero();
};

/// Time derivative of the closed-loop (w, p) state.
struct WStateRate {
  Vec3 w_dot = Vec3::Zero();
  Vec2 p_dot = Vec2::Zero();
};

/// Raised when a w-frame quantity is requested with |w1| below the guard.
class SingularityError : public std::domain_error {
 public:
  SingularityError(const std::string& where, double w1)
      : std::domain_error(where + ": |w1| = " + std::to_string(w1) +
                          " below singularity guard"),
        w1_(w1) {}
  double w1() const noexcept { return w1_; }

 private:
  double w1_;
};

/// Raised when a state or input contains NaN/Inf.
class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace sleigh
