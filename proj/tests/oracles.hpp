#pragma once

// Test-side oracles. The coordinate maps are written out again here from their
// defining formulas, templated on the scalar so that complex-step
// differentiation gives Jacobians to machine precision without touching the
// library's own Jacobian code.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "sleigh/config.hpp"
#include "sleigh/controller.hpp"
#include "sleigh/model.hpp"

namespace oracle {

using sleigh::Mat3;
using sleigh::Mat32;
using sleigh::Vec2;
using sleigh::Vec3;
using cplx = std::complex<double>;
template <class T>
using V3 = Eigen::Matrix<T, 3, 1>;

template <class T>
V3<T> f_z(const V3<T>& q) {
  using std::cos, std::sin;
  const T c = cos(q[2]);
  const T s = sin(q[2]);
  return V3<T>(q[2], q[0] * c + q[1] * s, q[0] * s - q[1] * c);
}

template <class T>
V3<T> f_w(const V3<T>& z) {
  return V3<T>(z[0], z[1] / z[0] - 2.0 * z[2] / (z[0] * z[0]), 2.0 * z[2] / (z[0] * z[0]));
}

template <class T>
V3<T> f_w_inv(const V3<T>& w) {
  return V3<T>(w[0], w[0] * w[1] + w[0] * w[2], 0.5 * w[0] * w[0] * w[2]);
}

inline Vec3 f_z_inv(const Vec3& z) {
  // Rotation by theta = z1 is orthogonal with determinant -1 on (x, y).
  const double c = std::cos(z[0]);
  const double s = std::sin(z[0]);
  return Vec3(z[1] * c + z[2] * s, z[1] * s - z[2] * c, z[0]);
}

/// Jacobian of F at x by complex step, step 1e-30.
template <class F>
Mat3 complex_step_jacobian(F&& f, const Vec3& x) {
  constexpr double h = 1e-30;
  Mat3 J;
  for (int j = 0; j < 3; ++j) {
    V3<cplx> xc = x.cast<cplx>();
    xc[j] += cplx(0.0, h);
    const V3<cplx> y = f(xc);
    for (int i = 0; i < 3; ++i) J(i, j) = y[i].imag() / h;
  }
  return J;
}

/// Directional derivative of F at x along v by complex step.
template <class F>
Vec3 complex_step_directional(F&& f, const Vec3& x, const Vec3& v) {
  constexpr double h = 1e-30;
  V3<cplx> xc = x.cast<cplx>();
  for (int i = 0; i < 3; ++i) xc[i] += cplx(0.0, h * v[i]);
  const V3<cplx> y = f(xc);
  return Vec3(y[0].imag() / h, y[1].imag() / h, y[2].imag() / h);
}

/// Central differences with h = 1e-6 max(1, |x_j|).
template <class F>
Mat3 central_difference_jacobian(F&& f, const Vec3& x) {
  Mat3 J;
  for (int j = 0; j < 3; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    Vec3 a = x, b = x;
    a[j] += h;
    b[j] -= h;
    J.col(j) = (f(a) - f(b)) / (2.0 * h);
  }
  return J;
}

inline Mat32 Q_of(const Vec3& q) {
  Mat32 Q;
  Q << std::cos(q[2]), 0.0, std::sin(q[2]), 0.0, 0.0, 1.0;
  return Q;
}

inline sleigh::ModelParams paper_model() {
  return sleigh::ModelParams(2.0, 1.0, 1.0, sleigh::CoulombDamping{0.1});
}

inline sleigh::ControllerParams paper_controller() {
  return sleigh::ControllerParams(Vec3(2.0, 0.5, 0.8), 0.1, Vec2(4.0, 8.0).asDiagonal());
}

inline sleigh::QState paper_initial() {
  sleigh::QState s;
  s.q = Vec3(-3.0, -2.0, M_PI / 8.0);
  return s;
}

/// Uniform point in [-box, box]^3 with |first coordinate| > min_abs_first.
inline Vec3 random_point(std::mt19937_64& rng, double box, double min_abs_first) {
  std::uniform_real_distribution<double> u(-box, box);
  Vec3 v;
  do {
    v = Vec3(u(rng), u(rng), u(rng));
  } while (std::abs(v[0]) <= min_abs_first);
  return v;
}

}  // namespace oracle
