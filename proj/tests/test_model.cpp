#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sleigh/model.hpp"

using namespace sleigh;

namespace {

ModelParams paper_zero() { return ModelParams(2.0, 1.0, 1.0); }

// m = 2, J = 0, l = 1 gives M = diag(2, 2).
ModelParams diag22() { return ModelParams(2.0, 0.0, 1.0); }

QState state(Vec3 q, Vec2 p) { return QState{q, p}; }

}  // namespace

TEST(MassMatrix, Examples) {
  // J + m l^2 = 1 + 2 = 3 for the published parameters.
  EXPECT_EQ(mass_matrix(ModelParams(2, 1, 1)), Mat2(Vec2(2, 3).asDiagonal()));
  EXPECT_EQ(mass_matrix(diag22()), Mat2(Vec2(2, 2).asDiagonal()));
  EXPECT_EQ(mass_matrix(ModelParams(1, 1, 0)), Mat2(Vec2(1, 1).asDiagonal()));
  EXPECT_EQ(mass_matrix(ModelParams(3, 2, 2)), Mat2(Vec2(3, 14).asDiagonal()));
}

TEST(ModelParams, RejectsInvalid) {
  EXPECT_THROW(ModelParams(0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ModelParams(-1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ModelParams(1.0, -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ModelParams(1.0, 1.0, -0.5), std::invalid_argument);
  // J = 0 with l = 0 leaves no rotational inertia.
  EXPECT_THROW(ModelParams(1.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(ModelParams(1.0, 1.0, 1.0, ConstantDamping{-1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(ModelParams(1.0, 1.0, 1.0, CoulombDamping{0.0}), std::invalid_argument);
  EXPECT_THROW(ModelParams(std::nan(""), 1.0, 1.0), std::invalid_argument);
}

TEST(OpenLoopRhs, Equilibrium) {
  const auto r = open_loop_rhs(QState{}, Vec2::Zero(), paper_zero());
  EXPECT_EQ(r.q_dot, Vec3::Zero());
  EXPECT_EQ(r.p_dot, Vec2::Zero());
}

TEST(OpenLoopRhs, StraightLineMotion) {
  const auto r = open_loop_rhs(state(Vec3(0, 0, 0), Vec2(2, 0)), Vec2::Zero(), paper_zero());
  EXPECT_NEAR(r.q_dot[0], 1.0, 1e-15);
  EXPECT_NEAR(r.q_dot[1], 0.0, 1e-15);
  EXPECT_NEAR(r.q_dot[2], 0.0, 1e-15);
  EXPECT_EQ(r.p_dot, Vec2::Zero());

  const auto s = open_loop_rhs(state(Vec3(0, 0, M_PI / 2), Vec2(2, 0)), Vec2::Zero(), paper_zero());
  EXPECT_NEAR(s.q_dot[0], 0.0, 1e-15);
  EXPECT_NEAR(s.q_dot[1], 1.0, 1e-15);
  EXPECT_NEAR(s.q_dot[2], 0.0, 1e-15);
}

TEST(OpenLoopRhs, HandEvaluatedGyroscopicTerm) {
  // M = diag(2, 3), g = m l / (J + m l^2) p2 = 2/3 for p = (1, 1).
  // p_dot = J(p) M^{-1} p + u = [[0, g], [-g, 0]] (1/2, 1/3) + u.
  const auto r = open_loop_rhs(state(Vec3(0.3, -0.2, 0.7), Vec2(1, 1)), Vec2(0.25, -0.5), paper_zero());
  const double g = 2.0 / 3.0;
  EXPECT_NEAR(r.p_dot[0], g / 3.0 + 0.25, 1e-15);
  EXPECT_NEAR(r.p_dot[1], -g * 0.5 - 0.5, 1e-15);
}

TEST(OpenLoopRhs, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(open_loop_rhs(state(Vec3(nan, 0, 0), Vec2::Zero()), Vec2::Zero(), paper_zero()),
               NonFiniteError);
  EXPECT_THROW(open_loop_rhs(QState{}, Vec2(std::numeric_limits<double>::infinity(), 0), paper_zero()),
               NonFiniteError);
}

TEST(PassiveOutput, Examples) {
  const auto m = diag22();
  EXPECT_EQ(passive_output(state(Vec3::Zero(), Vec2(0, 0)), m), Vec2(0, 0));
  EXPECT_EQ(passive_output(state(Vec3::Zero(), Vec2(2, 2)), m), Vec2(1, 1));
  EXPECT_EQ(passive_output(state(Vec3::Zero(), Vec2(4, -2)), m), Vec2(2, -1));
}

TEST(Hamiltonian, Examples) {
  const auto m = diag22();
  EXPECT_EQ(hamiltonian(state(Vec3::Zero(), Vec2(0, 0)), m), 0.0);
  EXPECT_DOUBLE_EQ(hamiltonian(state(Vec3::Zero(), Vec2(2, 0)), m), 1.0);
  EXPECT_DOUBLE_EQ(hamiltonian(state(Vec3::Zero(), Vec2(2, 2)), m), 2.0);
}

TEST(Interconnection, SkewSymmetric) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const ModelParams m(1.0 + std::abs(u(rng)), std::abs(u(rng)) + 0.1, std::abs(u(rng)));
    const Mat2 J = interconnection(Vec2(u(rng), u(rng)), m);
    EXPECT_EQ(J + J.transpose(), Mat2::Zero());
  }
}

TEST(Interconnection, VanishesOnKnifeEdge) {
  EXPECT_EQ(interconnection(Vec2(3, -4), ModelParams(2, 1, 0)), Mat2::Zero());
}

TEST(Damping, ModelsArePositiveSemidefinite) {
  const QState s = state(Vec3(1, 2, 3), Vec2(0.5, -2));
  EXPECT_EQ(damping_matrix(ZeroDamping{}, s), Mat2::Zero());
  EXPECT_EQ(damping_matrix(ConstantDamping{1.0, 2.0}, s), Mat2(Vec2(1, 2).asDiagonal()));
  const Mat2 c = damping_matrix(CoulombDamping{0.1}, s);
  EXPECT_NEAR(c(0, 0), 1.0 / std::sqrt(0.1 + 0.25), 1e-15);
  EXPECT_NEAR(c(1, 1), 1.0 / std::sqrt(0.1 + 4.0), 1e-15);
  EXPECT_EQ(c(0, 1), 0.0);
  EXPECT_EQ(damping_name(ZeroDamping{}), "zero");
  EXPECT_EQ(damping_name(ConstantDamping{}), "constant");
  EXPECT_EQ(damping_name(CoulombDamping{}), "coulomb");
}

// dH/dt = -y^T D y + y^T u along the open-loop field.
TEST(OpenLoopRhs, PowerBalance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  const ModelParams m = oracle::paper_model();
  for (int i = 0; i < 200; ++i) {
    const QState s = state(Vec3(u(rng), u(rng), u(rng)), Vec2(u(rng), u(rng)));
    const Vec2 in(u(rng), u(rng));
    const auto r = open_loop_rhs(s, in, m);
    const Vec2 y = mass_matrix(m).inverse() * s.p;
    const double dH = y.dot(r.p_dot);
    const double expected = -y.dot(damping_matrix(m.damping(), s) * y) + y.dot(in);
    EXPECT_NEAR(dH, expected, 1e-12 * (1 + std::abs(expected)));
  }
}

TEST(Sense, SatisfiesConstraint) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) {
    const QState s = state(Vec3(u(rng), u(rng), u(rng)), Vec2(u(rng), u(rng)));
    const SensorReading r = sense(s, oracle::paper_model());
    EXPECT_LT(std::abs(constraint_residual(s.q, r.q_dot)), 1e-14);
    EXPECT_EQ(r.q_dot, open_loop_rhs(s, Vec2::Zero(), oracle::paper_model()).q_dot);
  }
}
