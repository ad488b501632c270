#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sleigh/analysis.hpp"
#include "sleigh/transforms.hpp"

using namespace sleigh;
using oracle::cplx;
using oracle::V3;

namespace {

const Vec3 kGains(2.0, 0.5, 0.8);

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

Trajectory fabricated(const std::vector<double>& t, const std::vector<double>& H_d,
                      const std::vector<double>& rate) {
  Trajectory traj;
  for (std::size_t i = 0; i < t.size(); ++i) {
    TrajectorySample s;
    s.t = t[i];
    s.state.q = Vec3(1.0, 1.0, 1.0);
    s.w.w = Vec3(1.0, 0.0, 0.0);
    s.H_d = H_d[i];
    s.H_d_rate = rate[i];
    traj.samples.push_back(s);
  }
  return traj;
}

Trajectory paper_run(double t_final) {
  IntegratorConfig cfg;
  cfg.t_final = t_final;
  return simulate(oracle::paper_initial(), oracle::paper_model(), oracle::paper_controller(), cfg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Integral inequality

TEST(Schwarz, ConstantFunctionsAttainEquality) {
  for (double c : {-3.0, 0.0, 0.5, 7.0}) {
    const auto x = linspace(-1.5, 2.0, 33);
    const std::vector<double> f(x.size(), c);
    const SchwarzSides s = schwarz_sides(x, f);
    EXPECT_NEAR(s.lhs, -c * c * 3.5, 1e-12 * (1 + c * c));
    EXPECT_NEAR(s.lhs, s.rhs, 1e-12 * (1 + std::abs(s.rhs)));
    EXPECT_TRUE(check_schwarz(x, f).passed);
  }
}

TEST(Schwarz, IdentityOnUnitInterval) {
  const auto x = linspace(0.0, 1.0, 2001);
  const SchwarzSides s = schwarz_sides(x, x);
  EXPECT_NEAR(s.lhs, -0.25, 1e-12);
  EXPECT_NEAR(s.rhs, -1.0 / 3.0, 1e-6);
  EXPECT_GT(s.lhs, s.rhs);
  EXPECT_TRUE(check_schwarz(x, x).passed);
}

TEST(Schwarz, DegenerateGrids) {
  const std::vector<double> one{0.0};
  EXPECT_THROW(schwarz_sides(one, one), std::invalid_argument);
  const std::vector<double> flat{0.0, 0.0, 1.0};
  const std::vector<double> f{1.0, 2.0, 3.0};
  EXPECT_THROW(schwarz_sides(flat, f), std::invalid_argument);
  const std::vector<double> x{0.0, 1.0};
  EXPECT_THROW(schwarz_sides(x, f), std::invalid_argument);
}

TEST(Schwarz, SweepPasses) {
  const auto r = schwarz_sweep({});
  EXPECT_TRUE(r.passed) << r.detail;
  EXPECT_GE(r.margin, 0.0);
}

// ---------------------------------------------------------------------------
// Invariance of U

TEST(Invariance, PaperTrajectoryStaysInU) {
  const auto r = check_invariance_of_U(paper_run(10.0));
  EXPECT_TRUE(r.passed);
  EXPECT_GT(r.margin, 0.0);
}

TEST(Invariance, FabricatedZeroFails) {
  auto traj = fabricated({0, 1, 2}, {3, 2, 1}, {-1, -1, -1});
  traj.samples[1].w.w[0] = 0.0;
  const auto r = check_invariance_of_U(traj);
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->values[0], 1.0);
  EXPECT_FALSE(check_invariance_of_U(Trajectory{}).passed);
}

// ---------------------------------------------------------------------------
// Equilibrium residual

TEST(EquilibriumResidual, HandExample) {
  const auto sys = equilibrium_residual(WState{Vec3(1, 0, 0)}, kGains);
  EXPECT_DOUBLE_EQ(sys.residual.norm(), 2.0);
  EXPECT_EQ(sys.multiplier, 0.0);
}

TEST(EquilibriumResidual, VanishesOnlyAsW1GoesToZero) {
  for (double eps : {1.0, 0.1, 0.01, 0.001}) {
    const auto sys = equilibrium_residual(WState{Vec3(eps, 0.0, 1.5)}, kGains);
    EXPECT_NEAR(sys.residual.norm(), kGains[0] * eps, 1e-12);
  }
}

TEST(EquilibriumResidual, MatchesIndependentLeastSquares) {
  // b = (d f_w^{-1}/dw)^T (Q_z^perp)^T, Q_z^perp = (-z2, 0, 1), from the
  // complex-step Jacobian and Eigen's QR least squares.
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = oracle::random_point(rng, 10.0, 0.01);
    const Vec3 z = oracle::f_w_inv<double>(w);
    const Mat3 J = oracle::complex_step_jacobian([](const V3<cplx>& v) { return oracle::f_w_inv(v); }, w);
    const Vec3 b = J.transpose() * Vec3(-z[1], 0.0, 1.0);
    const Vec3 lw = kGains.cwiseProduct(w);
    const Eigen::Matrix<double, 1, 1> a = b.colPivHouseholderQr().solve(lw);
    const Vec3 expected = lw - b * a[0];
    const auto sys = equilibrium_residual(WState{w}, kGains);
    EXPECT_LT((sys.residual - expected).norm(), 1e-9 * (1 + lw.norm()));
  }
}

TEST(EquilibriumResidual, SearchFindsNoEquilibrium) {
  ResidualSearchSpec spec;
  spec.samples = 20000;
  const auto r = equilibrium_residual_search(kGains, spec);
  EXPECT_TRUE(r.passed) << r.detail;
  EXPECT_GT(r.margin, 0.0);
}

// ---------------------------------------------------------------------------
// Matching

TEST(Matching, PaperParametersPass) {
  const auto r = check_matching(oracle::paper_model(), oracle::paper_controller(), MatchingSpec{});
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Matching, HoldsForEveryDampingModelAndForm) {
  MatchingSpec spec;
  spec.samples = 300;
  for (const DampingModel& d : {DampingModel{ZeroDamping{}}, DampingModel{ConstantDamping{1, 1}},
                                DampingModel{CoulombDamping{0.1}}}) {
    for (const ControlForm f : {ControlForm::Velocity, ControlForm::Momentum}) {
      const auto r = check_matching(oracle::paper_model().with_damping(d),
                                    oracle::paper_controller().with_form(f), spec);
      EXPECT_TRUE(r.passed) << damping_name(d) << ' ' << to_string(f) << ": " << r.detail;
    }
  }
  const auto knife = check_matching(oracle::paper_model().with_offset(0.0), oracle::paper_controller(), spec);
  EXPECT_TRUE(knife.passed) << knife.detail;
}

TEST(Matching, ZeroMomentumGivesZeroWRate) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 100; ++i) {
    const WState w{oracle::random_point(rng, 5.0, 0.01)};
    const auto a = pushed_forward_rhs(w, Vec2::Zero(), oracle::paper_model(), oracle::paper_controller());
    const auto b = closed_loop_rhs_w(w, Vec2::Zero(), oracle::paper_controller(), oracle::paper_model());
    EXPECT_EQ(a.w_dot, Vec3::Zero());
    EXPECT_EQ(b.w_dot, Vec3::Zero());
  }
}

TEST(Matching, PerturbedControllerFails) {
  const auto& c = oracle::paper_controller();
  const auto r = check_matching(oracle::paper_model(), c, c.with_singular_damping(2.0 * c.singular_damping()),
                                MatchingSpec{});
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->values.size(), 6u);
  EXPECT_GT(r.witness->values[5], 1e-9);
}

TEST(Matching, IndependentPushForwardOracle) {
  // w_dot as the complex-step directional derivative of w(q) along the plant's
  // q_dot; p_dot straight from the open-loop model. No library Jacobians.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pu(-5, 5);
  const auto model = oracle::paper_model();
  const auto ctrl = oracle::paper_controller();
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = oracle::random_point(rng, 5.0, 0.05);
    const Vec2 p(pu(rng), pu(rng));
    const QState s{oracle::f_z_inv(oracle::f_w_inv<double>(w)), p};
    const SensorReading reading = sense(s, model);
    const QStateRate rate = open_loop_rhs(s, control_from_q(reading, ctrl, model), model);
    const Vec3 w_dot = oracle::complex_step_directional(
        [](const V3<cplx>& q) { return oracle::f_w(oracle::f_z(q)); }, s.q, rate.q_dot);
    const auto target = closed_loop_rhs_w(WState{w}, p, ctrl, model);
    const double scale = 1.0 + std::max(target.w_dot.cwiseAbs().maxCoeff(), target.p_dot.cwiseAbs().maxCoeff());
    EXPECT_LT((w_dot - target.w_dot).cwiseAbs().maxCoeff(), 1e-9 * scale);
    EXPECT_LT((rate.p_dot - target.p_dot).cwiseAbs().maxCoeff(), 1e-9 * scale);
  }
}

// ---------------------------------------------------------------------------
// Robustness

TEST(Robustness, MassIndependence) {
  const auto r = check_mass_independence(oracle::paper_model(), oracle::paper_controller(), {});
  EXPECT_TRUE(r.passed) << r.detail;
  // Sanity: the momentum form does see the scaled masses.
  QState s{Vec3(1, 2, 0.7), Vec2(1, -1)};
  const auto reading = sense(s, oracle::paper_model());
  const auto c = oracle::paper_controller().with_form(ControlForm::Momentum);
  const ModelParams scaled(20.0, 10.0, 1.0);
  EXPECT_GT((control_from_q(reading, c, scaled) - control_from_q(reading, c, oracle::paper_model())).norm(), 1e-3);
}

TEST(Robustness, FormAgreement) {
  const auto r = check_form_agreement(oracle::paper_model(), oracle::paper_controller(), {});
  EXPECT_TRUE(r.passed) << r.detail;
  const auto knife = check_form_agreement(oracle::paper_model().with_offset(0.0), oracle::paper_controller(), {});
  EXPECT_TRUE(knife.passed) << knife.detail;
}

TEST(Robustness, DampingIndependence) {
  const auto r = check_damping_independence(oracle::paper_model(), oracle::paper_controller(), {});
  EXPECT_TRUE(r.passed) << r.detail;
  EXPECT_EQ(r.margin, 0.0);
}

// ---------------------------------------------------------------------------
// Trajectory audits

TEST(EnergyAudit, PaperRunIsMonotone) {
  const auto traj = paper_run(20.0);
  const auto r = energy_audit(traj, IntegratorConfig{});
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(EnergyAudit, FabricatedIncreaseFails) {
  const auto r = energy_audit(fabricated({0, 1, 2}, {3, 3.5, 1}, {0, 0, 0}), IntegratorConfig{});
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->values[0], 0.0);
  EXPECT_EQ(r.witness->values[3], 3.5);
}

TEST(RateAgreement, PaperRunAgrees) {
  const auto r = rate_agreement(paper_run(20.0));
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(RateAgreement, QuadraticEnergyIsExactForTrapezoid) {
  // H_d = 10 - t + 0.01 t^2, rate = -1 + 0.02 t: rate is linear, so every
  // segment counts as smooth and the trapezoid is exact.
  const auto t = linspace(0.0, 5.0, 51);
  std::vector<double> h, rate;
  for (double v : t) {
    h.push_back(10 - v + 0.01 * v * v);
    rate.push_back(-1 + 0.02 * v);
  }
  const auto r = rate_agreement(fabricated(t, h, rate));
  EXPECT_TRUE(r.passed);
  EXPECT_NE(r.detail.find("50 of 50"), std::string::npos) << r.detail;
}

TEST(RateAgreement, InconsistentRateFails) {
  const auto t = linspace(0.0, 5.0, 51);
  std::vector<double> h, rate;
  for (double v : t) {
    h.push_back(10 - v);
    rate.push_back(-0.9);  // 10% short of the actual slope
  }
  const auto r = rate_agreement(fabricated(t, h, rate));
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
}

TEST(ConstraintAudit, PassesOnRunAndFailsOnFabricatedSlip) {
  EXPECT_TRUE(constraint_audit(paper_run(5.0)).passed);
  auto traj = fabricated({0, 1}, {1, 1}, {0, 0});
  traj.samples[1].constraint_residual = 1e-3;
  const auto r = constraint_audit(traj);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.witness->values[0], 1.0);
}

TEST(Convergence, UncontrolledRestHasUnitDecayRatio) {
  IntegratorConfig cfg;
  cfg.t_final = 5.0;
  const QState s0{Vec3(1, 2, 0.5), Vec2::Zero()};
  const auto traj = simulate(s0, ModelParams(2, 1, 1), oracle::paper_controller(), cfg, LoopMode::Open);
  const auto m = convergence_metrics(traj, ModelParams(2, 1, 1), oracle::paper_controller(), cfg);
  EXPECT_EQ(m.decay_ratio, 1.0);
  EXPECT_EQ(m.initial_H_d, m.final_H_d);
}

TEST(Convergence, PaperRunIsBounded) {
  IntegratorConfig cfg;
  cfg.t_final = 20.0;
  const auto traj = paper_run(20.0);
  const auto m = convergence_metrics(traj, oracle::paper_model(), oracle::paper_controller(), cfg);
  EXPECT_TRUE(m.H_d_monotone);
  EXPECT_EQ(m.audit_violations, 0u);
  EXPECT_LT(m.final_H_d, m.initial_H_d);
  EXPECT_TRUE(boundedness_check(m).passed);
  ConvergenceSummary broken = m;
  broken.sup_wp_norm = 2 * m.level_set_bound;
  EXPECT_FALSE(boundedness_check(broken).passed);
}
