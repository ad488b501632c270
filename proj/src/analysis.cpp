#include "sleigh/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sleigh/transforms.hpp"

namespace sleigh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr double kRateRelTol = 0.05;
constexpr double kRateAbsTol = 1e-6;
// A segment is smooth when the trapezoid rule's own error estimate uses at
// most this fraction of the tolerance.
constexpr double kSmoothFraction = 0.2;

/// Index of the smallest entry; ties resolve to the lowest index so the result
/// does not depend on how the entries were computed.
std::size_t argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> sample_values(const TrajectorySample& s) {
  return {s.t, s.state.q[0], s.state.q[1], s.state.q[2], s.state.p[0], s.state.p[1]};
}

double trapezoid(std::span<const double> x, std::span<const double> f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) acc += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
  return acc;
}

}  // namespace

// -----------------------------------------------------------------------------
// Integral inequality
// -----------------------------------------------------------------------------

SchwarzSides schwarz_sides(std::span<const double> x, std::span<const double> f) {
  if (x.size() < 2 || x.size() != f.size()) {
    throw std::invalid_argument("schwarz: need >= 2 samples and matching x/f lengths");
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i + 1] > x[i])) throw std::invalid_argument("schwarz: grid must be strictly increasing");
  }
  std::vector<double> f2(f.size());
  std::transform(f.begin(), f.end(), f2.begin(), [](double v) { return v * v; });
  const double width = x.back() - x.front();
  const double integral = trapezoid(x, f);
  return {-(integral * integral) / width, -trapezoid(x, f2)};
}

VerificationReport check_schwarz(std::span<const double> x, std::span<const double> f,
                                 double tol) {
  const SchwarzSides s = schwarz_sides(x, f);
  VerificationReport r;
  r.name = "schwarz_inequality";
  r.margin = (s.lhs - s.rhs) + tol * (1.0 + std::abs(s.rhs));
  r.passed = r.margin >= 0.0;
  r.detail = "lhs=" + fmt(s.lhs) + " rhs=" + fmt(s.rhs);
  if (!r.passed) r.witness = Witness{"lhs, rhs, x1, x2", {s.lhs, s.rhs, x.front(), x.back()}};
  return r;
}

VerificationReport schwarz_sweep(const SchwarzSweepSpec& spec, Execution exec) {
  struct Case {
    std::vector<double> x;
    std::vector<double> f;
  };
  // Inputs are drawn serially so both execution paths see identical functions.
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> start(-5.0, 5.0);
  std::uniform_real_distribution<double> width(0.05, 10.0);
  std::uniform_int_distribution<int> knots(2, 12);
  std::normal_distribution<double> value(0.0, 3.0);
  std::bernoulli_distribution jittered(0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t n = std::max<std::size_t>(spec.grid_points, 2);
  std::vector<Case> cases(spec.functions);
  for (auto& c : cases) {
    const double a = start(rng);
    const double b = a + width(rng);
    const int k = knots(rng);
    std::vector<double> kx(k), kf(k);
    for (int j = 0; j < k; ++j) {
      kx[j] = a + (b - a) * j / (k - 1);
      kf[j] = value(rng);
    }
    c.x.resize(n);
    const bool jitter = jittered(rng);
    for (std::size_t i = 0; i < n; ++i) {
      double s = static_cast<double>(i) / static_cast<double>(n - 1);
      if (jitter && i > 0 && i + 1 < n) s += (unit(rng) - 0.5) * 0.9 / static_cast<double>(n - 1);
      c.x[i] = a + (b - a) * s;
    }
    c.f.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = c.x[i];
      const auto it = std::upper_bound(kx.begin(), kx.end(), xi);
      const std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - kx.begin()), 1,
                                                    static_cast<std::size_t>(k - 1));
      const double t = (xi - kx[j - 1]) / (kx[j] - kx[j - 1]);
      c.f[i] = kf[j - 1] + t * (kf[j] - kf[j - 1]);
    }
  }

  std::vector<double> margins(cases.size(), kInf);
  for_each_index(cases.size(), exec, [&](std::size_t i) {
    margins[i] = check_schwarz(cases[i].x, cases[i].f, spec.tol).margin;
  });

  VerificationReport r;
  r.name = "schwarz_sweep";
  std::size_t violations = 0;
  for (double m : margins) violations += m < 0.0 ? 1 : 0;
  r.passed = violations == 0;
  r.detail = std::to_string(cases.size()) + " piecewise-linear functions, " +
             std::to_string(violations) + " violations";
  if (!cases.empty()) {
    const std::size_t worst = argmin(margins);
    r.margin = margins[worst];
    if (!r.passed) {
      const SchwarzSides s = schwarz_sides(cases[worst].x, cases[worst].f);
      r.witness = Witness{"function index, lhs, rhs, x1, x2",
                          {static_cast<double>(worst), s.lhs, s.rhs, cases[worst].x.front(),
                           cases[worst].x.back()}};
    }
  } else {
    r.passed = true;
  }
  return r;
}

// -----------------------------------------------------------------------------
// Invariance of U
// -----------------------------------------------------------------------------

VerificationReport check_invariance_of_U(const Trajectory& traj) {
  VerificationReport r;
  r.name = "invariance_of_U";
  if (traj.empty()) {
    r.passed = false;
    r.detail = "empty trajectory";
    r.witness = Witness{"no samples", {}};
    return r;
  }
  std::vector<double> abs_w1(traj.samples.size());
  for (std::size_t i = 0; i < abs_w1.size(); ++i) abs_w1[i] = std::abs(traj.samples[i].w.w[0]);
  const std::size_t worst = argmin(abs_w1);
  const auto& s = traj.samples[worst];
  r.margin = abs_w1[worst];
  r.passed = std::isfinite(r.margin) && r.margin > 0.0;
  r.detail = "min |w1| = " + fmt(r.margin) + " at t = " + fmt(s.t);
  r.witness = Witness{"t, x, y, theta, p1, p2", sample_values(s)};
  return r;
}

// -----------------------------------------------------------------------------
// Equilibrium residual
// -----------------------------------------------------------------------------

ResidualSystem equilibrium_residual(const WState& w, const Vec3& gains) {
  const Vec3 lw = gains.cwiseProduct(w.w);
  const Vec3 b = jacobian_w_to_z(w).transpose() * annihilator_z(w_to_z(w)).transpose();
  const double bb = b.squaredNorm();
  ResidualSystem out;
  out.w = w;
  out.multiplier = bb > 0.0 ? b.dot(lw) / bb : 0.0;
  out.residual = lw - b * out.multiplier;
  return out;
}

VerificationReport equilibrium_residual_search(const Vec3& gains, const ResidualSearchSpec& spec,
                                               Execution exec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coord(-spec.box, spec.box);
  std::vector<Vec3> points(spec.samples);
  for (auto& w : points) {
    do {
      w = Vec3(coord(rng), coord(rng), coord(rng));
    } while (std::abs(w[0]) <= spec.min_abs_w1);
  }

  std::vector<double> norms(points.size(), kInf);
  for_each_index(points.size(), exec, [&](std::size_t i) {
    norms[i] = equilibrium_residual({points[i]}, gains).residual.norm();
  });

  VerificationReport r;
  r.name = "equilibrium_residual_search";
  std::size_t hits = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (norms[i] < spec.tol && std::abs(points[i][0]) >= spec.tol) ++hits;
  }
  r.passed = hits == 0;
  r.detail = std::to_string(points.size()) + " samples in U, " + std::to_string(hits) +
             " with residual < " + fmt(spec.tol);
  if (!points.empty()) {
    const std::size_t best = argmin(norms);
    r.margin = norms[best] - spec.tol;
    const ResidualSystem sys = equilibrium_residual({points[best]}, gains);
    r.witness = Witness{"w1, w2, w3, a, |residual|",
                        {points[best][0], points[best][1], points[best][2], sys.multiplier,
                         norms[best]}};
  }
  return r;
}

// -----------------------------------------------------------------------------
// Matching
// -----------------------------------------------------------------------------

WStateRate pushed_forward_rhs(const WState& w, const Vec2& p, const ModelParams& model,
                              const ControllerParams& ctrl) {
  const ZState z = w_to_z(w);
  const QState state{z_to_q(z), p};
  const SensorReading reading = sense(state, model);
  const Vec2 u = control_from_q(reading, ctrl, model);
  const QStateRate rate = open_loop_rhs(state, u, model);
  WStateRate out;
  out.w_dot = jacobian_z_to_w(z) * (jacobian_q_to_z(state.q) * rate.q_dot);
  out.p_dot = rate.p_dot;
  return out;
}

double matching_deviation(const WStateRate& a, const WStateRate& b) {
  Eigen::Matrix<double, 5, 1> va, vb;
  va << a.w_dot, a.p_dot;
  vb << b.w_dot, b.p_dot;
  return (va - vb).cwiseAbs().maxCoeff() / std::max(1.0, vb.cwiseAbs().maxCoeff());
}

VerificationReport check_matching(const ModelParams& model, const ControllerParams& plant_ctrl,
                                  const ControllerParams& target_ctrl, const MatchingSpec& spec,
                                  Execution exec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> wc(-spec.w_box, spec.w_box);
  std::uniform_real_distribution<double> pc(-spec.p_box, spec.p_box);
  struct Sample {
    WState w;
    Vec2 p;
  };
  std::vector<Sample> samples(spec.samples);
  for (auto& s : samples) {
    do {
      s.w.w = Vec3(wc(rng), wc(rng), wc(rng));
    } while (std::abs(s.w.w[0]) <= spec.min_abs_w1);
    s.p = Vec2(pc(rng), pc(rng));
  }

  std::vector<double> dev(samples.size(), 0.0);
  for_each_index(samples.size(), exec, [&](std::size_t i) {
    const auto& s = samples[i];
    dev[i] = matching_deviation(pushed_forward_rhs(s.w, s.p, model, plant_ctrl),
                                closed_loop_rhs_w(s.w, s.p, target_ctrl, model));
  });

  VerificationReport r;
  r.name = "matching";
  if (samples.empty()) {
    r.passed = true;
    r.margin = spec.tol;
    r.detail = "no samples";
    return r;
  }
  // Worst sample = largest deviation = smallest margin.
  std::vector<double> margins(dev.size());
  std::transform(dev.begin(), dev.end(), margins.begin(), [&](double d) { return spec.tol - d; });
  const std::size_t worst = argmin(margins);
  r.margin = margins[worst];
  r.passed = r.margin > 0.0;
  r.detail = std::to_string(samples.size()) + " samples, max relative deviation " + fmt(dev[worst]);
  const auto& s = samples[worst];
  r.witness = Witness{"w1, w2, w3, p1, p2, deviation",
                      {s.w.w[0], s.w.w[1], s.w.w[2], s.p[0], s.p[1], dev[worst]}};
  return r;
}

VerificationReport check_matching(const ModelParams& model, const ControllerParams& ctrl,
                                  const MatchingSpec& spec, Execution exec) {
  return check_matching(model, ctrl, ctrl, spec, exec);
}

// -----------------------------------------------------------------------------
// Trajectory audits
// -----------------------------------------------------------------------------

VerificationReport energy_audit(const Trajectory& traj, const IntegratorConfig& cfg) {
  VerificationReport r;
  r.name = "energy_audit";
  std::size_t violations = 0;
  double worst = kInf;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const double h0 = traj.samples[i].H_d;
    const double h1 = traj.samples[i + 1].H_d;
    const double tol = 10.0 * (cfg.abs_tol + cfg.rel_tol * h0);
    const double margin = tol - (h1 - h0);
    if (margin < 0.0) ++violations;
    if (margin < worst) {
      worst = margin;
      worst_i = i;
    }
  }
  r.passed = violations == 0;
  r.margin = traj.samples.size() > 1 ? worst : 0.0;
  r.detail = std::to_string(violations) + " increases beyond audit tolerance over " +
             std::to_string(traj.samples.size() > 0 ? traj.samples.size() - 1 : 0) + " intervals";
  if (traj.samples.size() > 1) {
    const auto& a = traj.samples[worst_i];
    const auto& b = traj.samples[worst_i + 1];
    r.witness = Witness{"t_i, t_i+1, H_d(t_i), H_d(t_i+1)", {a.t, b.t, a.H_d, b.H_d}};
  }
  return r;
}

VerificationReport rate_agreement(const Trajectory& traj) {
  VerificationReport r;
  r.name = "rate_agreement";
  const auto& smp = traj.samples;
  const std::size_t n = smp.size();
  // Second derivative of the analytic rate by central differences on the
  // recorded grid; endpoints borrow their neighbour's estimate.
  std::vector<double> curvature(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = smp[i].t - smp[i - 1].t;
    const double h1 = smp[i + 1].t - smp[i].t;
    const double d0 = (smp[i].H_d_rate - smp[i - 1].H_d_rate) / h0;
    const double d1 = (smp[i + 1].H_d_rate - smp[i].H_d_rate) / h1;
    curvature[i] = std::abs(2.0 * (d1 - d0) / (h0 + h1));
  }
  if (n >= 3) {
    curvature[0] = curvature[1];
    curvature[n - 1] = curvature[n - 2];
  }

  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = kInf;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto& a = smp[i];
    const auto& b = smp[i + 1];
    const double h = b.t - a.t;
    const double delta = b.H_d - a.H_d;
    const double tol = std::max(kRateRelTol * std::abs(delta), kRateAbsTol);
    const double quadrature_error = h * h * h / 12.0 * std::max(curvature[i], curvature[i + 1]);
    if (n < 3 || quadrature_error > kSmoothFraction * tol) continue;
    ++checked;
    const double trap = 0.5 * (a.H_d_rate + b.H_d_rate) * h;
    const double margin = tol - std::abs(trap - delta);
    if (margin < 0.0) ++failures;
    if (margin < worst) {
      worst = margin;
      worst_i = i;
    }
  }
  r.passed = failures == 0;
  r.margin = checked > 0 ? worst : 0.0;
  r.detail = std::to_string(checked) + " of " + std::to_string(n > 0 ? n - 1 : 0) +
             " segments resolved by the trapezoid rule, " + std::to_string(failures) +
             " outside tolerance";
  if (checked > 0) {
    const auto& a = smp[worst_i];
    const auto& b = smp[worst_i + 1];
    r.witness = Witness{"t_i, t_i+1, dH_d, trapezoid",
                        {a.t, b.t, b.H_d - a.H_d, 0.5 * (a.H_d_rate + b.H_d_rate) * (b.t - a.t)}};
  }
  return r;
}

VerificationReport constraint_audit(const Trajectory& traj, double tol) {
  VerificationReport r;
  r.name = "constraint_residual";
  double worst = 0.0;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const double v = std::abs(traj.samples[i].constraint_residual);
    if (v > worst) {
      worst = v;
      worst_i = i;
    }
  }
  r.margin = tol - worst;
  r.passed = r.margin > 0.0;
  r.detail = "max |residual| = " + fmt(worst);
  if (!traj.empty()) r.witness = Witness{"t, x, y, theta, p1, p2", sample_values(traj.samples[worst_i])};
  return r;
}

ConvergenceSummary convergence_metrics(const Trajectory& traj, const ModelParams& model,
                                       const ControllerParams& ctrl, const IntegratorConfig& cfg) {
  ConvergenceSummary out;
  if (traj.empty()) return out;
  const auto& first = traj.front();
  const auto& last = traj.back();
  out.initial_q_norm = first.state.q.norm();
  out.final_q_norm = last.state.q.norm();
  out.decay_ratio = out.initial_q_norm > 0.0 ? out.final_q_norm / out.initial_q_norm : 1.0;
  out.initial_H_d = first.H_d;
  out.final_H_d = last.H_d;
  out.final_time = last.t;

  const VerificationReport audit = energy_audit(traj, cfg);
  out.H_d_monotone = audit.passed;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const double h0 = traj.samples[i].H_d;
    if (traj.samples[i + 1].H_d - h0 > 10.0 * (cfg.abs_tol + cfg.rel_tol * h0)) ++out.audit_violations;
  }

  out.min_abs_w1 = kInf;
  for (const auto& s : traj.samples) {
    out.sup_wp_norm = std::max(out.sup_wp_norm, std::sqrt(s.w.w.squaredNorm() + s.state.p.squaredNorm()));
    out.min_abs_w1 = std::min(out.min_abs_w1, std::abs(s.w.w[0]));
  }
  const double inv_mass_min = 1.0 / std::max(model.mass(), model.rotational_inertia());
  const double c = std::min(inv_mass_min, ctrl.potential_gains().minCoeff());
  out.level_set_bound = std::sqrt(2.0 * first.H_d / c);
  return out;
}

VerificationReport boundedness_check(const ConvergenceSummary& summary) {
  VerificationReport r;
  r.name = "boundedness";
  // Relative slack for the integrator-level increase the energy audit allows.
  const double bound = summary.level_set_bound * (1.0 + 1e-6);
  r.margin = bound - summary.sup_wp_norm;
  r.passed = r.margin >= 0.0;
  r.detail = "sup |(w,p)| = " + fmt(summary.sup_wp_norm) + ", sublevel radius " +
             fmt(summary.level_set_bound);
  if (!r.passed) r.witness = Witness{"sup |(w,p)|, bound", {summary.sup_wp_norm, bound}};
  return r;
}

}  // namespace sleigh

// -----------------------------------------------------------------------------
// Robustness
// -----------------------------------------------------------------------------

namespace sleigh {

namespace {

std::vector<QState> robustness_states(const RobustnessSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> qc(-spec.q_box, spec.q_box);
  std::uniform_real_distribution<double> pc(-spec.p_box, spec.p_box);
  std::vector<QState> out(spec.samples);
  for (auto& s : out) {
    do {
      s.q = Vec3(qc(rng), qc(rng), qc(rng));
    } while (std::abs(s.q[2]) <= spec.min_abs_theta);
    s.p = Vec2(pc(rng), pc(rng));
  }
  return out;
}

template <class Diff>
VerificationReport worst_difference(const std::string& name, const std::vector<QState>& states,
                                    double tol, Diff&& diff) {
  VerificationReport r;
  r.name = name;
  double worst = 0.0;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double d = diff(states[i]);
    if (!(d <= worst)) {
      worst = d;
      worst_i = i;
    }
  }
  r.margin = tol - worst;
  r.passed = r.margin >= 0.0;
  r.detail = std::to_string(states.size()) + " states, max |du| = " + fmt(worst);
  if (!states.empty()) {
    const auto& s = states[worst_i];
    r.witness = Witness{"x, y, theta, p1, p2, |du|", {s.q[0], s.q[1], s.q[2], s.p[0], s.p[1], worst}};
  }
  return r;
}

}  // namespace

VerificationReport check_mass_independence(const ModelParams& plant, const ControllerParams& ctrl,
                                           const RobustnessSpec& spec) {
  const ControllerParams velocity = ctrl.with_form(ControlForm::Velocity);
  const ModelParams wrong(plant.mass() * spec.mass_scale, plant.inertia() * spec.mass_scale,
                          plant.offset(), plant.damping());
  return worst_difference("mass_independence", robustness_states(spec), spec.tol,
                          [&](const QState& s) {
                            const SensorReading reading = sense(s, plant);
                            return (control_from_q(reading, velocity, plant) -
                                    control_from_q(reading, velocity, wrong))
                                .cwiseAbs()
                                .maxCoeff();
                          });
}

VerificationReport check_form_agreement(const ModelParams& plant, const ControllerParams& ctrl,
                                        const RobustnessSpec& spec) {
  const ControllerParams velocity = ctrl.with_form(ControlForm::Velocity);
  const ControllerParams momentum = ctrl.with_form(ControlForm::Momentum);
  return worst_difference("form_agreement", robustness_states(spec), spec.tol, [&](const QState& s) {
    const SensorReading reading = sense(s, plant);
    return (control_from_q(reading, velocity, plant) - control_from_q(reading, momentum, plant))
        .cwiseAbs()
        .maxCoeff();
  });
}

VerificationReport check_damping_independence(const ModelParams& plant, const ControllerParams& ctrl,
                                              const RobustnessSpec& spec) {
  const std::array<ModelParams, 3> variants{plant.with_damping(ZeroDamping{}),
                                            plant.with_damping(ConstantDamping{1.0, 1.0}),
                                            plant.with_damping(CoulombDamping{0.1})};
  return worst_difference("damping_independence", robustness_states(spec), 0.0,
                          [&](const QState& s) {
                            double worst = 0.0;
                            for (const ControlForm form : {ControlForm::Velocity, ControlForm::Momentum}) {
                              const ControllerParams c = ctrl.with_form(form);
                              const Vec2 ref = control_from_q(sense(s, plant), c, plant);
                              for (const auto& m : variants) {
                                const Vec2 u = control_from_q(sense(s, m), c, m);
                                worst = std::max(worst, (u - ref).cwiseAbs().maxCoeff());
                              }
                            }
                            return worst;
                          });
}

}  // namespace sleigh
