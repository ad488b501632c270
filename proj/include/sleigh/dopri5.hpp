#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <Eigen/Core>

#include "sleigh/types.hpp"

namespace sleigh {

/// Dormand-Prince 5(4) embedded pair with Hairer's PI step-size controller and
/// the 4th-order continuous extension over the last accepted step.
///
/// The right-hand side may throw SingularityError; the step is then rejected
/// and the step size halved.
template <int N>
class DormandPrince5 {
 public:
  using Vec = Eigen::Matrix<double, N, 1>;
  using Rhs = std::function<Vec(double, const Vec&)>;

  struct Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 0.1;
  };

  enum class Status { Accepted, Underflow, NonFinite };

  DormandPrince5(Rhs rhs, double t0, const Vec& y0, const Options& opt)
      : rhs_(std::move(rhs)), opt_(opt), t_(t0), t_prev_(t0), y_(y0), y_prev_(y0), h_(opt.dt_init) {
    k1_ = rhs_(t_, y_);
    if (!k1_.allFinite()) non_finite_start_ = true;
  }

  /// Advances by one accepted step, never beyond t_limit.
  Status step(double t_limit) {
    if (non_finite_start_) return Status::NonFinite;
    bool last_rejected = false;
    for (;;) {
      const double remaining = t_limit - t_;
      double h = std::min({h_, opt_.dt_max, remaining});
      // Snap onto t_limit instead of leaving a sliver step.
      if (remaining - h < 1e-12 * std::max(1.0, std::abs(t_limit))) h = remaining;
      if (h < opt_.dt_min && h < remaining) return Status::Underflow;

      Vec y1, k7, err_vec;
      bool evaluated = true;
      try {
        evaluate_stages(h, y1, k7, err_vec);
      } catch (const SingularityError&) {
        evaluated = false;
        ++singular_rejections_;
      }
      double err = evaluated ? error_norm(y1, err_vec) : std::numeric_limits<double>::infinity();
      if (!std::isfinite(err)) {
        ++rejected_;
        h_ = 0.5 * h;
        last_rejected = true;
        if (h_ < opt_.dt_min) return evaluated ? Status::NonFinite : Status::Underflow;
        continue;
      }

      const double fac11 = std::pow(err, kExpo1);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(fac_old_, kBeta);
        fac = std::clamp(fac / kSafety, kFacMax, kFacMin);
        double h_new = h / fac;
        fac_old_ = std::max(err, 1e-4);
        if (last_rejected) h_new = std::min(h_new, h);

        k1_prev_ = k1_;
        k7_prev_ = k7;
        dense_ = h * (kD1 * k1_ + kD3 * k3_ + kD4 * k4_ + kD5 * k5_ + kD6 * k6_ + kD7 * k7);
        t_prev_ = t_;
        y_prev_ = y_;
        h_last_ = h;
        t_ = (h == remaining) ? t_limit : t_ + h;
        y_ = y1;
        k1_ = k7;
        h_ = h_new;
        smallest_step_ = accepted_ == 0 ? h : std::min(smallest_step_, h);
        ++accepted_;
        return Status::Accepted;
      }
      ++rejected_;
      h_ = h / std::min(kFacMin, fac11 / kSafety);
      last_rejected = true;
    }
  }

  /// Continuous extension on [t_prev, t] of the last accepted step.
  Vec dense(double t) const {
    if (h_last_ == 0.0) return y_;
    const double s = (t - t_prev_) / h_last_;
    const double s1 = 1.0 - s;
    const Vec r2 = y_ - y_prev_;
    const Vec r3 = h_last_ * k1_prev_ - r2;
    const Vec r4 = r2 - h_last_ * k7_prev_ - r3;
    return y_prev_ + s * (r2 + s1 * (r3 + s * (r4 + s1 * dense_)));
  }

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  const Vec& y() const { return y_; }
  std::size_t accepted() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }
  std::size_t singular_rejections() const { return singular_rejections_; }
  double smallest_step() const { return smallest_step_; }

 private:
  // Butcher tableau.
  static constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
  static constexpr double kA21 = 1.0 / 5;
  static constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
  static constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
  static constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                          kA54 = -212.0 / 729;
  static constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                          kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
  static constexpr double kA71 = 35.0 / 384, kA73 = 500.0 / 1113, kA74 = 125.0 / 192,
                          kA75 = -2187.0 / 6784, kA76 = 11.0 / 84;
  // 5th minus embedded 4th order weights.
  static constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                          kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
  // Continuous extension.
  static constexpr double kD1 = -12715105075.0 / 11282082432.0,
                          kD3 = 87487479700.0 / 32700410799.0,
                          kD4 = -10690763975.0 / 1880347072.0,
                          kD5 = 701980252875.0 / 199316789632.0,
                          kD6 = -1453857185.0 / 822651844.0, kD7 = 69997945.0 / 29380423.0;
  // PI controller.
  static constexpr double kBeta = 0.04, kExpo1 = 0.2 - kBeta * 0.75, kSafety = 0.9;
  static constexpr double kFacMin = 1.0 / 0.2, kFacMax = 1.0 / 10.0;

  void evaluate_stages(double h, Vec& y1, Vec& k7, Vec& err_vec) {
    const Vec& y = y_;
    const Vec& k1 = k1_;
    const Vec k2 = rhs_(t_ + kC2 * h, y + h * kA21 * k1);
    k3_ = rhs_(t_ + kC3 * h, y + h * (kA31 * k1 + kA32 * k2));
    k4_ = rhs_(t_ + kC4 * h, y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3_));
    k5_ = rhs_(t_ + kC5 * h, y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3_ + kA54 * k4_));
    k6_ = rhs_(t_ + h,
               y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3_ + kA64 * k4_ + kA65 * k5_));
    y1 = y + h * (kA71 * k1 + kA73 * k3_ + kA74 * k4_ + kA75 * k5_ + kA76 * k6_);
    k7 = rhs_(t_ + h, y1);
    err_vec = h * (kE1 * k1 + kE3 * k3_ + kE4 * k4_ + kE5 * k5_ + kE6 * k6_ + kE7 * k7);
  }

  double error_norm(const Vec& y1, const Vec& err_vec) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y1.size(); ++i) {
      const double scale = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
      const double r = err_vec[i] / scale;
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(y1.size()));
  }

  Rhs rhs_;
  Options opt_;
  double t_, t_prev_;
  Vec y_, y_prev_;
  double h_;
  double h_last_ = 0.0;
  double fac_old_ = 1e-4;
  Vec k1_, k3_, k4_, k5_, k6_;
  Vec k1_prev_, k7_prev_, dense_;
  bool non_finite_start_ = false;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::size_t singular_rejections_ = 0;
  double smallest_step_ = 0.0;
};

}  // namespace sleigh
