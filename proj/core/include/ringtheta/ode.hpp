#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ringtheta/errors.hpp"

namespace ringtheta {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = 1e-3;
  double h_init = 0;  // 0: h_max / 10
  long max_steps = 500'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  double max_error_ratio = 0;  // largest accepted local error / tolerance
};

// Dormand-Prince 5(4) with FSAL and a PI-free standard step controller.
// Vec is an Eigen column vector (real or complex); f(t, y, dydt).
template <class Vec>
class Dopri5 {
 public:
  Dopri5(Vec y0, double t0, OdeOptions opt = {}) : y_(std::move(y0)), t_(t0), opt_(opt) {
    h_ = opt_.h_init > 0 ? opt_.h_init : opt_.h_max / 10;
  }

  const Vec& state() const { return y_; }
  double time() const { return t_; }
  const OdeStats& stats() const { return stats_; }

  template <class F>
  void advance_to(double t_end, F&& f) {
    if (t_end < t_) throw NumericalError("ode: cannot integrate backwards in this instance");
    if (!have_k1_) {
      k1_.resizeLike(y_);
      f(t_, y_, k1_);
      have_k1_ = true;
    }
    while (t_ < t_end) {
      double h = std::min({h_, opt_.h_max, t_end - t_});
      bool last = (h == t_end - t_);
      if (h < 1e-15 * std::max(1.0, std::abs(t_)))
        throw NumericalError("ode: step size underflow at t = " + std::to_string(t_));
      step(h, f);
      double err = err_;
      if (err <= 1.0) {
        t_ = last ? t_end : t_ + h;
        y_.swap(y5_);
        k1_.swap(k7_);
        ++stats_.accepted;
        stats_.max_error_ratio = std::max(stats_.max_error_ratio, err);
        double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h_ = std::min(opt_.h_max, h * fac);
      } else {
        ++stats_.rejected;
        h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
      if (stats_.accepted + stats_.rejected > opt_.max_steps)
        throw NumericalError("ode: step budget exhausted at t = " + std::to_string(t_));
    }
  }

 private:
  template <class F>
  void step(double h, F& f) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    k2_.resizeLike(y_);
    k3_.resizeLike(y_);
    k4_.resizeLike(y_);
    k5_.resizeLike(y_);
    k6_.resizeLike(y_);
    k7_.resizeLike(y_);
    tmp_ = y_ + h * a21 * k1_;
    f(t_ + c2 * h, tmp_, k2_);
    tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    f(t_ + c3 * h, tmp_, k3_);
    tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    f(t_ + c4 * h, tmp_, k4_);
    tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    f(t_ + c5 * h, tmp_, k5_);
    tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    f(t_ + h, tmp_, k6_);
    y5_ = y_ + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    f(t_ + h, y5_, k7_);
    tmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    double e = 0;
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
      double sc = opt_.atol + opt_.rtol * std::max(std::abs(y_(i)), std::abs(y5_(i)));
      e = std::max(e, std::abs(tmp_(i)) / sc);
    }
    err_ = e;
  }

  Vec y_, y5_, tmp_, k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  double t_;
  double h_;
  double err_ = 0;
  bool have_k1_ = false;
  OdeOptions opt_;
  OdeStats stats_;
};

}  // namespace ringtheta
