#include <algorithm>
#include <array>
#include <span>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "ringtheta/analysis.hpp"

namespace ringtheta {

FitModel parse_fit_model(const std::string& s) {
  if (s == "n2_prob") return FitModel::n2_prob;
  if (s == "n3_cos_highsym") return FitModel::n3_cos_highsym;
  if (s == "n3_cos_generic") return FitModel::n3_cos_generic;
  throw ConfigError("unknown fit model '" + s + "' (n2_prob, n3_cos_highsym, n3_cos_generic)");
}

std::string to_string(FitModel m) {
  switch (m) {
    case FitModel::n2_prob: return "n2_prob";
    case FitModel::n3_cos_highsym: return "n3_cos_highsym";
    case FitModel::n3_cos_generic: return "n3_cos_generic";
  }
  return "?";
}

namespace {

double slow(FitModel m, double u) {
  switch (m) {
    case FitModel::n2_prob: return 1 + std::cos(u);
    case FitModel::n3_cos_highsym: return 1 + 2 * std::cos(u);
    case FitModel::n3_cos_generic: return 2 * std::cos(u) + std::cos(2 * u);
  }
  return 0;
}

double slow_d(FitModel m, double u) {
  switch (m) {
    case FitModel::n2_prob: return -std::sin(u);
    case FitModel::n3_cos_highsym: return -2 * std::sin(u);
    case FitModel::n3_cos_generic: return -2 * std::sin(u) - 2 * std::sin(2 * u);
  }
  return 0;
}

using Vec = Eigen::VectorXd;

struct Problem {
  FitModel model;
  std::span<const double> t, y;
  std::array<bool, 5> free{true, true, true, true, true};
};

double cost(const Problem& pb, const Vec& p, Vec* r = nullptr) {
  double s = 0;
  if (r) r->resize(Eigen::Index(pb.t.size()));
  for (std::size_t i = 0; i < pb.t.size(); ++i) {
    double ti = pb.t[i];
    double f = p(2) * slow(pb.model, p(0) * ti) + p(3) * std::cos(p(1) * ti + p(4));
    double e = f - pb.y[i];
    if (r) (*r)(Eigen::Index(i)) = e;
    s += e * e;
  }
  return s;
}

Eigen::MatrixXd jacobian(const Problem& pb, const Vec& p) {
  Eigen::MatrixXd J(Eigen::Index(pb.t.size()), 5);
  for (std::size_t i = 0; i < pb.t.size(); ++i) {
    double ti = pb.t[i];
    double u = p(0) * ti, v = p(1) * ti + p(4);
    Eigen::Index k = Eigen::Index(i);
    J(k, 0) = p(2) * slow_d(pb.model, u) * ti;
    J(k, 1) = -p(3) * std::sin(v) * ti;
    J(k, 2) = slow(pb.model, u);
    J(k, 3) = std::cos(v);
    J(k, 4) = -p(3) * std::sin(v);
  }
  for (int c = 0; c < 5; ++c)
    if (!pb.free[c]) J.col(c).setZero();
  return J;
}

void canonical(Vec& p) {
  // S is even in w t; a negative fast frequency flips the phase; keep A2 >= 0
  p(0) = std::abs(p(0));
  if (p(1) < 0) {
    p(1) = -p(1);
    p(4) = -p(4);
  }
  if (p(3) < 0) {
    p(3) = -p(3);
    p(4) += kPi;
  }
  p(4) = reduce_angle(p(4));
}

struct LmOut {
  Vec p;
  double cost;
  bool converged;
};

LmOut levenberg_marquardt(const Problem& pb, Vec p, int max_iter) {
  double mu = 1e-3;
  double c = cost(pb, p);
  bool conv = false;
  Vec r;
  for (int it = 0; it < max_iter; ++it) {
    cost(pb, p, &r);
    Eigen::MatrixXd J = jacobian(pb, p);
    Eigen::MatrixXd A = J.transpose() * J;
    Vec g = J.transpose() * r;
    Vec d = A.diagonal();
    for (int k = 0; k < 5; ++k)
      if (!pb.free[k]) {
        A.row(k).setZero();
        A.col(k).setZero();
        A(k, k) = 1;
        g(k) = 0;
        d(k) = 1;
      }
    for (int k = 0; k < 5; ++k) d(k) = std::max(d(k), 1e-300);
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd M = A;
      M.diagonal() += mu * d;
      Vec step = M.ldlt().solve(-g);
      Vec q = p + step;
      q(0) = std::abs(q(0));
      double cq = cost(pb, q);
      if (std::isfinite(cq) && cq < c) {
        double rel = (c - cq) / std::max(c, 1e-300);
        double srel = 0;
        for (int k = 0; k < 5; ++k) srel = std::max(srel, std::abs(step(k)) / (std::abs(p(k)) + 1e-12));
        p = q;
        c = cq;
        mu = std::max(mu / 5, 1e-12);
        improved = true;
        if (rel < 1e-14 || srel < 1e-12) conv = true;
        break;
      }
      mu *= 4;
    }
    if (!improved) {
      // no downhill step at any damping: stationary to working precision
      conv = true;
    }
    if (conv) break;
  }
  canonical(p);
  return {p, cost(pb, p), conv};
}

// Linear least squares for A1 and the fast quadrature pair at fixed frequencies.
// residual after a least-squares cubic in t: a partial slow cycle otherwise buries a
// weak fast line inside its main lobe on short spans
std::vector<double> detrend_cubic(std::span<const double> t, std::span<const double> y) {
  const Eigen::Index n = Eigen::Index(t.size());
  const double t0 = t.front(), T = t.back() - t.front();
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double u = 2 * (t[std::size_t(i)] - t0) / T - 1;
    A.row(i) << 1, u, u * u, u * u * u;
    b(i) = y[std::size_t(i)];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  Eigen::VectorXd r = b - A * c;
  return {r.data(), r.data() + n};
}

Vec linear_start(const Problem& pb, double w, double wf) {
  const Eigen::Index n = Eigen::Index(pb.t.size());
  Eigen::MatrixXd X(n, 3);
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = pb.t[std::size_t(i)];
    X(i, 0) = pb.free[0] ? slow(pb.model, w * t) : slow(pb.model, 0.0);
    X(i, 1) = std::cos(wf * t);
    X(i, 2) = -std::sin(wf * t);
    y(i) = pb.y[std::size_t(i)];
  }
  Vec c = X.colPivHouseholderQr().solve(y);
  Vec p(5);
  p << w, wf, c(0), std::hypot(c(1), c(2)), std::atan2(c(2), c(1));
  return p;
}

}  // namespace

double fit_model_value(FitModel m, const std::vector<double>& p, double t) {
  if (p.size() != 5) throw ConfigError("fit model: expected 5 parameters");
  return p[2] * slow(m, p[0] * t) + p[3] * std::cos(p[1] * t + p[4]);
}

std::vector<std::pair<double, double>> spectral_peaks(std::span<const double> t, std::span<const double> y,
                                                      int max_peaks) {
  const std::size_t n = t.size();
  if (n < 4 || y.size() != n) throw ConfigError("spectral_peaks: need >= 4 matching samples");
  const double T = t.back() - t.front();
  if (!(T > 0)) throw ConfigError("spectral_peaks: zero time span");
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  const double dt = T / double(n - 1);
  bool uniform = true;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) uniform = false;
  // Hann window: keeps sidelobes of the strong slow line below the fast peak
  std::vector<double> win(n);
  double wsum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    win[i] = 0.5 - 0.5 * std::cos(kTwoPi * (t[i] - t[0]) / T);
    wsum += win[i];
  }
  const int pad = 8;
  const double dw = kTwoPi / (T * pad);
  const int K = int(std::floor((kPi / dt) / dw));
  std::vector<double> amp(std::size_t(K) + 1, 0.0);
  for (int k = 1; k <= K; ++k) {
    const double w = k * dw;
    double re = 0, im = 0;
    if (uniform) {
      // rotate by exp(-i w dt) each sample
      const double cr = std::cos(w * dt), sr = -std::sin(w * dt);
      double zr = std::cos(w * t[0]), zi = -std::sin(w * t[0]);
      for (std::size_t i = 0; i < n; ++i) {
        double v = (y[i] - mean) * win[i];
        re += v * zr;
        im += v * zi;
        double nr = zr * cr - zi * sr;
        zi = zr * sr + zi * cr;
        zr = nr;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double v = (y[i] - mean) * win[i];
        re += v * std::cos(w * t[i]);
        im -= v * std::sin(w * t[i]);
      }
    }
    amp[std::size_t(k)] = 2.0 * std::hypot(re, im) / wsum;
  }
  std::vector<std::pair<double, double>> peaks;
  for (int k = 1; k <= K; ++k) {
    double l = k > 1 ? amp[std::size_t(k - 1)] : 0.0;
    double r = k < K ? amp[std::size_t(k + 1)] : 0.0;
    double c = amp[std::size_t(k)];
    if (c >= l && c > r) {
      double den = l - 2 * c + r;
      double off = den != 0 ? 0.5 * (l - r) / den : 0.0;
      off = std::clamp(off, -0.5, 0.5);
      peaks.push_back({(k + off) * dw, c - 0.25 * (l - r) * off});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](auto& a, auto& b) { return a.second > b.second; });
  if (int(peaks.size()) > max_peaks) peaks.resize(std::size_t(max_peaks));
  return peaks;
}

void to_json(nlohmann::json& j, const FitResult& r) {
  j = {{"model", to_string(r.model)},
       {"omega_tun", r.omega_tun},
       {"omega_fast", r.omega_fast},
       {"A1", r.A1},
       {"A2", r.A2},
       {"phi_fast", r.phi_fast},
       {"residual_rms", r.residual_rms},
       {"converged", r.converged},
       {"frozen", r.frozen},
       {"possibly_degenerate", r.possibly_degenerate},
       {"covariance_diag", r.covariance_diag},
       {"starts", r.starts},
       {"start_residuals", r.start_residuals}};
}

FitResult fit_tunneling_probability(std::span<const double> t, std::span<const double> y, FitModel model,
                                    const FitOptions& opt) {
  if (t.size() != y.size()) throw ConfigError("fit: times and values differ in length");
  if (t.size() < 200) throw ConfigError("fit: need at least 200 samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(y[i])) throw ConfigError("fit: non-finite sample");
    if (i && !(t[i] > t[i - 1])) throw ConfigError("fit: times must increase strictly");
  }
  const double T = t.back() - t.front();
  auto peaks = spectral_peaks(t, y, 12);

  // fast: strongest peak; slow: strongest peak at least 3x below it
  const double w_base = kTwoPi / T;
  double wf0 = peaks.empty() ? 10 * w_base : peaks.front().first;
  double ws0 = 0;
  for (auto& pk : peaks)
    if (pk.first * 3 <= wf0) {
      ws0 = pk.first;
      break;
    }
  if (ws0 == 0) {
    // slow mode may dominate: strongest peak is slow, look for a fast one above it
    for (auto& pk : peaks)
      if (pk.first >= 3 * wf0) {
        ws0 = wf0;
        wf0 = pk.first;
        break;
      }
  }
  std::vector<double> slow_seeds;
  if (ws0 > 0) slow_seeds = {ws0, 0.5 * ws0, 2 * ws0};
  for (double f : {0.125, 0.25, 0.5, 1.0, 2.0}) slow_seeds.push_back(f * w_base);
  std::vector<double> fast_seeds{wf0};
  for (auto& pk : peaks)
    if (fast_seeds.size() < 4 && pk.first > 3 * (ws0 > 0 ? ws0 : w_base) &&
        std::abs(pk.first - wf0) > 2 * w_base)
      fast_seeds.push_back(pk.first);
  auto flat = detrend_cubic(t, y);
  for (auto& pk : spectral_peaks(t, flat, 4))
    if (fast_seeds.size() < 6 && pk.first > 3 * w_base &&
        std::none_of(fast_seeds.begin(), fast_seeds.end(),
                     [&](double f) { return std::abs(f - pk.first) < 2 * w_base; }))
      fast_seeds.push_back(pk.first);

  Problem pb{model, t, y};
  FitResult best;
  best.model = model;
  double best_cost = INFINITY;
  Vec best_p;
  bool best_conv = false;
  for (double wf : fast_seeds)
    for (double ws : slow_seeds) {
      auto out = levenberg_marquardt(pb, linear_start(pb, ws, wf), opt.max_iterations);
      ++best.starts;
      // slow and fast swapped roles: not a valid reading of the model
      if (!(out.p(0) < out.p(1))) continue;
      best.start_residuals.push_back(std::sqrt(out.cost / double(t.size())));
      if (out.cost < best_cost) {
        best_cost = out.cost;
        best_p = out.p;
        best_conv = out.converged;
      }
    }

  // fast-only alternative: slow frequency pinned at zero
  Problem frozen_pb = pb;
  frozen_pb.free[0] = false;
  double fz_cost = INFINITY;
  Vec fz_p;
  for (double wf : fast_seeds) {
    Vec s = linear_start(frozen_pb, 0.0, wf);
    auto out = levenberg_marquardt(frozen_pb, s, opt.max_iterations);
    if (out.cost < fz_cost) {
      fz_cost = out.cost;
      fz_p = out.p;
    }
  }

  const double n = double(t.size());
  bool frozen = best_p.size() == 0 || best_p(0) * T < opt.frozen_phase ||
                std::sqrt(fz_cost / n) <= std::sqrt(best_cost / n) * 1.01 + 1e-12;
  Vec p = frozen ? fz_p : best_p;
  if (frozen) p(0) = 0;
  best.omega_tun = p(0);
  best.omega_fast = p(1);
  best.A1 = p(2);
  best.A2 = p(3);
  best.phi_fast = p(4);
  best.frozen = frozen;
  best.converged = best_conv;
  best.residual_rms = std::sqrt((frozen ? fz_cost : best_cost) / n);
  best.possibly_degenerate = !frozen && p(0) * T < kPi;

  Problem cov_pb = frozen ? frozen_pb : pb;
  Eigen::MatrixXd J = jacobian(cov_pb, p);
  Eigen::MatrixXd A = J.transpose() * J;
  if (frozen) A(0, 0) = 1;
  double dof = std::max(1.0, n - (frozen ? 4.0 : 5.0));
  double s2 = best.residual_rms * best.residual_rms * n / dof;
  Eigen::MatrixXd C = A.completeOrthogonalDecomposition().pseudoInverse() * s2;
  for (int k = 0; k < 5; ++k) best.covariance_diag.push_back(frozen && k == 0 ? 0.0 : C(k, k));
  return best;
}

}  // namespace ringtheta
