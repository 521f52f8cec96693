#include "ringtheta/detfunc.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ringtheta/errors.hpp"
#include "ringtheta/ode.hpp"
#include "ringtheta/parallel.hpp"

namespace ringtheta {

void GyConfig::validate() const {
  if (!(half_length >= 10)) throw ConfigError("gy: half_length must be >= 10");
  if (!(ode_tolerance > 0)) throw ConfigError("gy: ode_tolerance must be positive");
  if (!(max_step > 0 && max_step <= 1e-3)) throw ConfigError("gy: max_step must lie in (0, 1e-3]");
  if (epsilon_grid.empty()) throw ConfigError("gy: empty epsilon grid");
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    if (!(epsilon_grid[i] > 0)) throw ConfigError("gy: epsilon values must be positive");
    if (i && !(epsilon_grid[i] < epsilon_grid[i - 1]))
      throw ConfigError("gy: epsilon grid must be strictly decreasing");
  }
  // the shifted zero mode must stay well below the even continuum edge at 1
  if (epsilon_grid.front() >= 0.1) throw ConfigError("gy: epsilon too large, shifted mode not isolated");
}

void to_json(nlohmann::json& j, const GyConfig& c) {
  j = {{"half_length", c.half_length},
       {"ode_tolerance", c.ode_tolerance},
       {"epsilon_grid", c.epsilon_grid},
       {"max_step", c.max_step}};
}

void from_json(const nlohmann::json& j, GyConfig& c) {
  try {
    GyConfig d;
    c.half_length = j.value("half_length", d.half_length);
    c.ode_tolerance = j.value("ode_tolerance", d.ode_tolerance);
    c.epsilon_grid = j.value("epsilon_grid", d.epsilon_grid);
    c.max_step = j.value("max_step", d.max_step);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("GyConfig: ") + e.what());
  }
}

double fluctuation_potential(double r) {
  double s = std::sin(2.0 * std::atan(std::exp(r)));
  return -2.0 * s * s;
}

namespace {

using V2 = Eigen::Vector2d;
using V3 = Eigen::Vector3d;

OdeOptions ode_opts(const GyConfig& c) {
  OdeOptions o;
  o.rtol = c.ode_tolerance;
  o.atol = 1e-300;  // pure relative control; solutions never pass through zero on (0, L]
  o.h_max = c.max_step;
  o.h_init = c.max_step;
  return o;
}

// y'' = (1 + W + eps) y from r = 0; returns y at each checkpoint.
std::vector<double> shoot(const GyConfig& c, const Potential& w, double eps, V2 y0,
                          const std::vector<double>& checkpoints) {
  auto f = [&](double r, const V2& y, V2& dy) {
    dy(0) = y(1);
    dy(1) = (1.0 + w(r) + eps) * y(0);
  };
  OdeOptions o = ode_opts(c);
  o.atol = 1e-14;  // odd start passes through zero at r = 0
  Dopri5<V2> ode(y0, 0.0, o);
  std::vector<double> out;
  for (double r : checkpoints) {
    ode.advance_to(r, f);
    out.push_back(ode.state()(0));
  }
  return out;
}

struct ZeroMode {
  double norm;
  double slope;
};

// Decaying solution integrated from r = L inward (stable direction), N by quadrature.
ZeroMode zero_mode(const GyConfig& c, const Potential& w, double L) {
  auto f = [&](double s, const V3& y, V3& dy) {
    dy(0) = y(1);
    dy(1) = (1.0 + w(L - s)) * y(0);
    dy(2) = y(0) * y(0);
  };
  OdeOptions o = ode_opts(c);
  o.atol = 1e-30;
  Dopri5<V3> ode(V3(1.0, 1.0, 0.0), 0.0, o);  // psi ~ e^{-r}: dpsi/ds = +psi
  ode.advance_to(L, f);
  const V3& y = ode.state();
  return {y(2) / (y(0) * y(0)), -y(1) / y(0)};
}

std::vector<double> even_ratios(const GyConfig& c, const Potential& w, double L, double norm) {
  std::vector<double> r(c.epsilon_grid.size());
  parallel_for(r.size(), [&](std::size_t k) {
    double eps = c.epsilon_grid[k];
    double v = shoot(c, w, eps, V2(1.0, 0.0), {L})[0];
    r[k] = v / (eps * norm * std::cosh(std::sqrt(1.0 + eps) * L));
  });
  return r;
}

bool is_monotone(const std::vector<double>& y) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i] < y[i - 1]) up = false;
    if (y[i] > y[i - 1]) down = false;
  }
  return up || down;
}

std::string raw_grid(const EvenResult& r) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < r.epsilons.size(); ++i)
    os << (i ? ", " : "") << "eps=" << r.epsilons[i] << ": " << r.ratios[i];
  return os.str();
}

}  // namespace

double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw ConfigError("extrapolate: size mismatch");
  std::vector<double> p = y;
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  return p[0];
}

OddResult gy_ratio_odd_detail(const GyConfig& c, const Potential& w) {
  c.validate();
  const double L = c.half_length;
  auto u = shoot(c, w, 0.0, V2(0.0, 1.0), {L - 2.0, L});
  OddResult r;
  r.ratio_short = u[0] / std::sinh(L - 2.0);
  r.ratio = u[1] / std::sinh(L);
  if (!std::isfinite(r.ratio)) throw NumericalError("gy odd: non-finite ratio");
  r.converged = std::abs(r.ratio - r.ratio_short) < 1e-6;
  return r;
}

double gy_ratio_odd(const GyConfig& c) {
  auto r = gy_ratio_odd_detail(c);
  if (!r.converged)
    throw NumericalError("gy odd: ratio not converged in L (" + std::to_string(r.ratio_short) + " vs " +
                         std::to_string(r.ratio) + ")");
  return r.ratio;
}

EvenResult gy_ratio_even_primed_detail(const GyConfig& c, const Potential& w) {
  c.validate();
  const double L = c.half_length;
  EvenResult r;
  r.epsilons = c.epsilon_grid;
  auto zm = zero_mode(c, w, L);
  r.norm = zm.norm;
  r.zero_mode_slope = zm.slope;
  r.ratios = even_ratios(c, w, L, zm.norm);
  r.monotone = is_monotone(r.ratios);
  r.extrapolated = extrapolate_to_zero(r.epsilons, r.ratios);
  auto zs = zero_mode(c, w, L - 2.0);
  r.ratio_short = extrapolate_to_zero(r.epsilons, even_ratios(c, w, L - 2.0, zs.norm));
  r.converged = std::abs(r.extrapolated - r.ratio_short) < 1e-4;
  return r;
}

double gy_ratio_even_primed(const GyConfig& c) {
  auto r = gy_ratio_even_primed_detail(c);
  if (!r.monotone) throw NumericalError("gy even: extrapolation non-monotone; raw grid " + raw_grid(r));
  if (!r.converged)
    throw NumericalError("gy even: ratio not converged in L (" + std::to_string(r.ratio_short) + " vs " +
                         std::to_string(r.extrapolated) + ")");
  return r.extrapolated;
}

namespace {

Eigen::VectorXd tridiag_eigs(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("fd oracle: eigensolver failed");
  return es.eigenvalues();
}

// Solve (T - s) x = b for symmetric tridiagonal T (no pivoting; s is off the spectrum).
Eigen::VectorXd tridiag_solve(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double s,
                              Eigen::VectorXd b) {
  const Eigen::Index n = d.size();
  Eigen::VectorXd c(n), dd = d.array() - s;
  for (Eigen::Index i = 1; i < n; ++i) {
    double m = e(i - 1) / dd(i - 1);
    dd(i) -= m * e(i - 1);
    b(i) -= m * b(i - 1);
  }
  Eigen::VectorXd x(n);
  x(n - 1) = b(n - 1) / dd(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = (b(i) - e(i) * x(i + 1)) / dd(i);
  return x;
}

double log_ratio(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Eigen::Index skip_a) {
  double s = 0;
  for (Eigen::Index i = skip_a; i < a.size(); ++i) s += std::log(a(i));
  for (Eigen::Index i = 0; i < b.size(); ++i) s -= std::log(b(i));
  return s;
}

}  // namespace

FdResult fd_determinant_oracle(const GyConfig& c, int grid_points, const Potential& w) {
  c.validate();
  if (grid_points < 1000) throw ConfigError("fd oracle: grid_points must be >= 1000");
  const int N = grid_points % 2 ? grid_points : grid_points + 1;
  const double L = c.half_length;
  const double h = 2.0 * L / (N + 1);
  const int half = (N - 1) / 2;  // nodes r_j = j h, j = 0..half
  const double ih2 = 1.0 / (h * h);

  Eigen::VectorXd de(half + 1), dfe(half + 1), ee(half), do_(half), dfo(half), eo(half - 1);
  for (int j = 0; j <= half; ++j) {
    double r = j * h;
    de(j) = 2 * ih2 + 1 + w(r);
    dfe(j) = 2 * ih2 + 1;
    if (j >= 1) {
      do_(j - 1) = de(j);
      dfo(j - 1) = dfe(j);
    }
  }
  for (int j = 0; j < half; ++j) ee(j) = j == 0 ? -std::sqrt(2.0) * ih2 : -ih2;
  for (int j = 0; j < half - 1; ++j) eo(j) = -ih2;

  Eigen::VectorXd lo, lfo, le, lfe;
  parallel_for(4, [&](std::size_t k) {
    switch (k) {
      case 0: lo = tridiag_eigs(do_, eo); break;
      case 1: lfo = tridiag_eigs(dfo, eo); break;
      case 2: le = tridiag_eigs(de, ee); break;
      default: lfe = tridiag_eigs(dfe, ee); break;
    }
  });

  FdResult r;
  r.grid_points = N;
  r.ratio_odd = std::exp(log_ratio(lo, lfo, 0));
  r.lowest_even_eigenvalue = le(0);
  if (std::abs(le(0)) < 0.1) {
    r.zero_mode_removed = true;
    // zero-mode vector by inverse iteration
    Eigen::VectorXd x = Eigen::VectorXd::Ones(half + 1);
    double s = le(0) - 1e-9;
    for (int it = 0; it < 3; ++it) {
      x = tridiag_solve(de, ee, s, x);
      x /= x.norm();
    }
    // function values: f(0) = x0, f(r_j) = x_j / sqrt 2; trapezoid on [0, L], f(L) = 0
    double f0 = x(0);
    double q = 0.5 * f0 * f0;
    for (int j = 1; j <= half; ++j) q += 0.5 * x(j) * x(j);
    r.norm = h * q / (f0 * f0);
    r.ratio_even_primed = std::exp(log_ratio(le, lfe, 1)) / r.norm;
  } else {
    r.ratio_even_primed = std::exp(log_ratio(le, lfe, 0));
  }
  return r;
}

double fd_zero_mode_residual(double L, int grid_points) {
  const double h = 2.0 * L / (grid_points + 1);
  auto sech = [](double r) { return 1.0 / std::cosh(r); };
  double worst = 0;
  for (int i = 1; i <= grid_points; ++i) {
    double r = -L + i * h;
    double lap = (sech(r + h) - 2 * sech(r) + sech(r - h)) / (h * h);
    worst = std::max(worst, std::abs(-lap + (1.0 + fluctuation_potential(r)) * sech(r)));
  }
  return worst;
}

nlohmann::json gy_report(const GyConfig& c, int fd_points) {
  auto odd = gy_ratio_odd_detail(c);
  auto even = gy_ratio_even_primed_detail(c);
  auto fd = fd_determinant_oracle(c, fd_points);
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < even.epsilons.size(); ++i)
    per.push_back({{"epsilon", even.epsilons[i]}, {"ratio", even.ratios[i]}});
  return {{"config", c},
          {"odd", odd.ratio},
          {"even", even.extrapolated},
          {"product", odd.ratio * even.extrapolated},
          {"odd_diagnostics", {{"ratio_L_minus_2", odd.ratio_short}, {"converged", odd.converged}}},
          {"even_diagnostics",
           {{"per_epsilon", per},
            {"norm", even.norm},
            {"zero_mode_slope_at_0", even.zero_mode_slope},
            {"monotone", even.monotone},
            {"extrapolated_L_minus_2", even.ratio_short},
            {"converged", even.converged}}},
          {"fd_oracle",
           {{"grid_points", fd.grid_points},
            {"odd", fd.ratio_odd},
            {"even", fd.ratio_even_primed},
            {"lowest_even_eigenvalue", fd.lowest_even_eigenvalue},
            {"norm", fd.norm}}}};
}

}  // namespace ringtheta
