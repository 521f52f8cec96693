#pragma once

#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

namespace ringtheta {

struct GyConfig {
  double half_length = 20.0;  // L, r in [0, L]
  double ode_tolerance = 1e-10;
  std::vector<double> epsilon_grid{1e-2, 1e-3, 1e-4};
  double max_step = 1e-3;

  void validate() const;
};

void to_json(nlohmann::json& j, const GyConfig& c);
void from_json(const nlohmann::json& j, GyConfig& c);

using Potential = std::function<double(double)>;

// W(r) = cos(4 arctan(e^r)) - 1, evaluated as -2 sin^2(2 arctan(e^r)) to avoid the
// cancellation near cos = 1.
double fluctuation_potential(double r);

struct OddResult {
  double ratio = 0;          // u(L) / sinh(L)
  double ratio_short = 0;    // same at L - 2
  bool converged = false;    // |ratio - ratio_short| < 1e-6
};

// u'' = (1 + W) u, u(0) = 0, u'(0) = 1.
OddResult gy_ratio_odd_detail(const GyConfig& c, const Potential& w = fluctuation_potential);
double gy_ratio_odd(const GyConfig& c = {});

struct EvenResult {
  std::vector<double> epsilons;
  std::vector<double> ratios;  // v_eps(L) / (eps N cosh(sqrt(1+eps) L))
  double extrapolated = 0;
  double norm = 0;             // N = int_0^L psi0^2, psi0(0) = 1
  double zero_mode_slope = 0;  // psi0'(0)/psi0(0) from the decaying solution; ~0 for a true even zero mode
  bool monotone = true;
  double ratio_short = 0;      // extrapolated value using L - 2
  bool converged = false;
};

EvenResult gy_ratio_even_primed_detail(const GyConfig& c, const Potential& w = fluctuation_potential);
double gy_ratio_even_primed(const GyConfig& c = {});

struct FdResult {
  double ratio_odd = 0;
  double ratio_even_primed = 0;
  double lowest_even_eigenvalue = 0;
  bool zero_mode_removed = false;
  double norm = 0;
  int grid_points = 0;
};

// Second-order finite differences on [-L, L], Dirichlet ends, odd number of interior
// points so r = 0 is a node. Even/odd sectors via symmetrized bases.
FdResult fd_determinant_oracle(const GyConfig& c, int grid_points, const Potential& w = fluctuation_potential);

// max |(-D2 + 1 + W) sech|_i over the interior grid with spacing 2L/(points+1).
double fd_zero_mode_residual(double half_length, int grid_points);

// Polynomial (Neville) extrapolation to x = 0.
double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json gy_report(const GyConfig& c, int fd_points = 4001);

}  // namespace ringtheta
