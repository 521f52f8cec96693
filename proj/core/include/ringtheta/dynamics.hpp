#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ringtheta/model.hpp"

namespace ringtheta {

struct StateVector {
  Eigen::VectorXcd amplitudes;

  StateVector() = default;
  // Throws ConfigError unless normalized to 1e-12.
  explicit StateVector(Eigen::VectorXcd a);
};

struct Observables {
  std::vector<double> probabilities;  // P_i
  double cos_x = 0;
  double sin_x = 0;
  double norm = 0;
  double energy = 0;
};

struct Trajectory {
  std::vector<double> times_ns;
  std::vector<StateVector> states;
  std::vector<Observables> observables;
  std::vector<double> ground_fidelity;  // ramps only
};

struct InitialStateSpec {
  enum class Kind { delta, cosine_power, ground };
  Kind kind = Kind::delta;
  int site = 0;        // delta, and centre for cosine_power
  double alpha = 0.0;  // cosine_power exponent: ((1 + cos(x - x_c))/2)^(2 alpha)
};

StateVector prepare_initial_state(const InitialStateSpec& spec, const ModelParams& p);

// Per-time records; positions x_i = 2 pi i / dim.
Observables measure(const Eigen::VectorXcd& psi, const HermitianOperator* h = nullptr);

// psi(t) = exp(-i H t/I) psi0 through the spectral decomposition.
Trajectory evolve(const HermitianOperator& h, const StateVector& psi0,
                  std::span<const double> times_ns, double inertia_ns);

struct ThetaSchedule {
  std::vector<double> t_ns;   // strictly increasing knots
  std::vector<double> theta;  // linear in between
  double at(double t) const;
};

// Piecewise-constant stepping of H(theta(t)): `steps` equal steps across the output
// window, theta sampled at each step midpoint.
Trajectory evolve_theta_ramp(const ModelParams& p, const ThetaSchedule& sched, const StateVector& psi0,
                             std::span<const double> times_ns, int steps = 200);

std::vector<Observables> observables(const Trajectory& traj, const ModelParams& p);

// Sum of site probabilities per well; each site goes to its nearest well centre,
// sites exactly half-way are split evenly.
std::vector<double> well_probabilities(const std::vector<double>& site_p, int n);

std::vector<double> uniform_times(double t_end_ns, int samples);

}  // namespace ringtheta
