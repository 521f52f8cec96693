#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ringtheta/errors.hpp"

namespace ringtheta {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Reduce an angle to (-pi, pi]; -pi maps to pi.
double reduce_angle(double a);

struct ModelParams {
  int n = 2;
  int n_sites = 4;
  double theta = 0.0;
  double omega = 1.5;
  double inertia_ns = 150.0;
  bool include_constant_shift = true;

  double lambda() const { return omega * omega / (double(n) * n); }
  double spacing() const { return kTwoPi / n_sites; }
  double position(int i) const { return kTwoPi * i / n_sites; }
  int sites_per_well() const { return n_sites / n; }
  int well_site(int l) const { return l * (n_sites / n); }

  // Throws ConfigError.
  void validate() const;
};

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);

// Dense Hermitian matrix; Hermiticity is checked once, here.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(Eigen::MatrixXcd m);

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  bool is_real() const;

 private:
  Eigen::MatrixXcd m_;
};

struct GaugePhases {
  std::vector<double> alphas;
};

// V(n x_i) = lambda (1 - cos(n x_i)), periodic in the well index.
std::vector<double> ring_potential(const ModelParams& p);

HermitianOperator build_ring_hamiltonian(const ModelParams& p);

// Hopping plus (optionally) the 1/a^2 constant: H minus the potential.
HermitianOperator kinetic_part(const ModelParams& p);

// Same operator via discrete momenta shifted by theta/(2 pi), then back to sites.
HermitianOperator build_kinetic_fourier(const ModelParams& p);

// U^dagger H U, U = diag(exp(i alpha)).
HermitianOperator gauge_transform(const HermitianOperator& h, const GaugePhases& g);

// arg of prod_i H(i+1, i), reduced to (-pi, pi]. For odd n_sites and real negative
// links this gives pi.
double extract_theta(const HermitianOperator& h);

}  // namespace ringtheta
