#include "ringtheta/semiclassics.hpp"

#include <cmath>

namespace ringtheta {

namespace {
void check(int n, double omega) {
  if (n < 2) throw ConfigError("semiclassics: n must be >= 2");
  if (!std::isfinite(omega) || omega <= 0) throw ConfigError("semiclassics: omega must be positive");
}
void check_well(int n, int l) {
  if (l < 0 || l >= n) throw ConfigError("semiclassics: well index out of range");
}
}  // namespace

double instanton_action(int n, double omega) {
  check(n, omega);
  return 8.0 * omega / (double(n) * n);
}

double instanton_density(int n, double omega) {
  check(n, omega);
  return (4.0 / n) * std::exp(-8.0 * omega / (double(n) * n)) * std::sqrt(omega / kPi);
}

double diga_energy(int n, double omega, double theta, int k) {
  double d = instanton_density(n, omega);
  return 0.5 * omega - 2.0 * omega * d * std::cos((kTwoPi * k + theta) / n);
}

DigaPrediction instanton_quantities(int n, double omega, double theta) {
  check(n, omega);
  if (!std::isfinite(theta)) throw ConfigError("semiclassics: theta must be finite");
  DigaPrediction r;
  r.n = n;
  r.omega = omega;
  r.theta = theta;
  r.action_real = instanton_action(n, omega);
  r.density = instanton_density(n, omega);
  for (int k = 0; k < n; ++k) r.spectrum.push_back(diga_energy(n, omega, theta, k));
  double s = omega / (double(n) * n);
  r.chi_t = (8.0 / std::sqrt(kPi)) * std::pow(s, 1.5) * std::exp(-8.0 * s);
  if (r.action_real < 1.0) {
    r.semiclassical_valid = false;
    r.warning = "instanton action S_I = " + std::to_string(r.action_real) +
                " < 1: dilute instanton gas approximation is not trustworthy";
  }
  return r;
}

HermitianOperator diga_effective_hamiltonian(int n, double omega, double theta) {
  check(n, omega);
  const double d = instanton_density(n, omega);
  const cplx I = omega * d * std::polar(1.0, theta / n);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(n, n) * (0.5 * omega);
  // |l+1><l| carries -I (counterclockwise hop), its adjoint -conj(I)
  for (int l = 0; l < n; ++l) {
    int k = (l + 1) % n;
    h(k, l) += -I;
    h(l, k) += -std::conj(I);
  }
  return HermitianOperator(std::move(h));
}

cplx diga_hop_amplitude(int n, double omega, double theta, int from_well, int to_well, double t) {
  check(n, omega);
  check_well(n, from_well);
  check_well(n, to_well);
  const double d = instanton_density(n, omega);
  cplx s = 0;
  for (int k = 0; k < n; ++k) {
    double ph = kTwoPi * k * (from_well - to_well) / n +
                2.0 * omega * d * std::cos((kTwoPi * k + theta) / n) * t;
    s += std::polar(1.0, ph);
  }
  return s / double(n);
}

double diga_hop_probability(int n, double omega, double theta, int from_well, int to_well,
                            double t) {
  return std::norm(diga_hop_amplitude(n, omega, theta, from_well, to_well, t));
}

std::pair<double, double> diga_circle_expectations(int n, double omega, double theta, double t) {
  double c = 0, s = 0;
  for (int l = 0; l < n; ++l) {
    double p = diga_hop_probability(n, omega, theta, 0, l, t);
    c += p * std::cos(kTwoPi * l / n);
    s += p * std::sin(kTwoPi * l / n);
  }
  return {c, s};
}

double instanton_profile(double tau, double tau0, int n, double omega, int sign) {
  if (n < 1) throw ConfigError("instanton_profile: n must be positive");
  if (sign != 1 && sign != -1) throw ConfigError("instanton_profile: sign must be +1 or -1");
  return sign * (4.0 / n) * std::atan(std::exp(omega * (tau - tau0)));
}

}  // namespace ringtheta
