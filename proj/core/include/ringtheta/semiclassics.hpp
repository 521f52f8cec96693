#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ringtheta/model.hpp"

namespace ringtheta {

struct DigaPrediction {
  int n = 2;
  double omega = 0;
  double theta = 0;
  double action_real = 0;  // S_I = 8 omega / n^2
  double density = 0;      // d
  std::vector<double> spectrum;  // E_k, k = 0..n-1, in branch-label order
  double chi_t = 0;
  bool semiclassical_valid = true;  // false when S_I < 1
  std::string warning;
};

double instanton_action(int n, double omega);
double instanton_density(int n, double omega);
// E_k(theta) = omega/2 - 2 omega d cos((2 pi k + theta)/n)
double diga_energy(int n, double omega, double theta, int k);

DigaPrediction instanton_quantities(int n, double omega, double theta);

// (omega/2) 1 - I-bar on the superdiagonal, - I on the subdiagonal, corners closing
// the ring; I = omega d exp(i theta / n). For n = 2 the two links add.
HermitianOperator diga_effective_hamiltonian(int n, double omega, double theta);

// <to| exp(-i H_wells t) |from> up to a global phase:
// (1/n) sum_k exp[i 2 pi k (from - to)/n + i 2 omega d cos((2 pi k + theta)/n) t]
cplx diga_hop_amplitude(int n, double omega, double theta, int from_well, int to_well, double t);
double diga_hop_probability(int n, double omega, double theta, int from_well, int to_well,
                            double t);

// Well-resolved <cos x>, <sin x> for a start in well 0 (wells at x_l = 2 pi l / n).
std::pair<double, double> diga_circle_expectations(int n, double omega, double theta, double t);

// x = sign (4/n) arctan(exp(n sqrt(lambda) (tau - tau0))), n sqrt(lambda) = omega.
double instanton_profile(double tau, double tau0, int n, double omega, int sign);

}  // namespace ringtheta
