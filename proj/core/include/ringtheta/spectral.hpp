#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ringtheta/model.hpp"

namespace ringtheta {

struct EigenSystem {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns; largest-magnitude entry made real positive
};

// Dense Hermitian solve (Eigen: Householder tridiagonalization + implicit QL).
EigenSystem eigendecompose(const HermitianOperator& h);
Eigen::VectorXd eigenvalues(const HermitianOperator& h);

struct SweepOptions {
  bool with_vectors = false;
  // reorder branches by eigenvector overlap between neighbouring grid points
  bool continuation = false;
};

struct SpectrumResult {
  std::vector<double> theta_grid;
  Eigen::MatrixXd energies;  // grid x branches
  std::vector<Eigen::MatrixXcd> eigenvectors;  // empty unless requested
};

SpectrumResult spectrum_sweep(const ModelParams& p, std::span<const double> theta_grid,
                              int n_branches, const SweepOptions& opt = {});

// (a) gap at theta = pi, (b) monodromy (ED and DIGA), (c) parity residuals at 0 and pi.
// Raw and mean-subtracted branches are both included.
nlohmann::json spectral_diagnostics(const SpectrumResult& r, const ModelParams& p);

// Quad-precision tunneling doublet for the two-well ring at theta = 0:
// Bloch (periodic / antiperiodic half ring) plus reflection reduction to two
// symmetric tridiagonals, lowest eigenvalue of each by Sturm bisection.
// Needed where dense double precision cannot resolve the splitting (n_s ~ 2000, omega >~ 12).
struct Doublet {
  double e0;
  double e1;
  double gap;  // computed in extended precision, then rounded
};
Doublet two_well_doublet(const ModelParams& p);

// |E1 - E0|; uses two_well_doublet when applicable (n = 2, theta = 0 mod 2pi),
// dense ED otherwise.
double tunneling_gap(const ModelParams& p);

}  // namespace ringtheta
