#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringtheta/dynamics.hpp"
#include "ringtheta/model.hpp"
#include "ringtheta/ode.hpp"

namespace ringtheta {

struct Level {
  std::string id;
  double energy = 0;  // angular frequency, ns^-1
  bool operator==(const Level&) const = default;
};

struct Edge {
  std::string a, b;
  double dipole_weight = 1.0;
  bool operator==(const Edge&) const = default;
};

struct LevelGraph {
  std::vector<Level> levels;
  std::vector<Edge> edges;
  std::vector<std::string> ring;  // n_s level ids, in ring order

  void validate() const;  // throws ConfigError
  int index_of(const std::string& id) const;
  int edge_index(const std::string& a, const std::string& b) const;  // -1 if absent
  // min |f_e - f_e'| over ring edges e and any other edge e' sharing a level with e
  double min_separation() const;
  bool operator==(const LevelGraph&) const = default;
};

void to_json(nlohmann::json& j, const LevelGraph& g);
void from_json(const nlohmann::json& j, LevelGraph& g);
LevelGraph load_level_graph(const std::string& path);
void save_level_graph(const LevelGraph& g, const std::string& path);

struct SyntheticGraphSpec {
  int n_sites = 4;
  double separation = 0.0628;  // ns^-1, 2 pi x 10 MHz
  int spectators_per_level = 2;
  std::uint64_t seed = 7;
  // ring transitions pairwise at least this far apart; real ladders sit GHz apart, and
  // cross-talk between ring drives scales like omega / ring_resolution
  double ring_resolution = 0.5;
  double f_min = 1.0;  // ring transition frequencies drawn from [f_min, f_max]
  double f_max = 0.0;  // 0: f_min + 1.25 n_sites ring_resolution
};

LevelGraph build_synthetic_graph(const SyntheticGraphSpec& s);

// Drive on the ring link a -> b (ring order). phase is the Peierls phase of that link:
// the RWA hopping on |b><a| is omega * exp(i phase). The lab field is
// 2 omega cos(freq t - sgn(E_b - E_a) phase).
struct Drive {
  std::string a, b;
  double omega = 0;
  double freq = 0;
  double phase = 0;
  bool operator==(const Drive&) const = default;
};

struct DriveSet {
  std::vector<Drive> drives;
};

void to_json(nlohmann::json& j, const DriveSet& d);
void from_json(const nlohmann::json& j, DriveSet& d);

struct ExperimentalMap {
  double Omega = 0, Delta = 0;
  int n = 0, n_sites = 0;
  double omega_tilde = 0;
  double omega_diga_tilde = 0;
  double omega_dimless = 0;
  double inertia_ns = 0;
  double feasibility_ratio = 0;
};

ExperimentalMap map_experimental_params(double Omega, double Delta, int n, int n_sites);
void to_json(nlohmann::json& j, const ExperimentalMap& m);

// Drives realizing the ring model: hopping -Omega e^{i theta/n_s} (phases theta/n_s + pi),
// on-site detunings Delta (1 - cos(n 2 pi i / n_s)).
DriveSet make_ring_drives(const LevelGraph& g, double Omega, double Delta, int n, double theta);

struct RwaModel {
  HermitianOperator hamiltonian;  // ns^-1, ring sites in ring order
  std::vector<double> site_potential;
  double theta = 0;    // extract_theta of the hamiltonian
  double hopping = 0;  // mean |w|
};

RwaModel rwa_reduce(const LevelGraph& g, const DriveSet& d);

struct LabFrameConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double step_factor = 50;  // h_max = 1 / (step_factor * max transition frequency)
};

struct LabFrameRun {
  Trajectory ring;         // populations on ring levels (P_i, cos_x/sin_x over the ring)
  std::vector<double> leakage;  // 1 - sum of ring populations
  OdeStats stats;
  double max_norm_drift = 0;
};

// psi0 over all graph levels (graph order). Energy field of the trajectory is the bare
// lab energy sum_i E_i |c_i|^2.
LabFrameRun simulate_lab_frame(const LevelGraph& g, const DriveSet& d, const Eigen::VectorXcd& psi0,
                               std::span<const double> times_ns, const LabFrameConfig& cfg = {});

// Ring site i (ring order) as a full-graph basis vector.
Eigen::VectorXcd ring_basis_state(const LevelGraph& g, int ring_site);

}  // namespace ringtheta
