#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringtheta/model.hpp"

namespace ringtheta {

enum class FitModel { n2_prob, n3_cos_highsym, n3_cos_generic };

FitModel parse_fit_model(const std::string& s);
std::string to_string(FitModel m);

// slow part:  n2_prob         A1 (1 + cos(w t))
//             n3_cos_highsym  A1 (1 + 2 cos(w t))
//             n3_cos_generic  A1 (2 cos(w t) + cos(2 w t))
// plus        A2 cos(w_fast t + phi)
double fit_model_value(FitModel m, const std::vector<double>& p, double t);  // p = {w, wf, A1, A2, phi}

struct FitOptions {
  int max_iterations = 400;
  // a slow oscillation advancing less than this many radians over the span is frozen
  double frozen_phase = 0.1;
};

struct FitResult {
  FitModel model = FitModel::n2_prob;
  double omega_tun = 0;
  double omega_fast = 0;
  double A1 = 0;
  double A2 = 0;
  double phi_fast = 0;
  double residual_rms = 0;
  bool converged = false;
  bool frozen = false;
  bool possibly_degenerate = false;  // span shorter than half a slow period
  std::vector<double> covariance_diag;  // {w, wf, A1, A2, phi}
  int starts = 0;
  std::vector<double> start_residuals;  // per multistart candidate
};

void to_json(nlohmann::json& j, const FitResult& r);

FitResult fit_tunneling_probability(std::span<const double> times_ns, std::span<const double> values,
                                    FitModel model, const FitOptions& opt = {});

// Periodogram peaks of the mean-removed series: {frequency (rad/ns), amplitude}, strongest first.
std::vector<std::pair<double, double>> spectral_peaks(std::span<const double> t, std::span<const double> y,
                                                      int max_peaks = 8);

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> errors;  // per failed grid point
};

enum class SweepKind { gap_vs_ns, ed_diga_ratio_vs_omega, fuzziness_vs_alpha };
SweepKind parse_sweep_kind(const std::string& s);

// gap_vs_ns: grid of n_sites; ed_diga_ratio_vs_omega: grid of omega at p.n_sites;
// fuzziness_vs_alpha: grid of alpha, cosine-power start at site 0, n2 fit of the
// return probability over one slow period.
SweepTable convergence_suite(SweepKind kind, const ModelParams& p, std::span<const double> grid);

}  // namespace ringtheta
