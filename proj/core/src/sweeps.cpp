#include <algorithm>
#include <cmath>
#include <string>

#include "ringtheta/analysis.hpp"
#include "ringtheta/dynamics.hpp"
#include "ringtheta/parallel.hpp"
#include "ringtheta/semiclassics.hpp"
#include "ringtheta/spectral.hpp"

namespace ringtheta {

SweepKind parse_sweep_kind(const std::string& s) {
  if (s == "gap_vs_ns") return SweepKind::gap_vs_ns;
  if (s == "ed_diga_ratio_vs_omega") return SweepKind::ed_diga_ratio_vs_omega;
  if (s == "fuzziness_vs_alpha") return SweepKind::fuzziness_vs_alpha;
  throw ConfigError("unknown sweep '" + s + "' (gap_vs_ns, ed_diga_ratio_vs_omega, fuzziness_vs_alpha)");
}

namespace {

double diga_gap(int n, double omega, double theta) {
  auto s = instanton_quantities(n, omega, theta).spectrum;
  std::sort(s.begin(), s.end());
  return s[1] - s[0];
}

std::vector<double> fuzziness_row(const ModelParams& p, double alpha) {
  const double gap = tunneling_gap(p);
  if (!(gap > 0)) throw NumericalError("fuzziness: vanishing tunneling gap");
  const double span = kTwoPi / gap;  // one slow period, dimensionless
  const int samples = std::max(1000, int(std::ceil(span * 4 * p.omega / kPi)) + 1);
  auto times = uniform_times(span * p.inertia_ns, samples);
  InitialStateSpec spec;
  spec.kind = InitialStateSpec::Kind::cosine_power;
  spec.alpha = alpha;
  spec.site = 0;
  auto tr = evolve(build_ring_hamiltonian(p), prepare_initial_state(spec, p), times, p.inertia_ns);
  std::vector<double> y;
  for (auto& o : tr.observables) y.push_back(o.probabilities[0]);
  auto f = fit_tunneling_probability(times, y, FitModel::n2_prob);
  double rel = f.A1 != 0 ? std::abs(f.A2) / (2 * std::abs(f.A1)) : INFINITY;
  return {alpha, f.A2, f.A1, rel, f.omega_tun, f.omega_fast, f.residual_rms};
}

}  // namespace

SweepTable convergence_suite(SweepKind kind, const ModelParams& p, std::span<const double> grid) {
  p.validate();
  SweepTable tab;
  switch (kind) {
    case SweepKind::gap_vs_ns: tab.columns = {"n_s", "gap", "rel_change"}; break;
    case SweepKind::ed_diga_ratio_vs_omega: tab.columns = {"omega", "gap_ed", "gap_diga", "ratio"}; break;
    case SweepKind::fuzziness_vs_alpha:
      tab.columns = {"alpha", "A2", "A1", "A2_rel", "omega_tun", "omega_fast", "residual_rms"};
      break;
  }
  std::vector<std::vector<double>> rows(grid.size());
  std::vector<std::string> errs(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      ModelParams q = p;
      switch (kind) {
        case SweepKind::gap_vs_ns:
          q.n_sites = int(std::lround(grid[i]));
          rows[i] = {double(q.n_sites), tunneling_gap(q), NAN};
          break;
        case SweepKind::ed_diga_ratio_vs_omega: {
          q.omega = grid[i];
          double ed = tunneling_gap(q), dg = diga_gap(q.n, q.omega, q.theta);
          rows[i] = {q.omega, ed, dg, ed / dg};
          break;
        }
        case SweepKind::fuzziness_vs_alpha:
          rows[i] = fuzziness_row(q, grid[i]);
          break;
      }
    } catch (const std::exception& e) {
      errs[i] = "grid point " + std::to_string(grid[i]) + ": " + e.what();
    }
  });
  const std::vector<double>* prev = nullptr;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!errs[i].empty()) {
      tab.errors.push_back(errs[i]);
      continue;
    }
    if (kind == SweepKind::gap_vs_ns && prev) rows[i][2] = std::abs(rows[i][1] - (*prev)[1]) / (*prev)[1];
    tab.rows.push_back(rows[i]);
    prev = &rows[i];
  }
  return tab;
}

}  // namespace ringtheta
