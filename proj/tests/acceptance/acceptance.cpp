// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion 7   just one
//   acceptance --criterion 6 --smoke   n_s = 500 variant of the ratio sweep
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "ringtheta/analysis.hpp"
#include "ringtheta/detfunc.hpp"
#include "ringtheta/dynamics.hpp"
#include "ringtheta/labframe.hpp"
#include "ringtheta/semiclassics.hpp"
#include "ringtheta/spectral.hpp"

using namespace ringtheta;

namespace {

// pinned tolerances
constexpr double kDegeneracyTol = 1e-10;    // x omega
constexpr double kTwoWellTol = 0.05;         // relative
constexpr double kTwoWellRatioTol = 0.03;    // absolute on 0.707
constexpr double kFrozenBound = 2e-5;       // ns^-1
constexpr double kThreeWellTol = 0.10;         // relative
constexpr double kSinBound = 0.02;
constexpr double kGyOddTol = 1e-6;
constexpr double kGyEvenTol = 1e-3;
constexpr double kFdOddTol = 1e-3;
constexpr double kFdEvenTol = 1e-2;
constexpr double kDigaSpecTol = 1e-12;
constexpr double kDigaExpTol = 1e-10;
constexpr double kDigaSumTol = 1e-12;
constexpr double kChiTol = 1e-6;
constexpr double kConvTol = 0.01;
constexpr double kRatioLo = 0.8, kRatioHi = 1.2;
constexpr double kLabDevTol = 0.05;
constexpr double kHalvingFactor = 0.5;      // deviation(half) <= 0.5 deviation(full)
constexpr double kOddThetaTol = 0.05;
constexpr double kChiralityMin = 0.1;

// two-well (n_s=4) and three-well (n_s=6) experimental inputs
constexpr double kT1Omega = 0.00135, kT1Delta = 0.00375;
constexpr double kT2Omega = 0.00152, kT2Delta = 0.00333;

struct Outcome {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

ModelParams ring(int n, int ns, double omega, double theta, double inertia = 1.0) {
  ModelParams p;
  p.n = n;
  p.n_sites = ns;
  p.omega = omega;
  p.theta = theta;
  p.inertia_ns = inertia;
  return p;
}

Trajectory run_delta(const ModelParams& p, const std::vector<double>& t) {
  return evolve(build_ring_hamiltonian(p), prepare_initial_state({}, p), t, p.inertia_ns);
}

FitResult fit_series(const Trajectory& tr, FitModel m, bool cos_obs) {
  std::vector<double> y;
  for (const auto& o : tr.observables) y.push_back(cos_obs ? o.cos_x : o.probabilities[0]);
  return fit_tunneling_probability(tr.times_ns, y, m);
}

Outcome criterion1() {
  Outcome r;
  double worst = 0;
  for (double w : {1.5, 2.0, 3.0})
    for (int ns : {4, 8, 120}) {
      auto e = eigenvalues(build_ring_hamiltonian(ring(2, ns, w, kPi)));
      worst = std::max(worst, std::abs(e(1) - e(0)) / w);
    }
  r.check(worst < kDegeneracyTol, fmt("max |E1-E0|/omega at theta=pi = %.2e", worst));
  return r;
}

Outcome criterion2() {
  Outcome r;
  const double target[3] = {8.56e-4, 5.17e-4, 2.40e-4};
  const double omegas[3] = {1.5, 2.0, 3.0};
  auto t = uniform_times(5000, 1000);
  for (int k = 0; k < 3; ++k) {
    double w0 = 0;
    for (double th : {0.0, kPi / 2, kPi}) {
      auto f = fit_series(run_delta(ring(2, 4, omegas[k], th, 150), t), FitModel::n2_prob, false);
      if (th == 0) {
        w0 = f.omega_tun;
        r.check(std::abs(w0 / target[k] - 1) < kTwoWellTol, fmt("w=%.1f tun(0)=%.3e", omegas[k], w0));
      } else if (th < 3) {
        double q = f.omega_tun / w0;
        r.check(std::abs(q - 0.707) < kTwoWellRatioTol, fmt("ratio=%.3f", q));
      } else {
        r.check(f.frozen && f.omega_tun < kFrozenBound, fmt("pi frozen=%d", int(f.frozen)));
      }
    }
  }
  return r;
}

Outcome criterion3() {
  Outcome r;
  auto m = map_experimental_params(kT2Omega, kT2Delta, 3, 6);
  auto t = uniform_times(10000, 1000);
  double w[3];
  double sin_max = 0;
  const double th[3] = {0.0, kPi / 2, kPi};
  for (int k = 0; k < 3; ++k) {
    auto tr = run_delta(ring(3, 6, m.omega_dimless, th[k], m.inertia_ns), t);
    auto f = fit_series(tr, k == 1 ? FitModel::n3_cos_generic : FitModel::n3_cos_highsym, true);
    w[k] = f.omega_tun;
    if (k != 1)
      for (const auto& o : tr.observables) sin_max = std::max(sin_max, std::abs(o.sin_x));
  }
  r.check(std::abs(w[0] / 8.20e-4 - 1) < kThreeWellTol, fmt("tun(0)=%.3e", w[0]));
  r.check(std::abs(w[2] / 8.85e-4 - 1) < kThreeWellTol, fmt("tun(pi)=%.3e", w[2]));
  double q = w[0] / w[1];
  r.check(std::abs(q / std::sqrt(3.0) - 1) < kThreeWellTol, fmt("tun(0)/tun(pi/2)=%.3f", q));
  r.check(sin_max < kSinBound, fmt("max|<sin x>|=%.1e", sin_max));
  return r;
}

Outcome criterion4() {
  Outcome r;
  GyConfig c;
  double odd = gy_ratio_odd(c), even = gy_ratio_even_primed(c);
  auto fd = fd_determinant_oracle(c, 4001);
  r.check(std::abs(odd - 0.5) < kGyOddTol, fmt("odd=%.9f", odd));
  r.check(std::abs(even - 0.5) < kGyEvenTol, fmt("even'=%.7f", even));
  r.check(std::abs(fd.ratio_odd - odd) < kFdOddTol, fmt("fd odd=%.6f", fd.ratio_odd));
  r.check(std::abs(fd.ratio_even_primed - even) < kFdEvenTol, fmt("fd even'=%.6f", fd.ratio_even_primed));
  return r;
}

Outcome criterion5() {
  Outcome r;
  const double w = 3.0;
  double spec = 0, expo = 0, sum = 0, chi = 0;
  for (int n = 2; n <= 8; ++n)
    for (double th : {0.0, 0.37, kPi / 2, 2.9, -1.1}) {
      auto e = eigenvalues(diga_effective_hamiltonian(n, w, th));
      std::vector<double> f;
      for (int k = 0; k < n; ++k) f.push_back(diga_energy(n, w, th, k));
      std::sort(f.begin(), f.end());
      for (int k = 0; k < n; ++k) spec = std::max(spec, std::abs(e(k) - f[k]));
      for (double t : {1.0, 250.0, 4000.0}) {
        double s = 0;
        for (int to = 0; to < n; ++to) s += diga_hop_probability(n, w, th, 0, to, t);
        sum = std::max(sum, std::abs(s - 1));
      }
    }
  // matrix exponential against the printed closed forms
  for (int n : {2, 3}) {
    const double d = instanton_density(n, w);
    for (double th : {0.0, kPi / 2, kPi})
      for (double t : {3.0, 111.0, 2500.0}) {
        Eigen::MatrixXcd u = (cplx(0, -t) * diga_effective_hamiltonian(n, w, th).matrix()).exp();
        std::vector<double> closed;
        if (n == 2) {
          double a = 2 * w * d * std::cos(th / 2) * t;
          closed = {std::pow(std::cos(a), 2), std::pow(std::sin(a), 2)};
        } else if (th != kPi / 2) {
          double s2 = std::pow(std::sin(1.5 * w * d * t), 2);
          closed = {1 - 8.0 / 9 * s2, 4.0 / 9 * s2, 4.0 / 9 * s2};
        } else {
          double x = std::sqrt(3.0) / 2 * w * d * t;
          closed = {std::pow(1 + 2 * std::cos(2 * x), 2) / 9,
                    16.0 / 9 * std::pow(std::sin(x) * std::cos(x - kPi / 6), 2),
                    16.0 / 9 * std::pow(std::sin(x) * std::cos(x + kPi / 6), 2)};
        }
        for (int to = 0; to < n; ++to) expo = std::max(expo, std::abs(std::norm(u(to, 0)) - closed[std::size_t(to)]));
      }
  }
  for (int n : {2, 3, 4})
    for (double om : {1.0, 2.0, 3.0}) {
      const double h = 1e-3;
      double num = (diga_energy(n, om, h, 0) - 2 * diga_energy(n, om, 0, 0) + diga_energy(n, om, -h, 0)) / (h * h);
      chi = std::max(chi, std::abs(num / instanton_quantities(n, om, 0).chi_t - 1));
    }
  r.check(spec < kDigaSpecTol, fmt("spectrum %.1e", spec));
  r.check(expo < kDigaExpTol, fmt("expm vs closed %.1e", expo));
  r.check(sum < kDigaSumTol, fmt("sum P-1 %.1e", sum));
  r.check(chi < kChiTol, fmt("chi_t rel %.1e", chi));
  return r;
}

Outcome ratio_sweep(int ns) {
  Outcome r;
  double lo = 1e9, hi = 0;
  for (int w = 4; w <= 16; ++w) {
    auto p = ring(2, ns, w, 0);
    double q = tunneling_gap(p) / std::abs(instanton_quantities(2, w, 0).spectrum[1] -
                                           instanton_quantities(2, w, 0).spectrum[0]);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  r.check(lo >= kRatioLo && hi <= kRatioHi, fmt("n_s=%d ED/DIGA in [%.3f, %.3f]", ns, lo, hi));
  return r;
}

Outcome criterion6(bool smoke) {
  if (smoke) return ratio_sweep(500);
  Outcome r;
  for (double w : {2.0, 8.0}) {
    double a = tunneling_gap(ring(2, 60, w, 0)), b = tunneling_gap(ring(2, 120, w, 0));
    double rel = std::abs(b / a - 1);
    r.check(rel < kConvTol, fmt("w=%.0f gap 60->120 change %.2f%%", w, 100 * rel));
  }
  auto s = ratio_sweep(2000);
  r.check(s.pass, s.detail);
  return r;
}

double max_site_deviation(const Trajectory& a, const Trajectory& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.observables.size(); ++k)
    for (std::size_t i = 0; i < a.observables[k].probabilities.size(); ++i)
      m = std::max(m, std::abs(a.observables[k].probabilities[i] - b.observables[k].probabilities[i]));
  return m;
}

struct LabPair {
  double deviation;
  double p2_max;
};

LabPair lab_vs_rwa(const LevelGraph& g, double Om, double De, double theta, double horizon) {
  auto d = make_ring_drives(g, Om, De, 2, theta);
  auto t = uniform_times(horizon, 1001);
  auto lab = simulate_lab_frame(g, d, ring_basis_state(g, 0), t);
  auto m = rwa_reduce(g, d);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(m.hamiltonian.dim());
  v(0) = 1;
  auto rwa = evolve(m.hamiltonian, StateVector(v), t, 1.0);
  double p2 = 0;
  for (const auto& o : lab.ring.observables) p2 = std::max(p2, o.probabilities[2]);
  return {max_site_deviation(lab.ring, rwa), p2};
}

Outcome criterion7() {
  Outcome r;
  SyntheticGraphSpec spec;  // n_s = 4, separation 0.0628 ns^-1, 2 spectators per level, seed 7
  auto g = build_synthetic_graph(spec);
  r.check(g.min_separation() >= spec.separation, fmt("sep=%.4f", g.min_separation()));
  auto full = lab_vs_rwa(g, kT1Omega, kT1Delta, 0, 5000);
  r.check(full.deviation < kLabDevTol, fmt("dev(5000 ns)=%.4f", full.deviation));
  auto half = lab_vs_rwa(g, kT1Omega / 2, kT1Delta / 2, 0, 5000);
  r.check(half.deviation <= kHalvingFactor * full.deviation,
          fmt("dev(half)=%.4f ratio %.3f", half.deviation, half.deviation / full.deviation));
  // same comparison with the horizon stretched with the slower dynamics; informational
  auto half_long = lab_vs_rwa(g, kT1Omega / 2, kT1Delta / 2, 0, 10000);
  r.detail += fmt("; info: dev(half, 10000 ns)=%.4f ratio %.3f", half_long.deviation,
                  half_long.deviation / full.deviation);
  return r;
}

Outcome criterion8() {
  Outcome r;
  auto m = map_experimental_params(kT2Omega, kT2Delta, 3, 6);
  const double I = m.inertia_ns, w = m.omega_dimless;
  auto t = uniform_times(10000, 1001);
  auto a = run_delta(ring(3, 6, w, 0, I), t);
  auto b = run_delta(ring(3, 6, w, kPi, I), t);
  double diff = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto pa = well_probabilities(a.observables[k].probabilities, 3);
    auto pb = well_probabilities(b.observables[k].probabilities, 3);
    for (int l = 0; l < 3; ++l) diff = std::max(diff, std::abs(pa[l] - pb[l]));
  }
  r.check(diff < kOddThetaTol, fmt("max |P_l(0)-P_l(pi)|=%.3f", diff));
  // quarter of the theta = pi/2 slow period sqrt(3) omega d
  const double tq = (kPi / 2) / (std::sqrt(3.0) * w * instanton_density(3, w)) * I;
  std::vector<double> tt{0.0, tq};
  auto c = run_delta(ring(3, 6, w, kPi / 2, I), tt);
  auto pc = well_probabilities(c.observables[1].probabilities, 3);
  double asym = std::abs(pc[1] - pc[2]);
  r.check(asym > kChiralityMin, fmt("|P1-P2|(pi/2, t=%.0f ns)=%.3f", tq, asym));
  // DIGA overestimates the n = 3, omega = 3 tunneling rate; the same quarter period
  // taken from the fitted theta = pi/2 frequency instead, informational
  auto full = run_delta(ring(3, 6, w, kPi / 2, I), t);
  auto f = fit_series(full, FitModel::n3_cos_generic, true);
  const double tf = (kPi / 2) / f.omega_tun;
  std::vector<double> t2{0.0, tf};
  auto pf = well_probabilities(run_delta(ring(3, 6, w, kPi / 2, I), t2).observables[1].probabilities, 3);
  double peak = 0;
  for (const auto& o : full.observables) {
    auto pw = well_probabilities(o.probabilities, 3);
    peak = std::max(peak, std::abs(pw[1] - pw[2]));
  }
  r.detail += fmt("; info: |P1-P2| at fitted quarter period t=%.0f ns = %.3f, max over horizon %.3f", tf,
                  std::abs(pf[1] - pf[2]), peak);
  return r;
}

Outcome criterion9() {
  Outcome r;
  auto p = ring(2, 120, 4, 0);
  std::vector<double> alphas{2, 4, 6, 8};
  auto tab = convergence_suite(SweepKind::fuzziness_vs_alpha, p, alphas);
  if (!tab.errors.empty()) {
    r.check(false, "sweep errors: " + tab.errors.front());
    return r;
  }
  std::size_t best = 0, best_rel = 0;
  std::string row;
  for (std::size_t i = 0; i < tab.rows.size(); ++i) {
    if (std::abs(tab.rows[i][1]) < std::abs(tab.rows[best][1])) best = i;
    if (tab.rows[i][3] < tab.rows[best_rel][3]) best_rel = i;
    row += fmt("%s%.0f:%.4f", i ? " " : "", tab.rows[i][0], std::abs(tab.rows[i][1]));
  }
  r.check(tab.rows[best][0] == 4, "|A2| by alpha " + row);
  r.detail += fmt("; info: relative A2/(2 A1) minimal at alpha=%.0f", tab.rows[best_rel][0]);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  bool smoke = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--smoke")) smoke = true;
    else {
      std::fprintf(stderr, "usage: acceptance [--criterion N] [--smoke]\n");
      return 2;
    }
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> all{
      {"theta=pi degeneracy", criterion1},
      {"two-well rates", criterion2},
      {"three-well rates", criterion3},
      {"Gel'fand-Yaglom ratios", criterion4},
      {"DIGA consistency", criterion5},
      {smoke ? "ED/DIGA ratio smoke (n_s=500)" : "convergence", [smoke] { return criterion6(smoke); }},
      {"lab frame vs RWA", criterion7},
      {"odd-n theta=0/pi phenomenology", criterion8},
      {"initial-state width", criterion9},
  };
  int failed = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (only && int(k) + 1 != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, all[k].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
