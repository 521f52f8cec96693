#include <gtest/gtest.h>

#include <random>

#include "ringtheta/analysis.hpp"
#include "ringtheta/dynamics.hpp"

using namespace ringtheta;

namespace {

struct Series {
  std::vector<double> t, y;
};

Series synth(FitModel m, const std::vector<double>& p, double span, int samples, double noise = 0,
             unsigned seed = 1) {
  Series s;
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0, noise);
  for (int i = 0; i < samples; ++i) {
    double t = span * i / (samples - 1);
    s.t.push_back(t);
    s.y.push_back(fit_model_value(m, p, t) + (noise > 0 ? g(rng) : 0.0));
  }
  return s;
}

Series ring_series(int n, int ns, double omega, double theta, double inertia, double span, bool cos_obs) {
  ModelParams p;
  p.n = n;
  p.n_sites = ns;
  p.omega = omega;
  p.theta = theta;
  p.inertia_ns = inertia;
  Series s;
  s.t = uniform_times(span, 1000);
  auto tr = evolve(build_ring_hamiltonian(p), prepare_initial_state({}, p), s.t, inertia);
  for (const auto& o : tr.observables) s.y.push_back(cos_obs ? o.cos_x : o.probabilities[0]);
  return s;
}

}  // namespace

TEST(Analysis, ModelNames) {
  for (auto m : {FitModel::n2_prob, FitModel::n3_cos_highsym, FitModel::n3_cos_generic})
    EXPECT_EQ(parse_fit_model(to_string(m)), m);
  EXPECT_THROW(parse_fit_model("n4"), ConfigError);
  EXPECT_THROW(parse_sweep_kind("nope"), ConfigError);
  EXPECT_EQ(parse_sweep_kind("gap_vs_ns"), SweepKind::gap_vs_ns);
}

TEST(Analysis, ModelValues) {
  std::vector<double> p{0.1, 2.0, 0.4, 0.05, 0.3};
  const double t = 3.0;
  double fast = 0.05 * std::cos(2.0 * t + 0.3);
  EXPECT_NEAR(fit_model_value(FitModel::n2_prob, p, t), 0.4 * (1 + std::cos(0.3)) + fast, 1e-15);
  EXPECT_NEAR(fit_model_value(FitModel::n3_cos_highsym, p, t), 0.4 * (1 + 2 * std::cos(0.3)) + fast, 1e-15);
  EXPECT_NEAR(fit_model_value(FitModel::n3_cos_generic, p, t), 0.4 * (2 * std::cos(0.3) + std::cos(0.6)) + fast,
              1e-15);
}

TEST(Analysis, NoiselessRoundTripAllModels) {
  const std::vector<double> truth{8e-4, 0.01, 0.45, 0.05, 0.3};
  for (auto m : {FitModel::n2_prob, FitModel::n3_cos_highsym, FitModel::n3_cos_generic}) {
    auto s = synth(m, truth, 5000, 1000);
    auto f = fit_tunneling_probability(s.t, s.y, m);
    EXPECT_TRUE(f.converged) << to_string(m);
    EXPECT_FALSE(f.frozen);
    EXPECT_NEAR(f.omega_tun / truth[0], 1, 1e-6) << to_string(m);
    EXPECT_NEAR(f.omega_fast / truth[1], 1, 1e-6);
    EXPECT_NEAR(f.A1 / truth[2], 1, 1e-6);
    EXPECT_NEAR(f.A2 / truth[3], 1, 1e-6);
    EXPECT_NEAR(reduce_angle(f.phi_fast - truth[4]), 0, 1e-5);
    EXPECT_LT(f.residual_rms, 1e-8);
  }
}

TEST(Analysis, NoisyRecovery) {
  auto s = synth(FitModel::n2_prob, {8e-4, 0.01, 0.45, 0.05, 0.3}, 5000, 1000, 0.01, 42);
  auto f = fit_tunneling_probability(s.t, s.y, FitModel::n2_prob);
  EXPECT_NEAR(f.omega_tun / 8e-4, 1, 0.02);
  EXPECT_EQ(f.covariance_diag.size(), 5u);
}

TEST(Analysis, BestOfMultistart) {
  auto s = synth(FitModel::n2_prob, {8e-4, 0.01, 0.45, 0.05, 0.3}, 5000, 1000, 0.01, 7);
  auto f = fit_tunneling_probability(s.t, s.y, FitModel::n2_prob);
  EXPECT_GE(f.starts, 5);
  ASSERT_FALSE(f.start_residuals.empty());
  for (double r : f.start_residuals) EXPECT_LE(f.residual_rms, r + 1e-15);
}

TEST(Analysis, InputChecks) {
  std::vector<double> t(100), y(100);
  for (int i = 0; i < 100; ++i) t[i] = i;
  EXPECT_THROW(fit_tunneling_probability(t, y, FitModel::n2_prob), ConfigError);
  std::vector<double> t2(300, 1.0), y2(300, 0.0);
  EXPECT_THROW(fit_tunneling_probability(t2, y2, FitModel::n2_prob), ConfigError);
}

TEST(Analysis, ShortSpanFlagged) {
  auto s = synth(FitModel::n2_prob, {8e-4, 0.01, 0.45, 0.05, 0.3}, 1500, 400);
  auto f = fit_tunneling_probability(s.t, s.y, FitModel::n2_prob);
  EXPECT_TRUE(f.possibly_degenerate);
}

TEST(Analysis, SpectralPeaks) {
  auto s = synth(FitModel::n2_prob, {0, 0.5, 0.0, 1.0, 0.0}, 400, 2000);
  auto pk = spectral_peaks(s.t, s.y, 3);
  ASSERT_FALSE(pk.empty());
  EXPECT_NEAR(pk[0].first, 0.5, 0.005);
}

TEST(Analysis, TwoWellReferenceFits) {
  const double expect[3] = {8.56e-4, 5.17e-4, 2.40e-4};
  const double omegas[3] = {1.5, 2.0, 3.0};
  for (int k = 0; k < 3; ++k) {
    auto a = ring_series(2, 4, omegas[k], 0, 150, 5000, false);
    auto f0 = fit_tunneling_probability(a.t, a.y, FitModel::n2_prob);
    EXPECT_NEAR(f0.omega_tun / expect[k], 1, 0.05) << omegas[k];
    auto b = ring_series(2, 4, omegas[k], kPi / 2, 150, 5000, false);
    auto f1 = fit_tunneling_probability(b.t, b.y, FitModel::n2_prob);
    EXPECT_NEAR(f1.omega_tun / f0.omega_tun, 0.707, 0.03);
    auto c = ring_series(2, 4, omegas[k], kPi, 150, 5000, false);
    auto f2 = fit_tunneling_probability(c.t, c.y, FitModel::n2_prob);
    EXPECT_TRUE(f2.frozen);
    EXPECT_LT(f2.omega_tun, 2e-5);
  }
}

TEST(Analysis, GapSweep) {
  ModelParams p;
  p.n = 2;
  p.omega = 2;
  std::vector<double> g{60, 120};
  auto t = convergence_suite(SweepKind::gap_vs_ns, p, g);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.columns[0], "n_s");
  EXPECT_TRUE(t.errors.empty());
  EXPECT_LT(std::abs(t.rows[1][1] / t.rows[0][1] - 1), 0.01);
}

TEST(Analysis, SweepContinuesPastBadPoints) {
  ModelParams p;
  p.n = 2;
  p.omega = 2;
  std::vector<double> g{7, 8};  // 7 is not a multiple of n
  auto t = convergence_suite(SweepKind::gap_vs_ns, p, g);
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.errors.size(), 1u);
}

TEST(Analysis, RatioSweepAtOmegaEight) {
  ModelParams p;
  p.n = 2;
  p.n_sites = 2000;
  std::vector<double> g{8};
  auto t = convergence_suite(SweepKind::ed_diga_ratio_vs_omega, p, g);
  ASSERT_EQ(t.rows.size(), 1u);
  double ratio = t.rows[0].back();
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.1);
}
