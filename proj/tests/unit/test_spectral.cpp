#include <gtest/gtest.h>

#include <random>

#include "ringtheta/semiclassics.hpp"
#include "ringtheta/spectral.hpp"

using namespace ringtheta;

namespace {

ModelParams params(int n, int ns, double theta, double omega) {
  ModelParams p;
  p.n = n;
  p.n_sites = ns;
  p.theta = theta;
  p.omega = omega;
  return p;
}

std::vector<double> grid(int pts, double lo, double hi) {
  std::vector<double> g;
  for (int i = 0; i < pts; ++i) g.push_back(lo + (hi - lo) * i / (pts - 1));
  return g;
}

}  // namespace

TEST(Spectral, DiagonalMatrix) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 0) = 3;
  m(1, 1) = -1;
  m(2, 2) = 0.5;
  auto es = eigendecompose(HermitianOperator(m));
  EXPECT_DOUBLE_EQ(es.values(0), -1);
  EXPECT_DOUBLE_EQ(es.values(1), 0.5);
  EXPECT_DOUBLE_EQ(es.values(2), 3);
}

TEST(Spectral, FreeRingClosedForm) {
  auto p = params(2, 6, 0, 1);
  // lambda = 0 needs omega = 0, which validation forbids; use the kinetic part
  auto e = eigenvalues(kinetic_part(p));
  const double a = kTwoPi / 6;
  std::vector<double> expect;
  for (int j = 0; j < 6; ++j) expect.push_back((1 - std::cos(kTwoPi * j / 6)) / (a * a));
  std::sort(expect.begin(), expect.end());
  for (int j = 0; j < 6; ++j) EXPECT_NEAR(e(j), expect[j], 1e-13);
  EXPECT_NEAR(e(1), e(2), 1e-13);
  EXPECT_NEAR(e(3), e(4), 1e-13);
}

TEST(Spectral, RandomHermitianResidualAndUnitarity) {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int dim : {2, 7, 40}) {
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
    Eigen::MatrixXcd h = (a + a.adjoint()) / 2;
    auto es = eigendecompose(HermitianOperator(h));
    const double hn = es.values.cwiseAbs().maxCoeff();
    for (int k = 0; k < dim; ++k) {
      double r = (h * es.vectors.col(k) - es.values(k) * es.vectors.col(k)).norm();
      EXPECT_LT(r, 1e-10 * hn);
      Eigen::Index idx;
      es.vectors.col(k).cwiseAbs().maxCoeff(&idx);
      EXPECT_NEAR(es.vectors(idx, k).imag(), 0.0, 1e-14);
      EXPECT_GT(es.vectors(idx, k).real(), 0.0);
    }
    EXPECT_LT((es.vectors.adjoint() * es.vectors - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff(),
              1e-10);
    for (int k = 1; k < dim; ++k) EXPECT_LE(es.values(k - 1), es.values(k));
  }
}

TEST(Spectral, DeterministicRepeatedCalls) {
  auto h = build_ring_hamiltonian(params(2, 40, kPi, 2));
  auto a = eigendecompose(h), b = eigendecompose(h);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.vectors, b.vectors);
}

TEST(Spectral, GapOmega2MatchesQuadPrecisionOracle) {
  // Sturm bisection in __float128 on the Bloch/reflection-reduced tridiagonals is the oracle.
  auto p = params(2, 120, 0, 2);
  auto e = eigenvalues(build_ring_hamiltonian(p));
  auto d = two_well_doublet(p);
  EXPECT_NEAR(e(1) - e(0), d.gap, 1e-11);
  EXPECT_NEAR(d.gap, 0.172401, 5e-6);
  EXPECT_NEAR(e(0), d.e0, 1e-11);
}

TEST(Spectral, SturmMatchesEdAcrossSizes) {
  for (int ns : {4, 6, 8, 10, 60}) {
    for (double om : {1.5, 4.0}) {
      for (bool shift : {true, false}) {
        auto p = params(2, ns, 0, om);
        p.include_constant_shift = shift;
        auto e = eigenvalues(build_ring_hamiltonian(p));
        auto d = two_well_doublet(p);
        EXPECT_NEAR(d.e0, e(0), 1e-11) << ns;
        EXPECT_NEAR(d.e1, e(1), 1e-11) << ns;
      }
    }
  }
}

TEST(Spectral, DoubletRejectsOtherModels) {
  EXPECT_THROW(two_well_doublet(params(3, 6, 0, 2)), ConfigError);
  EXPECT_THROW(two_well_doublet(params(2, 6, 1.0, 2)), ConfigError);
  // tunneling_gap falls back to ED away from theta = 0
  EXPECT_LT(tunneling_gap(params(2, 120, kPi, 2)), 1e-10 * 2);
}

TEST(Spectral, DegeneracyAtPi) {
  for (int ns : {4, 8, 120})
    for (double om : {1.5, 2.0, 3.0}) {
      auto e = eigenvalues(build_ring_hamiltonian(params(2, ns, kPi, om)));
      EXPECT_LT(e(1) - e(0), 1e-10 * om) << ns << " " << om;
    }
}

TEST(Spectral, HarmonicPairs) {
  auto p = params(2, 120, 0, 4);
  auto r = spectrum_sweep(p, grid(9, -kPi, kPi), 6);
  ASSERT_EQ(r.energies.cols(), 6);
  // the cosine well is softer than its harmonic approximation, so the upper pairs sag
  // (0.88 and 0.79 of (s + 1/2) omega here)
  for (int i = 0; i < r.energies.rows(); ++i)
    for (int s = 0; s < 3; ++s) {
      double mid = (r.energies(i, 2 * s) + r.energies(i, 2 * s + 1)) / 2;
      // s = 2 reaches the barrier top 2 lambda = 8, where the oscillator picture ends
      if (s < 2) EXPECT_LT(std::abs(mid / 4 - (s + 0.5)), 0.5) << "s=" << s;
      EXPECT_LT(r.energies(i, 2 * s + 1) - r.energies(i, 2 * s),
                s < 2 ? r.energies(i, 2 * s + 2) - r.energies(i, 2 * s + 1) : 4.0);
    }
  EXPECT_NEAR((r.energies(4, 0) + r.energies(4, 1)) / 2 / 2, 1, 0.1);
}

TEST(Spectral, SweepPeriodicityAndOrdering) {
  auto p = params(2, 120, 0, 2);
  std::vector<double> g{0.7, 0.7 + kTwoPi};
  auto r = spectrum_sweep(p, g, 10);
  EXPECT_LT((r.energies.row(0) - r.energies.row(1)).cwiseAbs().maxCoeff(), 1e-12);
  for (int k = 1; k < 10; ++k) EXPECT_LE(r.energies(0, k - 1), r.energies(0, k));
}

TEST(Spectral, SweepErrors) {
  auto p = params(2, 8, 0, 2);
  EXPECT_THROW(spectrum_sweep(p, std::vector<double>{}, 2), ConfigError);
  EXPECT_THROW(spectrum_sweep(p, std::vector<double>{0.0}, 9), ConfigError);
}

TEST(Spectral, SweepVectorsOnRequest) {
  auto p = params(2, 8, 0, 2);
  auto r = spectrum_sweep(p, grid(3, 0, 1), 2, {.with_vectors = true});
  ASSERT_EQ(r.eigenvectors.size(), 3u);
  EXPECT_EQ(r.eigenvectors[0].cols(), 2);
  EXPECT_TRUE(spectrum_sweep(p, grid(3, 0, 1), 2).eigenvectors.empty());
}

TEST(Spectral, ThreeWellInversionAtPi) {
  auto p = params(3, 120, 0, 3);
  std::vector<double> g{0.0, kPi};
  auto r = spectrum_sweep(p, g, 3);
  Eigen::RowVector3d a = r.energies.row(0), b = r.energies.row(1);
  a.array() -= a.mean();
  b.array() -= b.mean();
  // the shape inverts (one low + degenerate pair -> degenerate pair + one high); at
  // S_I = 8/3 the two splittings still differ in size, so compare normalized patterns
  a /= a.cwiseAbs().maxCoeff();
  b /= b.cwiseAbs().maxCoeff();
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(b(k), -a(2 - k), 1e-6);
}

TEST(Spectral, ContinuationExposesBranchShift) {
  // following the ground branch of the two-well ring continuously through 2 pi ends on branch 1
  auto p = params(2, 40, 0, 2);
  // grid steps over the exact crossing at pi, where the degenerate pair is arbitrary
  auto r = spectrum_sweep(p, grid(80, 0.01, 0.01 + kTwoPi), 2, {.continuation = true});
  auto s = spectrum_sweep(p, std::vector<double>{0.01}, 2);
  EXPECT_NEAR(r.energies(79, 0), s.energies(0, 1), 1e-10);
  EXPECT_NEAR(r.energies(79, 1), s.energies(0, 0), 1e-10);
}

TEST(Spectral, DiagnosticsReport) {
  auto p = params(2, 120, 0, 2);
  auto r = spectrum_sweep(p, grid(101, -kPi, kPi), 4);
  auto j = spectral_diagnostics(r, p);
  EXPECT_LT(j.at("gap_at_pi").get<double>(), 1e-10 * 2);
  EXPECT_LT(j.at("ed_monodromy").at("max_diff").get<double>(), 1e-12);
  EXPECT_LT(j.at("diga_monodromy").at("max_diff").get<double>(), 1e-14);
  EXPECT_LT(j.at("parity_residual").at("theta_0").get<double>(), 1e-12);
  EXPECT_LT(j.at("parity_residual").at("theta_pi").get<double>(), 1e-12);
  EXPECT_TRUE(j.contains("branches"));
}

TEST(Spectral, DiagnosticsMissingPi) {
  auto p = params(2, 8, 0, 2);
  auto r = spectrum_sweep(p, grid(4, 0, 1), 2);
  EXPECT_THROW(spectral_diagnostics(r, p), ConfigError);
}

TEST(Spectral, ThreeWellDigaMonodromy) {
  for (double th : {0.0, 0.4, -2.0}) {
    // E_k(theta + 2 pi) = E_{k+1}(theta): identical cosine arguments, so exact
    EXPECT_EQ(diga_energy(3, 3, th + kTwoPi, 0), diga_energy(3, 3, th, 1));
    EXPECT_EQ(diga_energy(3, 3, th + kTwoPi, 1), diga_energy(3, 3, th, 2));
    EXPECT_NEAR(diga_energy(3, 3, th + kTwoPi, 2), diga_energy(3, 3, th, 0), 1e-14);
  }
}
