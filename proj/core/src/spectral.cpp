#include "ringtheta/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ringtheta/parallel.hpp"
#include "ringtheta/semiclassics.hpp"

namespace ringtheta {

namespace {

void fix_phases(Eigen::MatrixXcd& v) {
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    Eigen::Index imax = 0;
    double best = -1;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      double a = std::abs(v(i, k));
      // strict comparison with a small slack keeps the choice stable under rounding
      if (a > best * (1 + 1e-12)) {
        best = a;
        imax = i;
      }
    }
    cplx ph = v(imax, k) / best;
    v.col(k) *= std::conj(ph);
    v(imax, k) = best;
  }
}

}  // namespace

EigenSystem eigendecompose(const HermitianOperator& h) {
  EigenSystem out;
  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix().real());
    if (es.info() != Eigen::Success) throw NumericalError("eigendecompose: QL iteration did not converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("eigendecompose: QL iteration did not converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  fix_phases(out.vectors);
  return out;
}

Eigen::VectorXd eigenvalues(const HermitianOperator& h) {
  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix().real(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: QL iteration did not converge");
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: QL iteration did not converge");
  return es.eigenvalues();
}

SpectrumResult spectrum_sweep(const ModelParams& p, std::span<const double> grid, int n_branches,
                              const SweepOptions& opt) {
  p.validate();
  if (grid.empty()) throw ConfigError("spectrum_sweep: empty theta grid");
  if (n_branches < 1 || n_branches > p.n_sites)
    throw ConfigError("spectrum_sweep: n_branches must lie in [1, n_sites]");
  const bool vecs = opt.with_vectors || opt.continuation;
  SpectrumResult r;
  r.theta_grid.assign(grid.begin(), grid.end());
  r.energies.resize(Eigen::Index(grid.size()), n_branches);
  std::vector<Eigen::MatrixXcd> vs(vecs ? grid.size() : 0);
  parallel_for(grid.size(), [&](std::size_t g) {
    ModelParams q = p;
    q.theta = grid[g];
    try {
      auto h = build_ring_hamiltonian(q);
      if (vecs) {
        auto es = eigendecompose(h);
        r.energies.row(Eigen::Index(g)) = es.values.head(n_branches).transpose();
        vs[g] = es.vectors.leftCols(n_branches);
      } else {
        r.energies.row(Eigen::Index(g)) = eigenvalues(h).head(n_branches).transpose();
      }
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at theta = " + std::to_string(grid[g]));
    }
  });
  if (opt.continuation) {
    for (std::size_t g = 1; g < grid.size(); ++g) {
      // greedy max-overlap assignment against the previous point
      Eigen::MatrixXd ov = (vs[g - 1].adjoint() * vs[g]).cwiseAbs();
      std::vector<int> perm(n_branches, -1);
      std::vector<bool> used(n_branches, false);
      for (int b = 0; b < n_branches; ++b) {
        int best = -1;
        for (int c = 0; c < n_branches; ++c)
          if (!used[c] && (best < 0 || ov(b, c) > ov(b, best))) best = c;
        perm[b] = best;
        used[best] = true;
      }
      Eigen::RowVectorXd e = r.energies.row(Eigen::Index(g));
      Eigen::MatrixXcd v = vs[g];
      for (int b = 0; b < n_branches; ++b) {
        r.energies(Eigen::Index(g), b) = e(perm[b]);
        vs[g].col(b) = v.col(perm[b]);
      }
    }
  }
  if (opt.with_vectors) r.eigenvectors = std::move(vs);
  return r;
}

namespace {

double max_sorted_diff(Eigen::VectorXd a, Eigen::VectorXd b) {
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  return (a - b).cwiseAbs().maxCoeff();
}

HermitianOperator reflect(const HermitianOperator& h) {
  const Eigen::Index ns = h.dim();
  Eigen::MatrixXcd m(ns, ns);
  for (Eigen::Index i = 0; i < ns; ++i)
    for (Eigen::Index j = 0; j < ns; ++j) m((ns - i) % ns, (ns - j) % ns) = h(i, j);
  return HermitianOperator(std::move(m));
}

nlohmann::json branch_rows(const Eigen::RowVectorXd& e, double omega) {
  std::vector<double> raw(e.data(), e.data() + e.size());
  double mean = e.mean();
  std::vector<double> centred;
  for (double x : raw) centred.push_back(0.5 * omega + x - mean);
  return {{"raw", raw}, {"mean_subtracted", centred}, {"ground_subtracted", [&] {
             std::vector<double> g;
             for (double x : raw) g.push_back(x - raw.front());
             return g;
           }()}};
}

}  // namespace

nlohmann::json spectral_diagnostics(const SpectrumResult& r, const ModelParams& p) {
  p.validate();
  const auto& g = r.theta_grid;
  auto find = [&](double target) -> long {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(reduce_angle(g[i] - target)) < 1e-12) return long(i);
    return -1;
  };
  long ipi = find(kPi);
  if (ipi < 0) throw ConfigError("spectral_diagnostics: theta grid must contain pi");
  if (r.energies.cols() < 2) throw ConfigError("spectral_diagnostics: need at least 2 branches");

  nlohmann::json rep;
  rep["params"] = p;
  rep["gap_at_pi"] = std::abs(r.energies(ipi, 1) - r.energies(ipi, 0));
  rep["gap_at_pi_over_omega"] = rep["gap_at_pi"].get<double>() / p.omega;

  // ED monodromy: pairs in the grid differing by 2 pi, else recompute at theta0 + 2 pi
  nlohmann::json mono = nlohmann::json::array();
  double worst = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (std::abs(g[j] - g[i] - kTwoPi) < 1e-12) {
        double dmax = max_sorted_diff(r.energies.row(i).transpose(), r.energies.row(j).transpose());
        worst = std::max(worst, dmax);
        mono.push_back({{"theta", g[i]}, {"max_diff", dmax}, {"source", "grid"}});
      }
  if (mono.empty()) {
    ModelParams a = p, b = p;
    a.theta = g.front();
    b.theta = g.front() + kTwoPi;
    double dmax = max_sorted_diff(eigenvalues(build_ring_hamiltonian(a)),
                                  eigenvalues(build_ring_hamiltonian(b)));
    worst = dmax;
    mono.push_back({{"theta", g.front()}, {"max_diff", dmax}, {"source", "recomputed"}});
  }
  rep["ed_monodromy"] = {{"checks", mono}, {"max_diff", worst}, {"pass", worst < 1e-12}};

  if (p.n >= 2) {
    // DIGA: E_k(theta + 2 pi) = E_{k+1}(theta)
    double dmax = 0;
    for (double th : g)
      for (int k = 0; k < p.n; ++k)
        dmax = std::max(dmax, std::abs(diga_energy(p.n, p.omega, th + kTwoPi, k) -
                                       diga_energy(p.n, p.omega, th, (k + 1) % p.n)));
    rep["diga_monodromy"] = {{"max_diff", dmax}, {"relation", "E_k(theta+2pi) = E_{k+1 mod n}(theta)"}};
  }

  nlohmann::json par = nlohmann::json::object();
  for (double t0 : {0.0, kPi}) {
    long i = find(t0);
    if (i < 0) continue;
    ModelParams q = p;
    q.theta = g[i];
    auto h = build_ring_hamiltonian(q);
    double res = max_sorted_diff(eigenvalues(h), eigenvalues(reflect(h)));
    par[t0 == 0.0 ? "theta_0" : "theta_pi"] = res;
  }
  rep["parity_residual"] = par;

  nlohmann::json br = nlohmann::json::object();
  br["theta_pi"] = branch_rows(r.energies.row(ipi), p.omega);
  if (long i0 = find(0.0); i0 >= 0) br["theta_0"] = branch_rows(r.energies.row(i0), p.omega);
  rep["branches"] = br;
  return rep;
}

double tunneling_gap(const ModelParams& p) {
  p.validate();
  if (p.n == 2 && std::abs(reduce_angle(p.theta)) == 0.0) return two_well_doublet(p).gap;
  auto e = eigenvalues(build_ring_hamiltonian(p));
  return std::abs(e(1) - e(0));
}

}  // namespace ringtheta
