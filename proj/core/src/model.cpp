#include "ringtheta/model.hpp"

#include <cmath>
#include <string>

namespace ringtheta {

double reduce_angle(double a) {
  double r = std::remainder(a, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

void ModelParams::validate() const {
  if (n < 1) throw ConfigError("n must be a positive integer");
  if (n_sites < 3) throw ConfigError("n_sites must be >= 3");
  if (n_sites % n != 0) throw ConfigError("n_sites must be a multiple of n");
  if (!std::isfinite(theta)) throw ConfigError("theta must be finite");
  if (!std::isfinite(omega) || omega <= 0) throw ConfigError("omega must be positive and finite");
  if (!std::isfinite(inertia_ns) || inertia_ns <= 0)
    throw ConfigError("inertia_ns must be positive and finite");
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"n", p.n},
                     {"n_sites", p.n_sites},
                     {"theta", p.theta},
                     {"omega", p.omega},
                     {"inertia_ns", p.inertia_ns},
                     {"include_constant_shift", p.include_constant_shift}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  try {
    ModelParams d;
    p.n = j.value("n", d.n);
    p.n_sites = j.value("n_sites", d.n_sites);
    p.theta = j.value("theta", d.theta);
    p.omega = j.value("omega", d.omega);
    p.inertia_ns = j.value("inertia_ns", d.inertia_ns);
    p.include_constant_shift = j.value("include_constant_shift", d.include_constant_shift);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ModelParams: ") + e.what());
  }
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw ConfigError("HermitianOperator: matrix must be square and nonempty");
  const Eigen::Index d = m_.rows();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) {
      if (!std::isfinite(m_(i, j).real()) || !std::isfinite(m_(i, j).imag()))
        throw ConfigError("HermitianOperator: non-finite entry");
      if (std::abs(m_(i, j) - std::conj(m_(j, i))) > 1e-14)
        throw ConfigError("HermitianOperator: matrix is not Hermitian");
    }
}

bool HermitianOperator::is_real() const {
  return (m_.imag().array() == 0.0).all();
}

std::vector<double> ring_potential(const ModelParams& p) {
  const int m = p.sites_per_well();
  const double lam = p.lambda();
  std::vector<double> v(p.n_sites);
  for (int i = 0; i < p.n_sites; ++i) {
    int j = i % m;  // exact Z_n periodicity
    v[i] = lam * (1.0 - std::cos(kTwoPi * j / m));
  }
  return v;
}

namespace {

Eigen::MatrixXcd hopping_matrix(const ModelParams& p) {
  const int ns = p.n_sites;
  const double a = p.spacing();
  const cplx w = -(0.5 / (a * a)) * std::polar(1.0, p.theta / ns);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ns, ns);
  for (int i = 0; i < ns; ++i) {
    int k = (i + 1) % ns;
    m(k, i) = w;
    m(i, k) = std::conj(w);
  }
  if (p.include_constant_shift) m.diagonal().array() += 1.0 / (a * a);
  return m;
}

}  // namespace

HermitianOperator build_ring_hamiltonian(const ModelParams& p) {
  p.validate();
  Eigen::MatrixXcd m = hopping_matrix(p);
  auto v = ring_potential(p);
  for (int i = 0; i < p.n_sites; ++i) m(i, i) += v[i];
  return HermitianOperator(std::move(m));
}

HermitianOperator kinetic_part(const ModelParams& p) {
  p.validate();
  return HermitianOperator(hopping_matrix(p));
}

HermitianOperator build_kinetic_fourier(const ModelParams& p) {
  p.validate();
  using ld = long double;
  const int ns = p.n_sites;
  const ld pi = 3.141592653589793238462643383279502884L;
  const ld inv_a2 = ld(ns) * ns / (4 * pi * pi);
  const ld shift = ld(p.theta) / ns;  // (theta/2pi) * a
  // k_j = (1/a^2)(1 - cos(p_j a - theta a / 2pi)), minus 1/a^2 when the constant is off
  std::vector<ld> kj(ns);
  for (int j = 0; j < ns; ++j) {
    kj[j] = inv_a2 * (1 - std::cos(2 * pi * j / ns - shift));
    if (!p.include_constant_shift) kj[j] -= inv_a2;
  }
  // circulant: K(i, i') = c[(i - i') mod ns]
  std::vector<cplx> c(ns);
  for (int d = 0; d < ns; ++d) {
    ld re = 0, im = 0;
    for (int j = 0; j < ns; ++j) {
      long r = (long(j) * d) % ns;
      ld ang = 2 * pi * r / ns;
      re += std::cos(ang) * kj[j];
      im += std::sin(ang) * kj[j];
    }
    c[d] = cplx(double(re / ns), double(im / ns));
  }
  Eigen::MatrixXcd m(ns, ns);
  for (int i = 0; i < ns; ++i) {
    m(i, i) = c[0].real();
    for (int k = i + 1; k < ns; ++k) {
      m(k, i) = c[(k - i) % ns];
      m(i, k) = std::conj(m(k, i));
    }
  }
  return HermitianOperator(std::move(m));
}

HermitianOperator gauge_transform(const HermitianOperator& h, const GaugePhases& g) {
  const Eigen::Index d = h.dim();
  if (Eigen::Index(g.alphas.size()) != d)
    throw ConfigError("gauge_transform: phase vector length " + std::to_string(g.alphas.size()) +
                      " does not match dimension " + std::to_string(d));
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    m(i, i) = h(i, i);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      m(i, j) = h(i, j) * std::polar(1.0, g.alphas[j] - g.alphas[i]);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return HermitianOperator(std::move(m));
}

double extract_theta(const HermitianOperator& h) {
  const Eigen::Index ns = h.dim();
  if (ns < 3) throw ConfigError("extract_theta: ring needs at least 3 sites");
  for (Eigen::Index i = 0; i < ns; ++i)
    for (Eigen::Index j = 0; j < ns; ++j) {
      if (i == j) continue;
      Eigen::Index d = (i - j + ns) % ns;
      if (d == 1 || d == ns - 1) continue;
      if (h(i, j) != 0.0) throw ConfigError("extract_theta: operator is not a nearest-neighbor ring");
    }
  double phase = 0.0;
  for (Eigen::Index i = 0; i < ns; ++i) {
    cplx w = h((i + 1) % ns, i);
    if (std::abs(w) == 0.0) throw ConfigError("extract_theta: zero link coupling");
    phase += std::arg(w);
  }
  return reduce_angle(phase);
}

}  // namespace ringtheta
