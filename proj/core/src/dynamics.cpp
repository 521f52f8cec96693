#include "ringtheta/dynamics.hpp"

#include <cmath>
#include <string>

#include "ringtheta/spectral.hpp"

namespace ringtheta {

StateVector::StateVector(Eigen::VectorXcd a) : amplitudes(std::move(a)) {
  if (amplitudes.size() == 0) throw ConfigError("StateVector: empty");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-12) throw ConfigError("StateVector: not normalized");
}

StateVector prepare_initial_state(const InitialStateSpec& spec, const ModelParams& p) {
  p.validate();
  const int ns = p.n_sites;
  if (spec.site < 0 || spec.site >= ns) throw ConfigError("initial state: site out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(ns);
  switch (spec.kind) {
    case InitialStateSpec::Kind::delta:
      v(spec.site) = 1.0;
      break;
    case InitialStateSpec::Kind::cosine_power: {
      if (!(spec.alpha >= 0)) throw ConfigError("initial state: alpha must be >= 0");
      const double xc = p.position(spec.site);
      for (int i = 0; i < ns; ++i)
        v(i) = std::pow(0.5 * (1.0 + std::cos(p.position(i) - xc)), 2.0 * spec.alpha);
      v /= v.norm();
      break;
    }
    case InitialStateSpec::Kind::ground: {
      auto es = eigendecompose(build_ring_hamiltonian(p));
      v = es.vectors.col(0);
      v /= v.norm();
      break;
    }
  }
  return StateVector(std::move(v));
}

Observables measure(const Eigen::VectorXcd& psi, const HermitianOperator* h) {
  Observables o;
  const Eigen::Index d = psi.size();
  o.probabilities.resize(d);
  double c = 0, s = 0, nrm = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    double pi = std::norm(psi(i));
    o.probabilities[i] = pi;
    double x = kTwoPi * double(i) / double(d);
    c += pi * std::cos(x);
    s += pi * std::sin(x);
    nrm += pi;
  }
  o.cos_x = c;
  o.sin_x = s;
  o.norm = std::sqrt(nrm);
  if (h) o.energy = psi.dot(h->matrix() * psi).real();  // dot conjugates the first argument
  return o;
}

namespace {

void check_times(std::span<const double> t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) throw ConfigError("times must be finite");
    if (i && t[i] < t[i - 1]) throw ConfigError("times must be nondecreasing");
  }
}

}  // namespace

Trajectory evolve(const HermitianOperator& h, const StateVector& psi0, std::span<const double> times_ns,
                  double inertia_ns) {
  if (psi0.amplitudes.size() != h.dim())
    throw ConfigError("evolve: state dimension " + std::to_string(psi0.amplitudes.size()) +
                      " does not match operator dimension " + std::to_string(h.dim()));
  if (!(inertia_ns > 0)) throw ConfigError("evolve: inertia_ns must be positive");
  check_times(times_ns);
  auto es = eigendecompose(h);
  Eigen::VectorXcd c = es.vectors.adjoint() * psi0.amplitudes;
  Trajectory tr;
  tr.times_ns.assign(times_ns.begin(), times_ns.end());
  for (double t : times_ns) {
    double tau = t / inertia_ns;
    Eigen::VectorXcd ct(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) ct(k) = c(k) * std::polar(1.0, -es.values(k) * tau);
    Eigen::VectorXcd psi = es.vectors * ct;
    tr.observables.push_back(measure(psi, &h));
    tr.states.emplace_back();
    tr.states.back().amplitudes = std::move(psi);
  }
  return tr;
}

double ThetaSchedule::at(double t) const {
  if (t_ns.empty() || t_ns.size() != theta.size()) throw ConfigError("theta schedule: malformed");
  if (t < t_ns.front() - 1e-12 || t > t_ns.back() + 1e-12)
    throw ConfigError("theta schedule: gap at t = " + std::to_string(t));
  if (t_ns.size() == 1 || t <= t_ns.front()) return theta.front();
  for (std::size_t k = 1; k < t_ns.size(); ++k)
    if (t <= t_ns[k]) {
      double u = (t - t_ns[k - 1]) / (t_ns[k] - t_ns[k - 1]);
      return theta[k - 1] + u * (theta[k] - theta[k - 1]);
    }
  return theta.back();
}

Trajectory evolve_theta_ramp(const ModelParams& p, const ThetaSchedule& sched, const StateVector& psi0,
                             std::span<const double> times_ns, int steps) {
  p.validate();
  if (steps < 1) throw ConfigError("ramp: steps must be >= 1");
  if (psi0.amplitudes.size() != p.n_sites) throw ConfigError("ramp: state dimension mismatch");
  if (times_ns.empty()) throw ConfigError("ramp: empty time grid");
  check_times(times_ns);
  for (std::size_t k = 1; k < sched.t_ns.size(); ++k)
    if (!(sched.t_ns[k] > sched.t_ns[k - 1])) throw ConfigError("theta schedule: knots must increase");
  const double t0 = times_ns.front(), t1 = times_ns.back();
  sched.at(t0);
  sched.at(t1);  // coverage
  const double dt = (t1 - t0) / steps;

  auto system_at = [&](double th) {
    ModelParams q = p;
    q.theta = th;
    auto h = build_ring_hamiltonian(q);
    return std::pair{h, eigendecompose(h)};
  };
  auto propagate = [&](const EigenSystem& es, const Eigen::VectorXcd& psi, double span) {
    Eigen::VectorXcd c = es.vectors.adjoint() * psi;
    double tau = span / p.inertia_ns;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -es.values(k) * tau);
    return Eigen::VectorXcd(es.vectors * c);
  };

  Trajectory tr;
  tr.times_ns.assign(times_ns.begin(), times_ns.end());
  Eigen::VectorXcd psi = psi0.amplitudes;
  std::size_t out = 0;
  int k = 0;
  double step_start = t0;
  auto cur = system_at(sched.at(t0 + 0.5 * dt));
  while (out < times_ns.size()) {
    double step_end = (k + 1 == steps) ? t1 : t0 + (k + 1) * dt;
    // outputs inside this step (the last step also takes t1)
    while (out < times_ns.size() && (times_ns[out] < step_end || k + 1 >= steps)) {
      Eigen::VectorXcd v = propagate(cur.second, psi, times_ns[out] - step_start);
      double th = sched.at(times_ns[out]);
      auto inst = system_at(th);
      tr.observables.push_back(measure(v, &inst.first));
      tr.ground_fidelity.push_back(std::norm(inst.second.vectors.col(0).dot(v)));
      tr.states.emplace_back();
      tr.states.back().amplitudes = std::move(v);
      ++out;
    }
    if (out >= times_ns.size()) break;
    psi = propagate(cur.second, psi, step_end - step_start);
    step_start = step_end;
    ++k;
    cur = system_at(sched.at(std::min(t1, t0 + (k + 0.5) * dt)));
  }
  return tr;
}

std::vector<Observables> observables(const Trajectory& traj, const ModelParams& p) {
  p.validate();
  std::vector<Observables> r;
  auto h = build_ring_hamiltonian(p);
  for (const auto& s : traj.states) {
    if (s.amplitudes.size() != p.n_sites) throw ConfigError("observables: dimension mismatch");
    r.push_back(measure(s.amplitudes, &h));
  }
  return r;
}

std::vector<double> well_probabilities(const std::vector<double>& site_p, int n) {
  const int ns = int(site_p.size());
  if (n < 1 || ns % n != 0) throw ConfigError("well_probabilities: n_sites must be a multiple of n");
  const int m = ns / n;
  std::vector<double> w(n, 0.0);
  for (int i = 0; i < ns; ++i) {
    int l = i / m, off = i % m;
    // distance to centre l is off, to centre l+1 is m - off
    if (2 * off < m)
      w[l] += site_p[i];
    else if (2 * off > m)
      w[(l + 1) % n] += site_p[i];
    else {
      w[l] += 0.5 * site_p[i];
      w[(l + 1) % n] += 0.5 * site_p[i];
    }
  }
  return w;
}

std::vector<double> uniform_times(double t_end_ns, int samples) {
  if (samples < 2 || !(t_end_ns > 0)) throw ConfigError("time grid: need >= 2 samples and t_end > 0");
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = t_end_ns * i / (samples - 1);
  return t;
}

}  // namespace ringtheta
