#include "ringtheta/labframe.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

namespace ringtheta {

// ---- level graph ---------------------------------------------------------

int LevelGraph::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i].id == id) return int(i);
  return -1;
}

int LevelGraph::edge_index(const std::string& a, const std::string& b) const {
  for (std::size_t i = 0; i < edges.size(); ++i)
    if ((edges[i].a == a && edges[i].b == b) || (edges[i].a == b && edges[i].b == a)) return int(i);
  return -1;
}

void LevelGraph::validate() const {
  std::set<std::string> ids;
  for (const auto& l : levels) {
    if (l.id.empty()) throw ConfigError("level graph: empty level id");
    if (!ids.insert(l.id).second) throw ConfigError("level graph: duplicate level id '" + l.id + "'");
    if (!std::isfinite(l.energy)) throw ConfigError("level graph: non-finite energy for '" + l.id + "'");
  }
  for (const auto& e : edges) {
    if (!ids.count(e.a) || !ids.count(e.b))
      throw ConfigError("level graph: edge references unknown level '" + e.a + "'-'" + e.b + "'");
    if (e.a == e.b) throw ConfigError("level graph: self edge on '" + e.a + "'");
    if (!std::isfinite(e.dipole_weight) || e.dipole_weight == 0)
      throw ConfigError("level graph: dipole_weight must be finite and nonzero");
  }
  if (ring.size() < 3) throw ConfigError("level graph: ring needs at least 3 levels");
  std::set<std::string> seen;
  for (const auto& r : ring) {
    if (!ids.count(r)) throw ConfigError("level graph: ring references unknown level '" + r + "'");
    if (!seen.insert(r).second) throw ConfigError("level graph: ring visits '" + r + "' twice");
  }
  for (std::size_t i = 0; i < ring.size(); ++i)
    if (edge_index(ring[i], ring[(i + 1) % ring.size()]) < 0)
      throw ConfigError("level graph: ring not closed, missing edge " + ring[i] + "-" +
                        ring[(i + 1) % ring.size()]);
}

double LevelGraph::min_separation() const {
  auto freq = [&](const Edge& e) {
    return std::abs(levels[index_of(e.a)].energy - levels[index_of(e.b)].energy);
  };
  double best = INFINITY;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    int ei = edge_index(ring[i], ring[(i + 1) % ring.size()]);
    const Edge& e = edges[ei];
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (int(k) == ei) continue;
      const Edge& o = edges[k];
      bool shares = o.a == e.a || o.a == e.b || o.b == e.a || o.b == e.b;
      if (shares) best = std::min(best, std::abs(freq(e) - freq(o)));
    }
  }
  return best;
}

void to_json(nlohmann::json& j, const LevelGraph& g) {
  j = nlohmann::json::object();
  j["levels"] = nlohmann::json::array();
  for (const auto& l : g.levels) j["levels"].push_back({{"id", l.id}, {"energy_ns_inv", l.energy}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges) j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"dipole_weight", e.dipole_weight}});
  j["ring"] = g.ring;
}

void from_json(const nlohmann::json& j, LevelGraph& g) {
  try {
    g = LevelGraph{};
    for (const auto& l : j.at("levels")) g.levels.push_back({l.at("id").get<std::string>(), l.at("energy_ns_inv").get<double>()});
    for (const auto& e : j.at("edges"))
      g.edges.push_back({e.at("a").get<std::string>(), e.at("b").get<std::string>(), e.value("dipole_weight", 1.0)});
    g.ring = j.at("ring").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("level graph schema: ") + e.what());
  }
  g.validate();
}

LevelGraph load_level_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open level graph file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("level graph '" + path + "': " + e.what());
  }
  return j.get<LevelGraph>();
}

void save_level_graph(const LevelGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write level graph file '" + path + "'");
  out << nlohmann::json(g).dump(2) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

LevelGraph build_synthetic_graph(const SyntheticGraphSpec& s) {
  if (s.n_sites < 3) throw ConfigError("synthetic graph: n_sites must be >= 3");
  if (!(s.separation > 0)) throw ConfigError("synthetic graph: separation must be positive");
  if (s.spectators_per_level < 0) throw ConfigError("synthetic graph: negative spectator count");
  const double f_max = s.f_max > 0 ? s.f_max : s.f_min + 1.25 * s.n_sites * s.ring_resolution;
  if (!(s.f_min > 0 && f_max > s.f_min)) throw ConfigError("synthetic graph: bad frequency band");
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int ns = s.n_sites;
  // at least 2 x separation so drive detunings keep the spectator margin
  const double ring_gap = std::max(2.0 * s.separation, s.ring_resolution);

  std::vector<double> e(ns);
  std::vector<double> f(ns);
  bool ok = false;
  for (int attempt = 0; attempt < 200000 && !ok; ++attempt) {
    e[0] = 0;
    for (int i = 1; i < ns; ++i) {
      double step = s.f_min + (f_max - s.f_min) * uni(rng);
      e[i] = e[i - 1] + (uni(rng) < 0.5 ? step : -step);
    }
    ok = true;
    for (int i = 0; i < ns && ok; ++i) {
      f[i] = std::abs(e[(i + 1) % ns] - e[i]);
      if (f[i] < s.f_min || f[i] > f_max) ok = false;
    }
    for (int i = 0; i < ns && ok; ++i)
      for (int k = i + 1; k < ns && ok; ++k)
        if (std::abs(f[i] - f[k]) < ring_gap) ok = false;
    for (int i = 0; i < ns && ok; ++i)
      for (int k = i + 1; k < ns && ok; ++k)
        if (std::abs(e[i] - e[k]) < s.f_min) ok = false;  // distinct, well-separated levels
  }
  if (!ok) throw NumericalError("synthetic graph: could not place ring levels");

  LevelGraph g;
  for (int i = 0; i < ns; ++i) {
    g.levels.push_back({"r" + std::to_string(i), e[i]});
    g.ring.push_back("r" + std::to_string(i));
  }
  for (int i = 0; i < ns; ++i)
    g.edges.push_back({g.ring[i], g.ring[(i + 1) % ns], 0.8 + 0.4 * uni(rng)});

  auto far_from_ring = [&](double fs) {
    for (double fr : f)
      if (std::abs(fs - fr) < 1.25 * s.separation) return false;
    return true;
  };
  for (int r = 0; r < ns; ++r)
    for (int k = 0; k < s.spectators_per_level; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
        // near one of the two ring transitions touching r
        double fr = uni(rng) < 0.5 ? f[r] : f[(r + ns - 1) % ns];
        double off = s.separation * (1.25 + 0.5 * uni(rng));
        double fs = fr + (uni(rng) < 0.5 ? off : -off);
        if (fs <= 0.1 || !far_from_ring(fs)) continue;
        double es = e[r] + (uni(rng) < 0.5 ? fs : -fs);
        bool distinct = true;
        for (const auto& l : g.levels)
          if (std::abs(l.energy - es) < 1e-2) distinct = false;
        if (!distinct) continue;
        std::string id = "s" + std::to_string(r) + "_" + std::to_string(k);
        g.levels.push_back({id, es});
        g.edges.push_back({g.ring[r], id, 0.5 + uni(rng)});
        placed = true;
      }
      if (!placed) throw NumericalError("synthetic graph: could not place spectator");
    }
  g.validate();
  return g;
}

// ---- drives --------------------------------------------------------------

void to_json(nlohmann::json& j, const DriveSet& d) {
  j = nlohmann::json::array();
  for (const auto& x : d.drives)
    j.push_back({{"edge", {x.a, x.b}}, {"omega_ns_inv", x.omega}, {"freq_ns_inv", x.freq}, {"phase_rad", x.phase}});
}

void from_json(const nlohmann::json& j, DriveSet& d) {
  try {
    d.drives.clear();
    for (const auto& x : j) {
      auto e = x.at("edge").get<std::vector<std::string>>();
      if (e.size() != 2) throw ConfigError("drive: edge must list two level ids");
      d.drives.push_back({e[0], e[1], x.at("omega_ns_inv").get<double>(), x.at("freq_ns_inv").get<double>(),
                          x.value("phase_rad", 0.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("drive schema: ") + e.what());
  }
}

ExperimentalMap map_experimental_params(double Omega, double Delta, int n, int ns) {
  if (!(Omega > 0) || !(Delta > 0) || !std::isfinite(Omega) || !std::isfinite(Delta))
    throw ConfigError("map: Omega and Delta must be positive");
  if (n < 1 || ns < 3) throw ConfigError("map: need n >= 1, n_sites >= 3");
  ExperimentalMap m;
  m.Omega = Omega;
  m.Delta = Delta;
  m.n = n;
  m.n_sites = ns;
  m.omega_tilde = std::sqrt(2 * Delta * Omega) * kTwoPi * n / ns;
  m.omega_diga_tilde = 8 * std::pow(2 * Delta * Delta * Delta * Omega, 0.25) * std::sqrt(2.0 * n / ns) *
                       std::exp(-2 * std::sqrt(2 * Delta / Omega) * ns / (kPi * n));
  m.omega_dimless = std::sqrt(Delta / (2 * Omega)) * n * ns / kTwoPi;
  m.inertia_ns = m.omega_dimless / m.omega_tilde;
  m.feasibility_ratio = std::sqrt(Delta * Delta + Omega * Omega) / m.omega_diga_tilde;
  return m;
}

void to_json(nlohmann::json& j, const ExperimentalMap& m) {
  j = {{"Omega", m.Omega},
       {"Delta", m.Delta},
       {"n", m.n},
       {"n_sites", m.n_sites},
       {"omega_tilde", m.omega_tilde},
       {"omega_diga_tilde", m.omega_diga_tilde},
       {"omega", m.omega_dimless},
       {"inertia_ns", m.inertia_ns},
       {"feasibility_ratio", m.feasibility_ratio}};
}

namespace {

double energy_of(const LevelGraph& g, const std::string& id) { return g.levels[g.index_of(id)].energy; }

double sgn(double x) { return x >= 0 ? 1.0 : -1.0; }

}  // namespace

DriveSet make_ring_drives(const LevelGraph& g, double Omega, double Delta, int n, double theta) {
  g.validate();
  const int ns = int(g.ring.size());
  if (n < 1 || ns % n != 0) throw ConfigError("ring drives: n_sites must be a multiple of n");
  std::vector<double> v(ns);
  for (int i = 0; i < ns; ++i) v[i] = Delta * (1 - std::cos(kTwoPi * n * double(i % (ns / n)) / ns));
  DriveSet d;
  for (int i = 0; i < ns; ++i) {
    const std::string& a = g.ring[i];
    const std::string& b = g.ring[(i + 1) % ns];
    double de = energy_of(g, b) - energy_of(g, a);
    double dv = v[(i + 1) % ns] - v[i];
    double nu = sgn(de) * (de - dv);
    if (!(nu > 0)) throw ConfigError("ring drives: detuning exceeds transition frequency");
    d.drives.push_back({a, b, Omega, nu, theta / ns + kPi});
  }
  return d;
}

namespace {

struct RingLink {
  int drive;
  double phase;  // on the ring-oriented link
};

std::vector<RingLink> match_drives(const LevelGraph& g, const DriveSet& d) {
  const int ns = int(g.ring.size());
  std::vector<RingLink> link(ns, {-1, 0.0});
  for (std::size_t k = 0; k < d.drives.size(); ++k) {
    const Drive& x = d.drives[k];
    if (!(x.freq > 0) || !std::isfinite(x.freq)) throw ConfigError("drive: frequency must be positive");
    if (!std::isfinite(x.omega) || !std::isfinite(x.phase)) throw ConfigError("drive: non-finite field");
    int hit = -1;
    double ph = 0;
    for (int i = 0; i < ns; ++i) {
      const auto& a = g.ring[i];
      const auto& b = g.ring[(i + 1) % ns];
      if (x.a == a && x.b == b) hit = i, ph = x.phase;
      else if (x.a == b && x.b == a) hit = i, ph = -x.phase;
    }
    if (hit < 0) throw ConfigError("drive on " + x.a + "-" + x.b + " is not a ring edge");
    if (link[hit].drive >= 0) throw ConfigError("two drives on ring edge " + x.a + "-" + x.b);
    link[hit] = {int(k), ph};
  }
  for (int i = 0; i < ns; ++i)
    if (link[i].drive < 0)
      throw ConfigError("missing drive for ring edge " + g.ring[i] + "-" + g.ring[(i + 1) % ns]);
  return link;
}

}  // namespace

RwaModel rwa_reduce(const LevelGraph& g, const DriveSet& d) {
  g.validate();
  const int ns = int(g.ring.size());
  auto link = match_drives(g, d);
  std::vector<double> v(ns + 1, 0.0);
  double scale = 0;
  for (int i = 0; i < ns; ++i) {
    double de = energy_of(g, g.ring[(i + 1) % ns]) - energy_of(g, g.ring[i]);
    const Drive& x = d.drives[link[i].drive];
    if (x.freq > 2 * std::abs(de) || x.freq < 0.5 * std::abs(de))
      throw ConfigError("drive on ring edge " + std::to_string(i) + " is far from resonance");
    v[i + 1] = v[i] + de - sgn(de) * x.freq;
    scale = std::max(scale, std::abs(de));
  }
  if (std::abs(v[ns]) > 1e-9 * std::max(1.0, scale))
    throw ConfigError("ambiguous rotating frame: detunings do not close around the ring (mismatch " +
                      std::to_string(v[ns]) + " ns^-1)");
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ns, ns);
  double hop = 0;
  for (int i = 0; i < ns; ++i) {
    h(i, i) = v[i];
    const Drive& x = d.drives[link[i].drive];
    int j = (i + 1) % ns;
    h(j, i) = x.omega * std::polar(1.0, link[i].phase);
    h(i, j) = std::conj(h(j, i));
    hop += std::abs(x.omega) / ns;
  }
  RwaModel r{HermitianOperator(std::move(h)), std::vector<double>(v.begin(), v.end() - 1), 0.0, hop};
  r.theta = extract_theta(r.hamiltonian);
  return r;
}

Eigen::VectorXcd ring_basis_state(const LevelGraph& g, int site) {
  if (site < 0 || site >= int(g.ring.size())) throw ConfigError("ring site out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(g.levels.size()));
  v(g.index_of(g.ring[site])) = 1.0;
  return v;
}

LabFrameRun simulate_lab_frame(const LevelGraph& g, const DriveSet& d, const Eigen::VectorXcd& psi0,
                               std::span<const double> times_ns, const LabFrameConfig& cfg) {
  g.validate();
  const int L = int(g.levels.size());
  const int ns = int(g.ring.size());
  if (psi0.size() != L) throw ConfigError("lab frame: psi0 must cover every graph level");
  if (std::abs(psi0.norm() - 1) > 1e-12) throw ConfigError("lab frame: psi0 not normalized");
  if (times_ns.empty() || times_ns.front() < 0) throw ConfigError("lab frame: times must start at >= 0");
  for (std::size_t i = 1; i < times_ns.size(); ++i)
    if (times_ns[i] < times_ns[i - 1]) throw ConfigError("lab frame: times must be nondecreasing");
  auto link = match_drives(g, d);
  const int nd = int(d.drives.size());

  // every drive acts on every edge, scaled by relative dipole weight
  struct Term {
    int a, b;
    double dE;  // E_a - E_b
    std::vector<double> coef;  // per drive: 2 omega_d w_e / w_{e_d}
  };
  std::vector<double> drive_phase(nd), drive_freq(nd), drive_w(nd);
  for (int i = 0; i < ns; ++i) {
    const Drive& x = d.drives[link[i].drive];
    int ea = g.index_of(g.ring[i]), eb = g.index_of(g.ring[(i + 1) % ns]);
    double de = g.levels[eb].energy - g.levels[ea].energy;
    drive_phase[link[i].drive] = -sgn(de) * link[i].phase;
    drive_freq[link[i].drive] = x.freq;
    drive_w[link[i].drive] = g.edges[g.edge_index(g.ring[i], g.ring[(i + 1) % ns])].dipole_weight;
  }
  std::vector<Term> terms;
  double fmax = 0;
  for (const auto& e : g.edges) {
    Term t;
    t.a = g.index_of(e.a);
    t.b = g.index_of(e.b);
    t.dE = g.levels[t.a].energy - g.levels[t.b].energy;
    fmax = std::max(fmax, std::abs(t.dE));
    for (int k = 0; k < nd; ++k) t.coef.push_back(2 * d.drives[k].omega * e.dipole_weight / drive_w[k]);
    terms.push_back(std::move(t));
  }
  for (double f : drive_freq) fmax = std::max(fmax, f);

  std::vector<double> cosv(nd);
  // interaction picture: c_j = exp(-i E_j t) b_j
  auto rhs = [&](double t, const Eigen::VectorXcd& b, Eigen::VectorXcd& db) {
    for (int k = 0; k < nd; ++k) cosv[k] = std::cos(drive_freq[k] * t + drive_phase[k]);
    db.setZero();
    for (const auto& tm : terms) {
      double amp = 0;
      for (int k = 0; k < nd; ++k) amp += tm.coef[k] * cosv[k];
      cplx ph = std::polar(amp, tm.dE * t);  // amp e^{i (E_a - E_b) t}
      db(tm.a) += ph * b(tm.b);
      db(tm.b) += std::conj(ph) * b(tm.a);
    }
    db *= cplx(0, -1);
  };

  OdeOptions o;
  o.rtol = cfg.rtol;
  o.atol = cfg.atol;
  o.h_max = 1.0 / (cfg.step_factor * fmax);
  o.h_init = o.h_max;
  Dopri5<Eigen::VectorXcd> ode(psi0, 0.0, o);

  std::vector<int> ring_idx(ns);
  for (int i = 0; i < ns; ++i) ring_idx[i] = g.index_of(g.ring[i]);

  LabFrameRun run;
  run.ring.times_ns.assign(times_ns.begin(), times_ns.end());
  for (double t : times_ns) {
    ode.advance_to(t, rhs);
    const Eigen::VectorXcd& b = ode.state();
    Eigen::VectorXcd ring(ns);
    for (int i = 0; i < ns; ++i) ring(i) = b(ring_idx[i]);
    Observables ob = measure(ring);
    double total = b.squaredNorm(), en = 0;
    for (int j = 0; j < L; ++j) en += g.levels[j].energy * std::norm(b(j));
    ob.norm = std::sqrt(total);
    ob.energy = en;
    run.max_norm_drift = std::max(run.max_norm_drift, std::abs(ob.norm - 1.0));
    run.leakage.push_back(total - ring.squaredNorm());
    run.ring.observables.push_back(std::move(ob));
    run.ring.states.emplace_back();
    run.ring.states.back().amplitudes = std::move(ring);
  }
  run.stats = ode.stats();
  return run;
}

}  // namespace ringtheta
