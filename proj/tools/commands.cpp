#include "commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ringtheta/analysis.hpp"
#include "ringtheta/csv.hpp"
#include "ringtheta/detfunc.hpp"
#include "ringtheta/dynamics.hpp"
#include "ringtheta/labframe.hpp"
#include "ringtheta/parallel.hpp"
#include "ringtheta/semiclassics.hpp"
#include "ringtheta/spectral.hpp"

#ifndef RINGTHETA_VERSION
#define RINGTHETA_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace ringtheta::cli {

double to_mhz(double w) { return w / kTwoPi * 1e3; }
double from_mhz(double nu) { return nu * kTwoPi / 1e3; }

std::string Context::path(const std::string& file) const { return (fs::path(out_dir) / file).string(); }

std::uint64_t config_hash(const json& cfg) {
  // nlohmann objects are key-sorted, so dump() is canonical
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : cfg.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json model_defaults(int n, int ns, double omega) {
  ModelParams p;
  p.n = n;
  p.n_sites = ns;
  p.omega = omega;
  return p;
}

ModelParams model_of(const json& j) {
  auto p = j.get<ModelParams>();
  p.validate();
  return p;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void write_json(Context& c, const std::string& file, const json& j) {
  std::ofstream out(c.path(file));
  if (!out) throw IoError("cannot write '" + c.path(file) + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for '" + c.path(file) + "'");
  c.outputs.push_back(file);
}

void write_table(Context& c, const std::string& file, const CsvTable& t) {
  write_csv(c.path(file), t);
  c.outputs.push_back(file);
}

// "_mhz" companions for frequency fields when --units mhz
void add_mhz(const Context& c, json& j, std::initializer_list<const char*> keys) {
  if (c.units != Units::mhz) return;
  for (const char* k : keys)
    if (j.contains(k) && j[k].is_number()) j[std::string(k) + "_mhz"] = to_mhz(j[k].get<double>());
}

std::vector<double> theta_grid(const json& g) {
  int pts = get<int>(g, "points");
  double lo = get<double>(g, "min"), hi = get<double>(g, "max");
  if (pts < 1) throw ConfigError("theta_grid.points must be >= 1");
  if (!(hi >= lo)) throw ConfigError("theta_grid: max < min");
  std::vector<double> v;
  for (int i = 0; i < pts; ++i) v.push_back(pts == 1 ? lo : lo + (hi - lo) * i / (pts - 1));
  return v;
}

StateVector initial_state(const json& j, const ModelParams& p) {
  InitialStateSpec s;
  auto kind = get<std::string>(j, "kind");
  if (kind == "delta") s.kind = InitialStateSpec::Kind::delta;
  else if (kind == "cosine_power") s.kind = InitialStateSpec::Kind::cosine_power;
  else if (kind == "ground") s.kind = InitialStateSpec::Kind::ground;
  else throw ConfigError("initial.kind must be delta, cosine_power or ground");
  s.site = get<int>(j, "site");
  s.alpha = get<double>(j, "alpha");
  return prepare_initial_state(s, p);
}

CsvTable wells_table(const Trajectory& tr, int n) {
  CsvTable t;
  t.header = {"time_ns"};
  for (int l = 0; l < n; ++l) t.header.push_back("W_" + std::to_string(l));
  for (std::size_t k = 0; k < tr.times_ns.size(); ++k) {
    std::vector<double> row{tr.times_ns[k]};
    for (double w : well_probabilities(tr.observables[k].probabilities, n)) row.push_back(w);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string compiler_id() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_hash(json(ss.str()));
}

}  // namespace

json default_config(const std::string& cmd) {
  const json integ = {{"rtol", 1e-10}, {"atol", 1e-12}, {"step_factor", 50.0}};
  if (cmd == "spectrum")
    return {{"model", model_defaults(2, 120, 2.0)},
            {"theta_grid", {{"points", 101}, {"min", -kPi}, {"max", kPi}}},
            {"branches", 4},
            {"continuation", false}};
  if (cmd == "converge")
    return {{"kind", "gap_vs_ns"}, {"model", model_defaults(2, 120, 2.0)}, {"grid", json::array()}};
  if (cmd == "dynamics")
    return {{"model", model_defaults(2, 4, 1.5)},
            {"experiment", nullptr},
            {"initial", {{"kind", "delta"}, {"site", 0}, {"alpha", 0.0}}},
            {"t_end_ns", 5000.0},
            {"samples", 1000},
            {"ramp", nullptr}};
  if (cmd == "diga")
    return {{"n", 2}, {"omega", 2.0}, {"theta", 0.0}, {"inertia_ns", 1.0},
            {"from_well", 0}, {"t_end_ns", 100.0}, {"samples", 1000}};
  if (cmd == "gy") return {{"gy", GyConfig{}}, {"fd_points", 4001}};
  if (cmd == "labframe")
    return {{"graph", {{"file", nullptr},
                       {"synthetic",
                        {{"n_sites", 4},
                         {"separation", 0.0628},
                         {"spectators_per_level", 2},
                         {"ring_resolution", 0.5},
                         {"f_min", 1.0},
                         {"f_max", 0.0}}}}},
            {"drives_file", nullptr},
            {"Omega", 0.00135},
            {"Delta", 0.00375},
            {"n", 2},
            {"theta", 0.0},
            {"initial_site", 0},
            {"t_end_ns", 5000.0},
            {"samples", 1001},
            {"seed", 7},
            {"integrator", integ}};
  if (cmd == "map-params")
    return {{"Omega", 0.00135}, {"Delta", 0.00375}, {"n", 2}, {"n_sites", 4}, {"n_sites_scan", json::array()}};
  if (cmd == "fit")
    return {{"input", "trajectory.csv"}, {"time_column", "time_ns"}, {"column", ""}, {"model", "n2_prob"}};
  throw ConfigError("unknown command '" + cmd + "'");
}

void run_spectrum(Context& c) {
  auto p = model_of(c.config.at("model"));
  auto grid = theta_grid(c.config.at("theta_grid"));
  int branches = get<int>(c.config, "branches");
  SweepOptions opt;
  opt.continuation = get<bool>(c.config, "continuation");
  auto r = spectrum_sweep(p, grid, branches, opt);
  write_table(c, "spectrum.csv", spectrum_table(r));
  bool has_pi = std::any_of(grid.begin(), grid.end(), [](double t) { return std::abs(reduce_angle(t - kPi)) < 1e-12; });
  if (has_pi && branches >= 2) {
    auto d = spectral_diagnostics(r, p);
    write_json(c, "diagnostics.json", d);
    c.summary["gap_at_pi"] = d["gap_at_pi"];
  }
  c.summary["rows"] = grid.size();
}

void run_converge(Context& c) {
  auto kind = parse_sweep_kind(get<std::string>(c.config, "kind"));
  auto grid = get<std::vector<double>>(c.config, "grid");
  if (grid.empty()) {
    switch (kind) {
      case SweepKind::gap_vs_ns: grid = {10, 20, 30, 40, 60, 80, 120}; break;
      case SweepKind::ed_diga_ratio_vs_omega: grid = {4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16}; break;
      case SweepKind::fuzziness_vs_alpha: grid = {2, 4, 6, 8}; break;
    }
    c.config["grid"] = grid;  // resolved defaults are part of the hashed config
  }
  auto p = model_of(c.config.at("model"));
  auto tab = convergence_suite(kind, p, grid);
  write_table(c, "converge.csv", CsvTable{tab.columns, tab.rows});
  c.summary["rows"] = tab.rows.size();
  c.summary["errors"] = tab.errors;
  if (tab.rows.empty()) throw NumericalError("converge: every grid point failed: " + tab.errors.front());
}

void run_dynamics(Context& c) {
  json& m = c.config["model"];
  if (!c.config["experiment"].is_null()) {
    const json& e = c.config["experiment"];
    auto mp = map_experimental_params(get<double>(e, "Omega"), get<double>(e, "Delta"), get<int>(m, "n"),
                                      get<int>(m, "n_sites"));
    m["omega"] = mp.omega_dimless;
    m["inertia_ns"] = mp.inertia_ns;
  }
  auto p = model_of(m);
  auto psi = initial_state(c.config.at("initial"), p);
  auto t = uniform_times(get<double>(c.config, "t_end_ns"), get<int>(c.config, "samples"));
  Trajectory tr;
  const json& ramp = c.config["ramp"];
  if (ramp.is_null()) {
    tr = evolve(build_ring_hamiltonian(p), psi, t, p.inertia_ns);
  } else {
    ThetaSchedule s{get<std::vector<double>>(ramp, "t_ns"), get<std::vector<double>>(ramp, "theta")};
    tr = evolve_theta_ramp(p, s, psi, t, ramp.value("steps", 200));
    c.summary["final_ground_fidelity"] = tr.ground_fidelity.back();
  }
  double drift = 0;
  for (const auto& o : tr.observables) drift = std::max(drift, std::abs(o.norm - 1));
  write_table(c, "trajectory.csv", trajectory_table(tr));
  if (p.n > 1) write_table(c, "wells.csv", wells_table(tr, p.n));
  c.summary["max_norm_drift"] = drift;
  c.summary["model"] = p;
}

void run_diga(Context& c) {
  const int n = get<int>(c.config, "n");
  const double w = get<double>(c.config, "omega"), th = get<double>(c.config, "theta");
  const double I = get<double>(c.config, "inertia_ns");
  const int from = get<int>(c.config, "from_well");
  if (!(I > 0)) throw ConfigError("inertia_ns must be positive");
  auto q = instanton_quantities(n, w, th);
  auto t = uniform_times(get<double>(c.config, "t_end_ns"), get<int>(c.config, "samples"));
  CsvTable tab;
  tab.header = {"time_ns"};
  for (int l = 0; l < n; ++l) tab.header.push_back("P_" + std::to_string(l));
  tab.header.push_back("cos_x");
  tab.header.push_back("sin_x");
  for (double tn : t) {
    std::vector<double> row{tn};
    double cx = 0, sx = 0;
    for (int l = 0; l < n; ++l) {
      double pr = diga_hop_probability(n, w, th, from, l, tn / I);
      row.push_back(pr);
      cx += pr * std::cos(kTwoPi * l / n);
      sx += pr * std::sin(kTwoPi * l / n);
    }
    row.push_back(cx);
    row.push_back(sx);
    tab.rows.push_back(std::move(row));
  }
  write_table(c, "diga_trajectory.csv", tab);
  json j = {{"n", q.n},
            {"omega", q.omega},
            {"theta", q.theta},
            {"action_real", q.action_real},
            {"density", q.density},
            {"spectrum", q.spectrum},
            {"chi_t", q.chi_t},
            {"semiclassical_valid", q.semiclassical_valid},
            {"warning", q.warning},
            {"inertia_ns", I},
            // 2 omega d per unit dimensionless time, in ns^-1
            {"omega_diga_ns_inv", 2 * w * q.density / I}};
  add_mhz(c, j, {"omega_diga_ns_inv"});
  write_json(c, "diga.json", j);
  if (!q.semiclassical_valid) c.summary["warning"] = q.warning;
}

void run_gy(Context& c) {
  auto g = c.config.at("gy").get<GyConfig>();
  g.validate();
  auto rep = gy_report(g, get<int>(c.config, "fd_points"));
  write_json(c, "gy.json", rep);
  c.summary["odd"] = rep["odd"];
  c.summary["even"] = rep["even"];
}

void run_labframe(Context& c) {
  LevelGraph g;
  const json& gj = c.config.at("graph");
  if (!gj.at("file").is_null()) {
    g = load_level_graph(gj["file"].get<std::string>());
  } else {
    const json& s = gj.at("synthetic");
    SyntheticGraphSpec spec;
    spec.n_sites = get<int>(s, "n_sites");
    spec.separation = get<double>(s, "separation");
    spec.spectators_per_level = get<int>(s, "spectators_per_level");
    spec.ring_resolution = get<double>(s, "ring_resolution");
    spec.f_min = get<double>(s, "f_min");
    spec.f_max = get<double>(s, "f_max");
    spec.seed = c.config.at("seed").get<std::uint64_t>();
    g = build_synthetic_graph(spec);
  }
  g.validate();
  DriveSet d;
  if (!c.config.at("drives_file").is_null()) {
    auto path = c.config["drives_file"].get<std::string>();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open drives file '" + path + "'");
    json dj;
    try {
      in >> dj;
    } catch (const json::exception& e) {
      throw ConfigError("drives file '" + path + "': " + e.what());
    }
    d = dj.get<DriveSet>();
  } else {
    d = make_ring_drives(g, get<double>(c.config, "Omega"), get<double>(c.config, "Delta"), get<int>(c.config, "n"),
                         get<double>(c.config, "theta"));
  }
  auto rwa = rwa_reduce(g, d);
  auto t = uniform_times(get<double>(c.config, "t_end_ns"), get<int>(c.config, "samples"));
  const json& ij = c.config.at("integrator");
  LabFrameConfig lc{get<double>(ij, "rtol"), get<double>(ij, "atol"), get<double>(ij, "step_factor")};
  const int site = get<int>(c.config, "initial_site");
  auto lab = simulate_lab_frame(g, d, ring_basis_state(g, site), t, lc);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(rwa.hamiltonian.dim());
  if (site < 0 || site >= v.size()) throw ConfigError("initial_site out of range");
  v(site) = 1;
  auto ref = evolve(rwa.hamiltonian, StateVector(v), t, 1.0);

  double dev = 0, leak = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    for (std::size_t i = 0; i < ref.observables[k].probabilities.size(); ++i)
      dev = std::max(dev, std::abs(lab.ring.observables[k].probabilities[i] - ref.observables[k].probabilities[i]));
    leak = std::max(leak, lab.leakage[k]);
  }
  save_level_graph(g, c.path("graph.json"));
  c.outputs.push_back("graph.json");
  write_json(c, "drives.json", d);
  auto lab_tab = trajectory_table(lab.ring);
  lab_tab.header.push_back("leakage");
  for (std::size_t k = 0; k < lab_tab.rows.size(); ++k) lab_tab.rows[k].push_back(lab.leakage[k]);
  write_table(c, "lab_trajectory.csv", lab_tab);
  write_table(c, "rwa_trajectory.csv", trajectory_table(ref));
  json rep = {{"max_site_deviation", dev},
              {"max_leakage", leak},
              {"max_norm_drift", lab.max_norm_drift},
              {"rwa_theta", rwa.theta},
              {"rwa_hopping", rwa.hopping},
              {"rwa_site_potential", rwa.site_potential},
              {"min_separation", g.min_separation()},
              {"ode", {{"accepted", lab.stats.accepted},
                       {"rejected", lab.stats.rejected},
                       {"max_error_ratio", lab.stats.max_error_ratio}}}};
  add_mhz(c, rep, {"rwa_hopping", "min_separation"});
  write_json(c, "labframe.json", rep);
  c.summary["max_site_deviation"] = dev;
}

void run_map_params(Context& c) {
  const double Om = get<double>(c.config, "Omega"), De = get<double>(c.config, "Delta");
  const int n = get<int>(c.config, "n");
  auto m = map_experimental_params(Om, De, n, get<int>(c.config, "n_sites"));
  json j = m;
  add_mhz(c, j, {"Omega", "Delta", "omega_tilde", "omega_diga_tilde"});
  write_json(c, "map.json", j);
  auto scan = get<std::vector<int>>(c.config, "n_sites_scan");
  if (!scan.empty()) {
    CsvTable t{{"n_s", "omega_tilde", "omega_diga_tilde", "omega", "inertia_ns", "feasibility_ratio"}, {}};
    for (int ns : scan) {
      auto x = map_experimental_params(Om, De, n, ns);
      t.rows.push_back({double(ns), x.omega_tilde, x.omega_diga_tilde, x.omega_dimless, x.inertia_ns,
                        x.feasibility_ratio});
    }
    write_table(c, "feasibility.csv", t);
  }
  c.summary["omega"] = m.omega_dimless;
  c.summary["inertia_ns"] = m.inertia_ns;
}

void run_fit(Context& c) {
  auto model = parse_fit_model(get<std::string>(c.config, "model"));
  auto path = get<std::string>(c.config, "input");
  auto col = get<std::string>(c.config, "column");
  if (col.empty()) col = model == FitModel::n2_prob ? "P_0" : "cos_x";
  auto tab = read_csv(path);
  auto t = tab.column(get<std::string>(c.config, "time_column"));
  auto y = tab.column(col);
  auto f = fit_tunneling_probability(t, y, model);
  json j = f;
  j["input"] = path;
  j["input_fnv1a"] = hex64(file_hash(path));
  j["column"] = col;
  add_mhz(c, j, {"omega_tun", "omega_fast"});
  write_json(c, "fit.json", j);
  c.summary["omega_tun"] = f.omega_tun;
  c.summary["frozen"] = f.frozen;
}

void write_manifest(Context& c, const std::string& status, const std::string& error) {
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - c.started).count();
  json m = {{"command", c.command},
            {"status", status},
            {"config", c.config},
            {"config_hash", hex64(config_hash(c.config))},
            {"versions",
             {{"ringtheta", RINGTHETA_VERSION},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"compiler", compiler_id()}}},
            {"threads", thread_count()},
            {"units", c.units == Units::mhz ? "mhz" : "ns_inv"},
            {"started_utc", utc_now()},
            {"wall_time_s", wall},
            {"outputs", c.outputs},
            {"summary", c.summary}};
  if (!error.empty()) m["error"] = error;
  std::ofstream out(c.path("manifest.json"));
  if (!out) throw IoError("cannot write manifest in '" + c.out_dir + "'");
  out << m.dump(2) << "\n";
}

}  // namespace ringtheta::cli
