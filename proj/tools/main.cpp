#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "commands.hpp"
#include "ringtheta/errors.hpp"
#include "ringtheta/parallel.hpp"

using nlohmann::json;
using namespace ringtheta;
using namespace ringtheta::cli;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, numerical_error = 3, io_error = 4 };

// Keys in a user config must exist in the defaults. A null default is a free-form slot.
void check_keys(const json& user, const json& defaults, const std::string& where) {
  if (!user.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!defaults.contains(it.key())) throw ConfigError("unknown config key '" + where + it.key() + "'");
    const json& d = defaults[it.key()];
    if (d.is_object() && !it.value().is_null()) check_keys(it.value(), d, where + it.key() + ".");
  }
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

// Per-command flags; each one patches a json pointer once set.
struct Flags {
  std::vector<std::function<void(json&, Units)>> apply;

  template <class T>
  void add(CLI::App* app, const std::string& name, const std::string& ptr, const std::string& help,
           bool frequency = false) {
    auto v = std::make_shared<std::optional<T>>();
    app->add_option(name, *v, help);
    apply.push_back([v, ptr, frequency](json& cfg, Units u) {
      if (!v->has_value()) return;
      json val = **v;
      if constexpr (std::is_floating_point_v<T>)
        if (frequency && u == Units::mhz) val = from_mhz(**v);
      cfg[json::json_pointer(ptr)] = val;
    });
  }

  void flag(CLI::App* app, const std::string& name, const std::string& ptr, const std::string& help) {
    auto v = std::make_shared<bool>(false);
    app->add_flag(name, *v, help);
    apply.push_back([v, ptr](json& cfg, Units) {
      if (*v) cfg[json::json_pointer(ptr)] = true;
    });
  }
};

void model_flags(Flags& f, CLI::App* s, const std::string& base) {
  f.add<int>(s, "--n", base + "/n", "number of wells");
  f.add<int>(s, "--n-sites", base + "/n_sites", "ring sites n_s");
  f.add<double>(s, "--omega", base + "/omega", "dimensionless omega");
  f.add<double>(s, "--theta", base + "/theta", "theta angle");
  f.add<double>(s, "--inertia-ns", base + "/inertia_ns", "I in ns");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ringtheta: quantum mechanics on a discretized ring with a theta term"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = ".", units = "ns";
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config; flags override it");
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_option("--threads", threads, "worker threads (default: RINGTHETA_THREADS or all cores)");
  app.add_option("--seed", seed, "RNG seed (labframe synthetic graph)");
  app.add_option("--units", units, "frequency units for flags and reports")->check(CLI::IsMember({"ns", "mhz"}));

  std::map<std::string, std::pair<Flags, std::function<void(Context&)>>> cmds;
  auto sub = [&](const std::string& name, const std::string& help, std::function<void(Context&)> run) {
    auto* s = app.add_subcommand(name, help);
    cmds[name].second = std::move(run);
    return std::pair{s, &cmds[name].first};
  };

  {
    auto [s, f] = sub("spectrum", "E_k(theta) over a theta grid", run_spectrum);
    model_flags(*f, s, "/model");
    f->add<int>(s, "--points", "/theta_grid/points", "theta grid points");
    f->add<double>(s, "--theta-min", "/theta_grid/min", "grid start");
    f->add<double>(s, "--theta-max", "/theta_grid/max", "grid end");
    f->add<int>(s, "--branches", "/branches", "levels per theta");
    f->flag(s, "--continuation", "/continuation", "track branches by overlap");
  }
  {
    auto [s, f] = sub("converge", "convergence sweeps", run_converge);
    model_flags(*f, s, "/model");
    f->add<std::string>(s, "--kind", "/kind", "gap_vs_ns | ed_diga_ratio_vs_omega | fuzziness_vs_alpha");
    f->add<std::vector<double>>(s, "--grid", "/grid", "sweep values");
  }
  {
    auto [s, f] = sub("dynamics", "time evolution on the ring", run_dynamics);
    model_flags(*f, s, "/model");
    f->add<double>(s, "--Omega", "/experiment/Omega", "drive strength (maps omega and I)", true);
    f->add<double>(s, "--Delta", "/experiment/Delta", "detuning scale (maps omega and I)", true);
    f->add<std::string>(s, "--initial", "/initial/kind", "delta | cosine_power | ground");
    f->add<int>(s, "--site", "/initial/site", "initial site");
    f->add<double>(s, "--alpha", "/initial/alpha", "cosine power exponent");
    f->add<double>(s, "--t-end", "/t_end_ns", "end time, ns");
    f->add<int>(s, "--samples", "/samples", "output samples");
  }
  {
    auto [s, f] = sub("diga", "dilute instanton gas predictions", run_diga);
    f->add<int>(s, "--n", "/n", "number of wells");
    f->add<double>(s, "--omega", "/omega", "dimensionless omega");
    f->add<double>(s, "--theta", "/theta", "theta angle");
    f->add<double>(s, "--inertia-ns", "/inertia_ns", "I in ns");
    f->add<int>(s, "--from-well", "/from_well", "start well");
    f->add<double>(s, "--t-end", "/t_end_ns", "end time, ns");
    f->add<int>(s, "--samples", "/samples", "output samples");
  }
  {
    auto [s, f] = sub("gy", "fluctuation determinant ratios", run_gy);
    f->add<double>(s, "--half-length", "/gy/half_length", "half-line cutoff L");
    f->add<double>(s, "--ode-tolerance", "/gy/ode_tolerance", "DOPRI5 rtol");
    f->add<int>(s, "--fd-points", "/fd_points", "finite-difference oracle points");
  }
  {
    auto [s, f] = sub("labframe", "lab-frame simulation of a driven level graph", run_labframe);
    f->add<std::string>(s, "--graph", "/graph/file", "level graph JSON (default: synthetic)");
    f->add<std::string>(s, "--drives", "/drives_file", "drives JSON (default: ring drives)");
    f->add<double>(s, "--Omega", "/Omega", "drive strength", true);
    f->add<double>(s, "--Delta", "/Delta", "detuning scale", true);
    f->add<int>(s, "--n", "/n", "number of wells");
    f->add<double>(s, "--theta", "/theta", "theta angle");
    f->add<int>(s, "--n-sites", "/graph/synthetic/n_sites", "ring levels");
    f->add<int>(s, "--spectators", "/graph/synthetic/spectators_per_level", "spectators per level");
    f->add<double>(s, "--separation", "/graph/synthetic/separation", "min transition separation", true);
    f->add<double>(s, "--t-end", "/t_end_ns", "end time, ns");
    f->add<int>(s, "--samples", "/samples", "output samples");
  }
  {
    auto [s, f] = sub("map-params", "experimental Omega, Delta to omega, I", run_map_params);
    f->add<double>(s, "--Omega", "/Omega", "drive strength", true);
    f->add<double>(s, "--Delta", "/Delta", "detuning scale", true);
    f->add<int>(s, "--n", "/n", "number of wells");
    f->add<int>(s, "--n-sites", "/n_sites", "ring sites");
    f->add<std::vector<int>>(s, "--scan", "/n_sites_scan", "n_s values for the feasibility table");
  }
  {
    auto [s, f] = sub("fit", "fit tunneling frequency from a trajectory CSV", run_fit);
    f->add<std::string>(s, "--input", "/input", "CSV file");
    f->add<std::string>(s, "--column", "/column", "value column (default P_0 or cos_x)");
    f->add<std::string>(s, "--time-column", "/time_column", "time column");
    f->add<std::string>(s, "--model", "/model", "n2_prob | n3_cos_highsym | n3_cos_generic");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  Context c;
  c.started = std::chrono::steady_clock::now();
  c.command = app.get_subcommands().front()->get_name();
  c.out_dir = out_dir;
  c.units = units == "mhz" ? Units::mhz : Units::ns_inv;
  bool out_ready = false;

  auto fail = [&](int code, const std::string& what) {
    std::cerr << "ringtheta " << c.command << ": " << what << "\n";
    if (out_ready) {
      try {
        write_manifest(c, "error", what);
      } catch (const std::exception&) {
      }
    }
    return code;
  };

  try {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir + "'");
    out_ready = true;

    if (threads) {
      if (*threads == 0) throw ConfigError("--threads must be >= 1");
      set_thread_count(*threads);
    }
    c.threads = thread_count();

    json cfg = default_config(c.command);
    if (!config_path.empty()) {
      json user = read_config(config_path);
      check_keys(user, cfg, "");
      cfg.merge_patch(user);
    }
    for (auto& a : cmds[c.command].first.apply) a(cfg, c.units);
    if (seed) {
      if (!cfg.contains("seed")) throw ConfigError("--seed has no effect on '" + c.command + "'");
      cfg["seed"] = *seed;
    }
    c.config = std::move(cfg);

    cmds[c.command].second(c);
    write_manifest(c, "ok");
    std::cout << c.summary.dump() << "\n";
    return ok;
  } catch (const ConfigError& e) {
    return fail(config_error, e.what());
  } catch (const NumericalError& e) {
    return fail(numerical_error, e.what());
  } catch (const IoError& e) {
    return fail(io_error, e.what());
  } catch (const json::exception& e) {
    return fail(config_error, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(config_error, e.what());
  } catch (const std::exception& e) {
    return fail(failure, e.what());
  }
}
