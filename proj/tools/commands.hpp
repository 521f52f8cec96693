#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ringtheta::cli {

enum class Units { ns_inv, mhz };

// Frequencies in configs are always angular ns^-1. MHz only at the edges:
// nu = omega / (2 pi) * 1e3.
double to_mhz(double w);
double from_mhz(double nu);

struct Context {
  std::string command;
  nlohmann::json config;  // merged: defaults < --config file < flags; hashed
  std::string out_dir = ".";
  Units units = Units::ns_inv;
  unsigned threads = 0;
  std::vector<std::string> outputs;  // files written, relative to out_dir
  nlohmann::json summary = nlohmann::json::object();
  std::chrono::steady_clock::time_point started;

  std::string path(const std::string& file) const;
};

// FNV-1a over the canonical (key-sorted, compact) dump.
std::uint64_t config_hash(const nlohmann::json& cfg);
std::string hex64(std::uint64_t h);

nlohmann::json default_config(const std::string& command);

// Command bodies; throw ConfigError / NumericalError / IoError.
void run_spectrum(Context& c);
void run_converge(Context& c);
void run_dynamics(Context& c);
void run_diga(Context& c);
void run_gy(Context& c);
void run_labframe(Context& c);
void run_map_params(Context& c);
void run_fit(Context& c);

void write_manifest(Context& c, const std::string& status, const std::string& error = {});

}  // namespace ringtheta::cli
