#pragma once

#include <string>
#include <vector>

#include "ringtheta/dynamics.hpp"
#include "ringtheta/spectral.hpp"

namespace ringtheta {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // throws ConfigError if absent
  std::vector<double> column(const std::string& name) const;
};

// Shortest round-trip representation, so reruns give identical bytes.
std::string format_number(double x);

void write_csv(const std::string& path, const CsvTable& t);  // IoError on failure
CsvTable read_csv(const std::string& path);                   // IoError / ConfigError

// theta, E_0..E_{k-1}
CsvTable spectrum_table(const SpectrumResult& r);
// time_ns, P_0..P_{d-1}, cos_x, sin_x, norm, energy
CsvTable trajectory_table(const Trajectory& tr);

}  // namespace ringtheta
