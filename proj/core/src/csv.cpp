#include "ringtheta/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ringtheta {

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(r.at(c));
      return v;
    }
  throw ConfigError("csv: no column named '" + name + "'");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv '" + path + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        r.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("csv '" + path + "': bad number '" + cell + "'");
      }
    }
    if (r.size() != t.header.size()) throw ConfigError("csv '" + path + "': ragged row");
    t.rows.push_back(std::move(r));
  }
  return t;
}

CsvTable spectrum_table(const SpectrumResult& r) {
  CsvTable t;
  t.header.push_back("theta");
  for (Eigen::Index k = 0; k < r.energies.cols(); ++k) t.header.push_back("E_" + std::to_string(k));
  for (std::size_t g = 0; g < r.theta_grid.size(); ++g) {
    std::vector<double> row{r.theta_grid[g]};
    for (Eigen::Index k = 0; k < r.energies.cols(); ++k) row.push_back(r.energies(Eigen::Index(g), k));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable trajectory_table(const Trajectory& tr) {
  CsvTable t;
  t.header.push_back("time_ns");
  std::size_t d = tr.observables.empty() ? 0 : tr.observables.front().probabilities.size();
  for (std::size_t i = 0; i < d; ++i) t.header.push_back("P_" + std::to_string(i));
  for (const char* c : {"cos_x", "sin_x", "norm", "energy"}) t.header.push_back(c);
  if (!tr.ground_fidelity.empty()) t.header.push_back("ground_fidelity");
  for (std::size_t k = 0; k < tr.observables.size(); ++k) {
    const auto& o = tr.observables[k];
    std::vector<double> row{tr.times_ns[k]};
    row.insert(row.end(), o.probabilities.begin(), o.probabilities.end());
    row.insert(row.end(), {o.cos_x, o.sin_x, o.norm, o.energy});
    if (!tr.ground_fidelity.empty()) row.push_back(tr.ground_fidelity[k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace ringtheta
