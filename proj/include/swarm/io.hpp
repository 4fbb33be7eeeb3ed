#ifndef SWARM_IO_HPP
#define SWARM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "swarm/hydro.hpp"
#include "swarm/particles.hpp"

namespace swarm {

/// Shortest-exact decimal for regression diffing: 17 significant digits.
std::string format17(double x);

/// One CSV table: header row plus columns of doubles, all format17.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  void write(const std::filesystem::path& path) const;
  static CsvTable read(const std::filesystem::path& path);
};

/// Trace CSV layouts (header contracts of the experiment bundles).
CsvTable to_csv(const EnergyTrace& trace);     // t,deltaE,D,V[,lambda2]
CsvTable to_csv(const HydroTrace& trace);      // t,deltaE,rho_min,rho_max,eta_min,
                                               // mass,momentum_x[,momentum_y],
                                               // max_grad,div_min[,lambda2]

/// Field snapshot CSV: cell-center coordinates, rho, velocity components.
CsvTable to_csv(const FieldState& state);

/// Ensemble CSV: columns x_1..x_d,v_1..v_d.
CsvTable to_csv(const Ensemble& ensemble);
Ensemble ensemble_from_csv(const std::filesystem::path& path, const Domain& domain);

/// FNV-1a 64-bit content hash, hex-encoded; covers bundle files in manifests.
std::string fnv1a_hex(const std::filesystem::path& path);

}  // namespace swarm

#endif
