#include "swarm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swarm {

std::string format17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("CsvTable: cannot open " + path.string());
  for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << "\n";
  const size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns)
    if (col.size() != rows) throw std::runtime_error("CsvTable: ragged columns");
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << format17(columns[c][r]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("CsvTable: write failed for " + path.string());
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("CsvTable: cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("CsvTable: empty file " + path.string());
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  table.columns.resize(table.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= table.columns.size())
        throw std::runtime_error("CsvTable: extra column in " + path.string());
      table.columns[c++].push_back(std::stod(cell));
    }
    if (c != table.columns.size())
      throw std::runtime_error("CsvTable: short row in " + path.string());
  }
  return table;
}

CsvTable to_csv(const EnergyTrace& trace) {
  CsvTable t;
  t.header = {"t", "deltaE", "D", "V"};
  t.columns = {trace.times, trace.delta_e, trace.diameter, trace.velocity_diameter};
  if (!trace.lambda2.empty()) {
    t.header.push_back("lambda2");
    t.columns.push_back(trace.lambda2);
  }
  return t;
}

CsvTable to_csv(const HydroTrace& trace) {
  CsvTable t;
  t.header = {"t", "deltaE", "rho_min", "rho_max", "eta_min", "mass", "momentum_x"};
  t.columns = {trace.times,   trace.delta_e, trace.rho_min, trace.rho_max,
               trace.eta_min, trace.mass,    trace.momentum_x};
  if (trace.dim > 1) {
    t.header.push_back("momentum_y");
    t.columns.push_back(trace.momentum_y);
  }
  t.header.push_back("max_grad");
  t.columns.push_back(trace.max_grad);
  t.header.push_back("div_min");
  t.columns.push_back(trace.div_min);
  t.header.push_back("avg_rho_min");
  t.columns.push_back(trace.conv_rho_min);
  t.header.push_back("avg_rho_max");
  t.columns.push_back(trace.conv_rho_max);
  if (!trace.lambda2.empty()) {
    t.header.push_back("lambda2");
    t.columns.push_back(trace.lambda2);
  }
  return t;
}

CsvTable to_csv(const FieldState& state) {
  CsvTable t;
  const int nx = state.grid.dims[0];
  const int ny = state.dim() > 1 ? state.grid.dims[1] : 1;
  if (state.dim() == 1) {
    t.header = {"x", "rho", "u"};
    t.columns.resize(3);
  } else {
    t.header = {"x", "y", "rho", "u_x", "u_y"};
    t.columns.resize(5);
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const size_t a = static_cast<size_t>(i) * ny + j;
      size_t c = 0;
      t.columns[c++].push_back(state.grid.center(0, i));
      if (state.dim() > 1) t.columns[c++].push_back(state.grid.center(1, j));
      t.columns[c++].push_back(state.rho[a]);
      t.columns[c++].push_back(state.u[0][a]);
      if (state.dim() > 1) t.columns[c++].push_back(state.u[1][a]);
    }
  }
  return t;
}

CsvTable to_csv(const Ensemble& ensemble) {
  CsvTable t;
  const int d = ensemble.dim();
  for (int c = 0; c < d; ++c) t.header.push_back("x_" + std::to_string(c + 1));
  for (int c = 0; c < d; ++c) t.header.push_back("v_" + std::to_string(c + 1));
  t.columns.resize(static_cast<size_t>(2 * d));
  for (int i = 0; i < ensemble.n; ++i) {
    for (int c = 0; c < d; ++c) {
      t.columns[static_cast<size_t>(c)].push_back(ensemble.pos[static_cast<size_t>(i) * d + c]);
      t.columns[static_cast<size_t>(d + c)].push_back(ensemble.vel[static_cast<size_t>(i) * d + c]);
    }
  }
  return t;
}

Ensemble ensemble_from_csv(const std::filesystem::path& path, const Domain& domain) {
  const auto table = CsvTable::read(path);
  const int d = domain.dim;
  if (table.header.size() != static_cast<size_t>(2 * d))
    throw std::runtime_error("ensemble_from_csv: expected " + std::to_string(2 * d) +
                             " columns for a " + std::to_string(d) + "D domain");
  Ensemble e;
  e.domain = domain;
  e.n = static_cast<int>(table.columns.front().size());
  e.pos.resize(static_cast<size_t>(e.n) * d);
  e.vel.resize(static_cast<size_t>(e.n) * d);
  for (int i = 0; i < e.n; ++i) {
    for (int c = 0; c < d; ++c) {
      e.pos[static_cast<size_t>(i) * d + c] = table.columns[static_cast<size_t>(c)][static_cast<size_t>(i)];
      e.vel[static_cast<size_t>(i) * d + c] =
          table.columns[static_cast<size_t>(d + c)][static_cast<size_t>(i)];
    }
  }
  return e;
}

std::string fnv1a_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("fnv1a_hex: cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

}  // namespace swarm
