#ifndef SWARM_PARTICLES_HPP
#define SWARM_PARTICLES_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "swarm/domain.hpp"
#include "swarm/kernels.hpp"

namespace swarm {

/// N agents with (position, velocity) pairs, row-major N x d storage.
struct Ensemble {
  Domain domain;
  int n = 0;
  std::vector<double> pos;  // n * dim
  std::vector<double> vel;  // n * dim

  int dim() const { return domain.dim; }
  std::span<const double> position(int i) const { return {pos.data() + static_cast<size_t>(i) * dim(), static_cast<size_t>(dim())}; }
  std::span<const double> velocity(int i) const { return {vel.data() + static_cast<size_t>(i) * dim(), static_cast<size_t>(dim())}; }

  /// Reduce all positions to the fundamental cell (no-op in free space).
  void wrap_positions();
};

enum class Integrator { RK4, Euler };
enum class PairPath { Direct, CellList };

struct SimConfig {
  double tau = 1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  Integrator integrator = Integrator::RK4;
  int record_every = 1;          // steps between trace samples
  PairPath pair_path = PairPath::Direct;
  double velocity_cap = 1e8;     // blow-up sentinel on |v_i| components
};

/// Velocity alignment right side: a_i = (tau/N) sum_j phi_ij (v_j - v_i).
/// Pair terms are assembled antisymmetrically in fixed (i < j) order with
/// compensated accumulation, so the total momentum derivative vanishes to
/// roundoff and runs are bit-reproducible.
void cs_rhs(const Ensemble& ensemble, const Kernel& kernel, double tau,
            std::span<double> accel, PairPath path = PairPath::Direct);

/// Alignment plus attraction/repulsion from a radial potential:
///   a_i = (tau/N) sum_j Phi_ij (v_j - v_i) - (1/N) sum_j grad U(|x_i - x_j|).
void three_zone_rhs(const Ensemble& ensemble, const MatrixKernel& mkernel, double tau,
                    std::span<double> accel);

/// Velocity fluctuation  (1/N^2) sum_ij |v_i - v_j|^2, evaluated through the
/// one-pass identity (2/N) sum_i |v_i - vbar|^2.
double energy_fluctuation(const Ensemble& ensemble);

struct Diameters {
  double position = 0.0;  // max pairwise distance in the domain metric
  double velocity = 0.0;  // max pairwise velocity distance
};
Diameters flock_diameter(const Ensemble& ensemble);

/// Per-sample trace of the fluctuation/diameter diagnostics.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> delta_e;
  std::vector<double> diameter;
  std::vector<double> velocity_diameter;
  std::vector<double> lambda2;  // empty unless recorded

  size_t size() const { return times.size(); }
};

struct BlowUp {
  double time = 0.0;
  std::string what;
};

struct SimResult {
  Ensemble final_state;
  EnergyTrace trace;
  std::optional<BlowUp> blow_up;  // set when the sentinel aborted the run
};

/// Advance the alignment dynamics with a fixed-step integrator, recording the
/// trace every record_every steps (plus the initial and final states).
/// The force callback lets the 3-zone system reuse the same loop.
SimResult simulate(Ensemble ensemble, const Kernel& kernel, const SimConfig& config);
SimResult simulate(Ensemble ensemble, const MatrixKernel& mkernel, const SimConfig& config);

/// As simulate(), additionally sampling lambda2_probe (e.g. the Fiedler value
/// of the communication graph) into trace.lambda2 at every record point.
SimResult simulate_with_probe(Ensemble ensemble, const Kernel& kernel, const SimConfig& config,
                              const std::function<double(const Ensemble&)>& lambda2_probe);

/// Seeded initial data helpers (the CLI's named initial-data library).
Ensemble random_uniform_ensemble(const Domain& domain, int n, double pos_half_width,
                                 double vel_half_width, std::uint64_t seed);
Ensemble two_cluster_ensemble(const Domain& domain, int n, double separation,
                              double closing_speed, std::uint64_t seed);

}  // namespace swarm

#endif
