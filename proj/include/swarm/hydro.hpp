#ifndef SWARM_HYDRO_HPP
#define SWARM_HYDRO_HPP

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarm/certificates.hpp"
#include "swarm/fft_conv.hpp"
#include "swarm/kernels.hpp"

namespace swarm {

/// Grid-sampled density and velocity on the periodic torus (1D or 2D),
/// cell-centered, row-major.
struct FieldState {
  SpectralGrid grid;
  std::vector<double> rho;
  std::array<std::vector<double>, 2> u;  // dim() components of size cells()
  double time = 0.0;

  int dim() const { return grid.dim(); }
  size_t cells() const { return grid.cells(); }

  double total_mass() const;
  std::array<double, 2> total_momentum() const;
};

/// Named analytic initial data (the experiment configuration library).
FieldState uniform_field(const SpectralGrid& grid, double rho0,
                         std::array<double, 2> u0 = {0.0, 0.0});
/// rho = c (1 + eps cos(k x)), u = a sin(k x); 1D grids.
FieldState cosine_field_1d(const SpectralGrid& grid, double rho_base, double rho_eps,
                           double u_amp, int mode = 1);
/// rho = c (1 + eps cos(k x) cos(k y)), u = (a sin(k y), a sin(k x)); 2D grids.
FieldState swirl_field_2d(const SpectralGrid& grid, double rho_base, double rho_eps,
                          double u_amp, int mode = 1);
/// rho = base + amp exp(-dist(x, center)^2 / (2 width^2)), u = u0.
FieldState gaussian_bump_field(const SpectralGrid& grid, double rho_base, double amp,
                               double width, std::array<double, 2> center,
                               std::array<double, 2> u0 = {0.0, 0.0});

struct HydroConfig {
  double tau = 1.0;
  double cfl = 0.45;  // Courant number in (0, 1)
  double t_end = 1.0;
  int record_every = 1;               // steps between trace samples
  double blowup_gradient_cap = 0.0;   // 0 = auto: 1e3 * initial max |du|
  double dt_max = std::numeric_limits<double>::infinity();
  bool record_snapshots = false;      // keep full fields at record points
  double vacuum_fraction = 1e-14;     // u := 0 below this * mean density
};

struct HydroTrace {
  int dim = 1;
  std::vector<double> times;
  std::vector<double> delta_e;
  std::vector<double> rho_min;
  std::vector<double> rho_max;
  std::vector<double> eta_min;     // min_x lambda_min(grad_S u) + tau (phi*rho)
  std::vector<double> mass;
  std::vector<double> momentum_x;
  std::vector<double> momentum_y;  // zeros in 1D
  std::vector<double> max_grad;      // max |velocity partial|
  std::vector<double> div_min;       // min divergence
  std::vector<double> conv_rho_min;  // min_x (phi * rho)
  std::vector<double> conv_rho_max;  // max_x (phi * rho)
  std::vector<double> lambda2;       // empty unless a probe is supplied

  size_t size() const { return times.size(); }
};

struct BlowUpEvent {
  double time = 0.0;
  size_t cell = 0;
  double value = 0.0;
  std::string what;
};

struct HydroResult {
  FieldState final_state;
  HydroTrace trace;
  std::optional<BlowUpEvent> blow_up;
  std::vector<FieldState> snapshots;
};

/// (phi * rho) on the state's grid.
std::vector<double> convolve_density(Convolution& conv, const FieldState& state);

/// Mono-kinetic alignment source on the momentum:
///   F = tau [ rho (phi*(rho u)) - rho u (phi*rho) ]  per component.
/// Integrates to zero over the torus by kernel symmetry.
std::array<std::vector<double>, 2> alignment_force(const FieldState& state, Convolution& conv,
                                                   double tau);

/// Velocity fluctuation  (1/2) int |u - ubar|^2 rho dx  with
/// ubar = int(rho u)/m0, via the one-pass moment identity. Throws on vacuum.
double field_energy_fluctuation(const FieldState& state);

struct EtaSample {
  double eta_min = 0.0;
  size_t argmin = 0;
  double div_min = 0.0;
  double max_grad = 0.0;
  double conv_rho_min = 0.0;
  double conv_rho_max = 0.0;
};

/// Critical-threshold functional eta = lambda_min(grad_S u) + tau (phi*rho),
/// minimized over cells; velocity gradients by central differences, the
/// symmetric-gradient eigenvalue in closed form (2D).
EtaSample threshold_eta(const FieldState& state, Convolution& conv, double tau);

/// First-order finite-volume solver for the pressureless alignment system:
/// local Lax-Friedrichs fluxes on (rho, rho u), alignment source evaluated
/// in each Heun (RK2) stage, adaptive CFL time step. Mass telescopes
/// exactly; density stays non-negative under the CFL condition.
/// The optional probe is sampled into trace.lambda2 at record points.
HydroResult simulate_hydro(FieldState state, const Kernel& kernel, const HydroConfig& config,
                           const std::function<double(const FieldState&)>* probe = nullptr);

struct ThresholdReport {
  std::vector<double> times;
  std::vector<double> eta_min_series;
  double eta_c = 0.0;
  double eta_c_conv = 0.0;  // the phi*rho0 variant of the same threshold
  bool persists = false;
  double worst_eta = 0.0;
  std::optional<double> blowup_time;
};

/// Check min_x eta(t) >= eta_c - tolerance along a recorded run.
ThresholdReport threshold_report(const HydroTrace& trace, double eta_c, double eta_c_conv,
                                 double tolerance, const std::optional<BlowUpEvent>& blow_up);

struct LagrangianReport {
  std::vector<double> times;
  std::vector<double> min_G;       // min_x (u_x + tau phi*rho)
  std::vector<double> integral_G;  // int G dx, conserved in time
  double integral_drift = 0.0;     // max |int G(t) - int G(0)|
  double worst_min_G = 0.0;
};

/// 1D invariant diagnostics: G = u_x + tau phi*rho obeys the same continuity
/// equation as rho, so int G is conserved and min G >= 0 persists when
/// initially true. Needs recorded snapshots.
LagrangianReport lagrangian_invariant_1d(std::span<const FieldState> snapshots,
                                         const Kernel& kernel, double tau);

/// Continuum flocking certificate for short-range kernels:
///   deltaE(t) <= exp(-tau sigma int c_rho(s) rho_-(s) ds) deltaE(0) (1+eps),
/// with c_rho = rho_-/rho_+ from the trace. Also evaluates the
/// density-variation gate rho_+ - rho_- <= (1 - c) mbar_0 for the given c.
struct FlockingCertificate {
  CertificateResult decay;
  bool density_gate_ok = false;
  double worst_variation = 0.0;  // max over samples of (rho_+ - rho_-)/mbar0
  double gate_c = 0.0;
};
FlockingCertificate flocking_certificate(const HydroTrace& trace, double sigma, double tau,
                                         double mean_density, double gate_c = 0.5,
                                         double eps_cert = 1e-6);

/// Spectral-gap flocking certificate along a run with recorded lambda2:
///   deltaE(t) <= exp(-2 tau int min(lambda2(s), rho_-(s)) ds) deltaE(0) (1+eps).
CertificateResult spectral_flocking_certificate(const HydroTrace& trace, double tau,
                                                double eps_cert = 1e-6);

}  // namespace swarm

#endif
