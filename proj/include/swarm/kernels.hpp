#ifndef SWARM_KERNELS_HPP
#define SWARM_KERNELS_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarm/domain.hpp"

namespace swarm {

/// Symmetric communication kernel phi(x, x') = amplitude * profile(|x - x'|).
///
/// Families:
///   FatTail(theta)          profile(r) = (1 + r^2)^(-theta/2)
///   Indicator(R0)           profile(r) = 1 for r <= R0, else 0
///   IncreasingCompact(R0)   profile(r) = r/R0 for r <= R0, else 0
///   Topological(R0,b,g)     profile depends on the crowd fraction mu, see
///                           crowd_fraction(); evaluated only through the
///                           ensemble-aware overloads
///   Constant                profile(r) = 1
///   Tabulated               piecewise-linear radial profile, zero past the
///                           last table point
///
/// normalize_kernel() rescales the amplitude so the kernel has unit mass on
/// the domain; the mass used is recorded in normalization_mass.
struct Kernel {
  enum class Family { FatTail, Indicator, IncreasingCompact, Topological, Constant, Tabulated };

  Family family = Family::Constant;
  double amplitude = 1.0;
  double theta = 0.0;   // FatTail tail exponent
  double radius = 0.0;  // support radius R0 (Indicator/IncreasingCompact/Topological)
  double beta = 0.0;    // Topological metric exponent
  double gamma = 0.0;   // Topological crowd exponent
  std::vector<double> table_r;    // Tabulated abscissae, strictly increasing from 0
  std::vector<double> table_phi;  // Tabulated non-negative values

  bool normalized = false;
  double normalization_mass = 1.0;  // mass divided out by normalize_kernel

  static Kernel fat_tail(double theta, double amplitude = 1.0);
  static Kernel indicator(double R0, double amplitude = 1.0);
  static Kernel increasing_compact(double R0, double amplitude = 1.0);
  static Kernel topological(double R0, double beta, double gamma, double amplitude = 1.0);
  static Kernel constant(double amplitude = 1.0);
  static Kernel tabulated(std::vector<double> r, std::vector<double> phi,
                          double amplitude = 1.0);

  /// Radial profile value amplitude * profile(r), r >= 0.
  /// Throws for the Topological family (needs an ensemble; see below).
  double operator()(double r) const;

  /// Support radius of the profile, or nullopt for global support.
  std::optional<double> support_radius() const;

  /// Total variation of x -> phi(|x|) along one axis of the domain cell
  /// (used for Fourier-tail certification of 1D coefficients).
  double radial_total_variation(const Domain& domain) const;

  bool depends_on_crowd() const { return family == Family::Topological; }
};

/// phi(x, x') for metric kernels. Symmetric by construction.
double kernel_value(const Kernel& kernel, const Domain& domain,
                    std::span<const double> x, std::span<const double> xp);

/// Fraction of the ensemble inside the communication region C(x, x')
/// enclosed between x and x': the closed interval / shorter arc in 1D, the
/// closed ball of diameter |x - x'| centered at the midpoint for d >= 2.
/// Endpoint membership is inclusive, so mu(x, x) >= 1/N whenever an agent
/// sits at x. Throws on an empty ensemble.
double crowd_fraction(std::span<const double> positions, int n_agents,
                      std::span<const double> x, std::span<const double> xp,
                      const Domain& domain);

/// phi(x, x') for topological kernels:
///   1_{R0}(r) * r^{-(beta-gamma)} * mu(x,x')^{-gamma}.
/// beta == gamma gives the bounded crowd-only weight; beta > gamma is
/// singular at r = 0 and such pairs are rejected.
double kernel_value_topological(const Kernel& kernel, const Domain& domain,
                                std::span<const double> positions, int n_agents,
                                std::span<const double> x, std::span<const double> xp);

/// Reference grid resolution (points per axis) for normalization masses
/// that need tensor-grid quadrature (global-support profiles in 2D/3D).
inline constexpr int kNormalizationGrid2D = 1 << 9;
inline constexpr int kNormalizationGrid3D = 1 << 6;

/// Kernel mass  integral of phi(|x - x'|) dx'  over the domain: analytic for
/// Indicator/IncreasingCompact/Constant (support inside the cell), uniform
/// grid quadrature otherwise. Throws for non-integrable free-space profiles
/// and for crowd-dependent kernels.
double kernel_mass(const Kernel& kernel, const Domain& domain);

/// Returns a copy of the kernel rescaled to unit mass on the domain.
/// Throws on zero-mass or non-integrable profiles.
Kernel normalize_kernel(const Kernel& kernel, const Domain& domain);

/// Radial interaction potential U(r) with two derivatives, for the
/// anticipation (matrix-kernel) dynamics. Quadratic: U = k r^2 / 2,
/// Quartic: U = k r^4 / 4.
struct Potential {
  enum class Family { Quadratic, Quartic };
  Family family = Family::Quadratic;
  double strength = 1.0;

  static Potential quadratic(double k = 1.0) { return {Family::Quadratic, k}; }
  static Potential quartic(double k = 1.0) { return {Family::Quartic, k}; }

  double value(double r) const;
  double d1(double r) const;  // U'(r)
  double d2(double r) const;  // U''(r)
};

/// Matrix communication kernel induced by a radial potential: the pair
/// matrix is the Hessian of U(|x|) evaluated at the realized separation,
///   Phi = U''(r) rhat rhat^T + (U'(r)/r) (I - rhat rhat^T),
/// with the smooth r -> 0 limit U''(0) I. The scalar case Phi = phi I
/// recovers the metric-kernel dynamics.
struct MatrixKernel {
  Potential potential;

  /// Hessian matrix at separation dx = x' - x (length d <= 3), written
  /// row-major into out (d*d entries).
  void eval(std::span<const double> dx, std::span<double> out) const;

  /// Gradient of U(|x|) at separation dx, written into out (d entries).
  void gradient(std::span<const double> dx, std::span<double> out) const;
};

}  // namespace swarm

#endif
