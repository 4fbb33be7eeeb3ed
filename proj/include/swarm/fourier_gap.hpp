#ifndef SWARM_FOURIER_GAP_HPP
#define SWARM_FOURIER_GAP_HPP

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "swarm/domain.hpp"
#include "swarm/fft_conv.hpp"
#include "swarm/kernels.hpp"

namespace swarm {

/// Bessel functions of the first kind, |error| <= ~1e-12: power series for
/// x < 8, trapezoid quadrature of the integral representation above.
double bessel_j0(double x);
double bessel_j1(double x);

/// Cosine Fourier coefficient of a radial kernel on the torus:
///   c(k) = integral over T^d of phi(|x|) cos((2 pi / L) k . x) dx.
/// Indicator kernels use the closed radial form (sin in 1D, J1 in 2D);
/// compactly supported profiles reduce to a radial quadrature; global
/// profiles fall back to grid quadrature (1D stays a radial reduction over
/// [0, L/2], which is exact for the minimum-image integrand).
/// Real and even in k by kernel symmetry. Throws on free-space domains.
double fourier_coefficient(const Kernel& kernel, const Domain& domain,
                           std::array<int, 2> k);

/// Same coefficient evaluated as the discrete cosine sum of the kernel
/// sampled on an n-per-axis grid (the circulant symbol of Convolution).
/// Independent of the FFT machinery; used for grid-consistency checks.
double grid_coefficient(const Kernel& kernel, const Domain& domain,
                        std::array<int, 2> k, int n_per_axis);

struct FourierGapResult {
  double sigma = 0.0;                 // 1 - max_{k != 0} c(k)
  std::array<int, 2> argmax_mode{0, 0};
  double max_coefficient = 0.0;
  double mass_coefficient = 0.0;      // c(0), unit for normalized kernels
  int k_max = 0;
  double tail_bound = 0.0;            // certified |c(k)| bound past k_max
  std::vector<std::pair<std::array<int, 2>, double>> coefficients;  // |k|_inf <= 8
};

inline constexpr int kSigmaDefaultKmax1D = 64;
inline constexpr int kSigmaDefaultKmax2D = 16;

/// Spectral-gap constant of a normalized radial kernel on the torus.
/// Maximizes c(k) over 0 < |k|_inf <= k_max (half lattice by evenness) and
/// certifies that modes beyond k_max cannot exceed the in-range maximum via
/// a total-variation bound (1D) or the radial J0-envelope bound (2D).
/// Throws when the tail certificate is inconclusive at the given k_max.
FourierGapResult sigma_phi(const Kernel& kernel, const Domain& domain, int k_max = 0);

struct PoincareResult {
  double lhs = 0.0;         // kernel-weighted fluctuation integral
  double rhs = 0.0;         // (sigma / L^d) * plain fluctuation integral
  double margin = 0.0;      // lhs - rhs, >= -roundoff by construction
  double sigma_grid = 0.0;  // discrete gap ghat(0) - max_{k!=0} ghat(k)
};

/// Evaluate both sides of the kernel Poincare inequality for a grid-sampled
/// scalar field w. The constant is the spectral gap of the discretized
/// kernel on w's own grid, which makes the discrete inequality exact.
PoincareResult poincare_check(const Kernel& kernel, const SpectralGrid& grid,
                              std::span<const double> w);

}  // namespace swarm

#endif
