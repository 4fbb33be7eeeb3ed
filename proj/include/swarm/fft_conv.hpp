#ifndef SWARM_FFT_CONV_HPP
#define SWARM_FFT_CONV_HPP

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "swarm/domain.hpp"
#include "swarm/kernels.hpp"

namespace swarm {

/// Uniform cell-centered grid on the periodic torus, row-major storage
/// (index = i * ny + j in 2D). Cell centers sit at (a + 1/2) h.
struct SpectralGrid {
  Domain domain;
  std::array<int, 2> dims{1, 1};
  std::array<double, 2> h{0.0, 0.0};

  static SpectralGrid make(const Domain& domain, int nx, int ny = 1);

  int dim() const { return domain.dim; }
  size_t cells() const { return static_cast<size_t>(dims[0]) * (dim() > 1 ? dims[1] : 1); }
  double cell_volume() const { return dim() > 1 ? h[0] * h[1] : h[0]; }

  double center(int axis, int index) const { return (index + 0.5) * h[static_cast<size_t>(axis)]; }

  /// Minimum-image separation between cell centers offset by (di, dj).
  double offset_distance(int di, int dj = 0) const;
};

/// Circular convolution with a radial kernel stencil on a SpectralGrid:
///   (phi * f)_a = sum_b phi(|x_a - x_b|) f_b h^d.
/// The FFT path and the direct-summation path share one stencil, so they
/// agree to roundoff; the direct path is the correctness oracle.
///
/// A plan owns FFTW buffers: single-owner during apply(), distinct plans
/// may run concurrently.
class Convolution {
 public:
  Convolution(const Kernel& kernel, const SpectralGrid& grid);
  ~Convolution();
  Convolution(const Convolution&) = delete;
  Convolution& operator=(const Convolution&) = delete;
  Convolution(Convolution&&) noexcept;
  Convolution& operator=(Convolution&&) noexcept;

  const SpectralGrid& grid() const { return grid_; }

  /// FFT path.
  void apply(std::span<const double> f, std::span<double> out);

  /// O(cells^2) reference path with compensated accumulation.
  void apply_direct(std::span<const double> f, std::span<double> out) const;

  /// Stencil weights g_c = phi(|delta_c|) h^d in grid order.
  std::span<const double> stencil() const { return stencil_; }

  /// Discrete kernel mass sum_c g_c (= the circulant symbol at k = 0).
  double stencil_mass() const { return mass_; }

  /// Real circulant symbol ghat(k) = sum_c g_c cos(2 pi k.c / n), in r2c
  /// half-spectrum layout, row-major (dims[0] x (dims[1]/2 + 1) in 2D,
  /// dims[0]/2 + 1 in 1D).
  std::span<const double> symbol() const { return symbol_; }

  /// Symbol value at an integer mode (k1[, k2]), using conjugate symmetry.
  double symbol_at(int k1, int k2 = 0) const;

 private:
  struct Impl;
  SpectralGrid grid_;
  std::vector<double> stencil_;
  std::vector<double> symbol_;
  double mass_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace swarm

#endif
