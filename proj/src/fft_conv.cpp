#include "swarm/fft_conv.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "swarm/numeric.hpp"

namespace swarm {

namespace {
// FFTW planning is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralGrid SpectralGrid::make(const Domain& domain, int nx, int ny) {
  if (!domain.is_torus()) throw std::invalid_argument("SpectralGrid: torus domains only");
  if (domain.dim > 2) throw std::invalid_argument("SpectralGrid: 1D and 2D grids only");
  if (nx < 2 || (domain.dim > 1 && ny < 2))
    throw std::invalid_argument("SpectralGrid: need at least 2 cells per axis");
  SpectralGrid g;
  g.domain = domain;
  g.dims = {nx, domain.dim > 1 ? ny : 1};
  g.h = {domain.period / nx, domain.dim > 1 ? domain.period / ny : 0.0};
  return g;
}

double SpectralGrid::offset_distance(int di, int dj) const {
  const double dx = domain.wrap_delta(di * h[0]);
  if (dim() == 1) return std::abs(dx);
  const double dy = domain.wrap_delta(dj * h[1]);
  return std::hypot(dx, dy);
}

struct Convolution::Impl {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  double* real_buf = nullptr;
  fftw_complex* cplx_buf = nullptr;
  size_t n_real = 0;
  size_t n_cplx = 0;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (real_buf) fftw_free(real_buf);
    if (cplx_buf) fftw_free(cplx_buf);
  }
};

Convolution::Convolution(const Kernel& kernel, const SpectralGrid& grid)
    : grid_(grid), impl_(std::make_unique<Impl>()) {
  if (kernel.depends_on_crowd())
    throw std::invalid_argument("Convolution: crowd-dependent weights have no grid stencil");

  const int nx = grid_.dims[0];
  const int ny = grid_.dims[1];
  const size_t cells = grid_.cells();
  const double vol = grid_.cell_volume();

  stencil_.resize(cells);
  if (grid_.dim() == 1) {
    for (int c = 0; c < nx; ++c) stencil_[static_cast<size_t>(c)] = kernel(grid_.offset_distance(c)) * vol;
  } else {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        stencil_[static_cast<size_t>(i) * ny + j] = kernel(grid_.offset_distance(i, j)) * vol;
  }
  mass_ = kahan_total(stencil_);

  impl_->n_real = cells;
  impl_->n_cplx = static_cast<size_t>(nx) * (grid_.dim() > 1 ? ny / 2 + 1 : 1);
  if (grid_.dim() == 1) impl_->n_cplx = static_cast<size_t>(nx / 2 + 1);

  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->real_buf = fftw_alloc_real(impl_->n_real);
    impl_->cplx_buf = fftw_alloc_complex(impl_->n_cplx);
    if (grid_.dim() == 1) {
      impl_->forward = fftw_plan_dft_r2c_1d(nx, impl_->real_buf, impl_->cplx_buf, FFTW_ESTIMATE);
      impl_->backward = fftw_plan_dft_c2r_1d(nx, impl_->cplx_buf, impl_->real_buf, FFTW_ESTIMATE);
    } else {
      impl_->forward = fftw_plan_dft_r2c_2d(nx, ny, impl_->real_buf, impl_->cplx_buf, FFTW_ESTIMATE);
      impl_->backward = fftw_plan_dft_c2r_2d(nx, ny, impl_->cplx_buf, impl_->real_buf, FFTW_ESTIMATE);
    }
  }
  if (!impl_->forward || !impl_->backward) throw std::runtime_error("Convolution: FFTW planning failed");

  // circulant symbol: the stencil is even, so its transform is real
  std::memcpy(impl_->real_buf, stencil_.data(), cells * sizeof(double));
  fftw_execute(impl_->forward);
  symbol_.resize(impl_->n_cplx);
  for (size_t k = 0; k < impl_->n_cplx; ++k) symbol_[k] = impl_->cplx_buf[k][0];
}

Convolution::~Convolution() = default;
Convolution::Convolution(Convolution&&) noexcept = default;
Convolution& Convolution::operator=(Convolution&&) noexcept = default;

double Convolution::symbol_at(int k1, int k2) const {
  const int nx = grid_.dims[0];
  const int ny = grid_.dims[1];
  auto fold = [](int k, int n) {
    int m = k % n;
    if (m < 0) m += n;
    return m;
  };
  if (grid_.dim() == 1) {
    int m = fold(k1, nx);
    if (m > nx / 2) m = nx - m;  // conjugate symmetry, symbol is real and even
    return symbol_[static_cast<size_t>(m)];
  }
  int m1 = fold(k1, nx);
  int m2 = fold(k2, ny);
  if (m2 > ny / 2) {
    m1 = fold(-m1, nx);
    m2 = ny - m2;
  }
  return symbol_[static_cast<size_t>(m1) * (ny / 2 + 1) + m2];
}

void Convolution::apply(std::span<const double> f, std::span<double> out) {
  const size_t cells = grid_.cells();
  if (f.size() != cells || out.size() != cells)
    throw std::invalid_argument("Convolution::apply: field size mismatch");
  std::memcpy(impl_->real_buf, f.data(), cells * sizeof(double));
  fftw_execute(impl_->forward);
  const double scale = 1.0 / static_cast<double>(cells);
  for (size_t k = 0; k < impl_->n_cplx; ++k) {
    impl_->cplx_buf[k][0] *= symbol_[k] * scale;
    impl_->cplx_buf[k][1] *= symbol_[k] * scale;
  }
  fftw_execute(impl_->backward);
  std::memcpy(out.data(), impl_->real_buf, cells * sizeof(double));
}

void Convolution::apply_direct(std::span<const double> f, std::span<double> out) const {
  const size_t cells = grid_.cells();
  if (f.size() != cells || out.size() != cells)
    throw std::invalid_argument("Convolution::apply_direct: field size mismatch");
  const int nx = grid_.dims[0];
  const int ny = grid_.dims[1];
  if (grid_.dim() == 1) {
    for (int a = 0; a < nx; ++a) {
      KahanSum acc;
      for (int c = 0; c < nx; ++c) {
        int b = a - c;
        if (b < 0) b += nx;
        acc.add(stencil_[static_cast<size_t>(c)] * f[static_cast<size_t>(b)]);
      }
      out[static_cast<size_t>(a)] = acc.value();
    }
    return;
  }
  for (int ai = 0; ai < nx; ++ai) {
    for (int aj = 0; aj < ny; ++aj) {
      KahanSum acc;
      for (int ci = 0; ci < nx; ++ci) {
        int bi = ai - ci;
        if (bi < 0) bi += nx;
        for (int cj = 0; cj < ny; ++cj) {
          int bj = aj - cj;
          if (bj < 0) bj += ny;
          acc.add(stencil_[static_cast<size_t>(ci) * ny + cj] *
                  f[static_cast<size_t>(bi) * ny + bj]);
        }
      }
      out[static_cast<size_t>(ai) * ny + aj] = acc.value();
    }
  }
}

}  // namespace swarm
