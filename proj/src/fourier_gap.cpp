#include "swarm/fourier_gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "swarm/numeric.hpp"

namespace swarm {

namespace {

constexpr double kPi = std::numbers::pi;

double bessel_series(double x, int order) {
  // J_nu(x) = (x/2)^nu sum_m (-1)^m (x^2/4)^m / (m! (m+nu)!)
  const double q = 0.25 * x * x;
  double term = order == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int m = 1; m < 64; ++m) {
    term *= -q / (static_cast<double>(m) * (m + order));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

double bessel_integral(double x, int order) {
  // J_n(x) = (1/pi) int_0^pi cos(n theta - x sin theta) dtheta; the
  // integrand extends to a smooth periodic function, so the trapezoid
  // rule converges spectrally
  const int n = std::max(512, 8 * static_cast<int>(std::ceil(x)));
  const double h = kPi / n;
  KahanSum acc;
  acc.add(0.5 * std::cos(0.0));  // theta = 0: cos(0 - 0)
  acc.add(0.5 * std::cos(order * kPi - x * std::sin(kPi)));
  for (int i = 1; i < n; ++i) {
    const double theta = i * h;
    acc.add(std::cos(order * theta - x * std::sin(theta)));
  }
  return acc.value() * h / kPi;
}

double bessel(double x, int order) {
  if (x < 0.0) throw std::invalid_argument("bessel: negative argument");
  return x < 8.0 ? bessel_series(x, order) : bessel_integral(x, order);
}

/// Composite-Simpson quadrature of f over [a, b].
template <typename F>
double simpson(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  KahanSum acc;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    acc.add(h / 6.0 * (f(lo) + 4.0 * f(lo + 0.5 * h) + f(lo + h)));
  }
  return acc.value();
}

/// 1D coefficient as an exact radial reduction over [0, L/2]: the
/// minimum-image integrand is even, so c = 2 int_0^{L/2} phi(r) cos(kappa r) dr.
/// Panels split at profile kinks (support edges, table breakpoints).
double coefficient_radial_1d(const Kernel& kernel, const Domain& domain, double kappa) {
  const double half = 0.5 * domain.period;
  std::vector<double> breaks{0.0};
  if (const auto s = kernel.support_radius(); s && *s < half) breaks.push_back(*s);
  if (kernel.family == Kernel::Family::Tabulated)
    for (double r : kernel.table_r)
      if (r > 0.0 && r < half) breaks.push_back(r);
  breaks.push_back(half);
  std::sort(breaks.begin(), breaks.end());

  KahanSum acc;
  for (size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    if (b <= a) continue;
    // resolve the oscillation: >= 32 panels per cosine period
    const int panels = std::max(1 << 10, static_cast<int>(32.0 * kappa * (b - a) / (2.0 * kPi)));
    acc.add(simpson([&](double r) { return kernel(r) * std::cos(kappa * r); }, a, b, panels));
  }
  return 2.0 * acc.value();
}

/// 2D coefficient for compactly supported radial profiles (support inside
/// the half cell): c = 2 pi int_0^R phi(r) J0(|kappa| r) r dr.
double coefficient_radial_2d(const Kernel& kernel, double support, double kappa_mag) {
  std::vector<double> breaks{0.0};
  if (kernel.family == Kernel::Family::Tabulated)
    for (double r : kernel.table_r)
      if (r > 0.0 && r < support) breaks.push_back(r);
  breaks.push_back(support);
  std::sort(breaks.begin(), breaks.end());

  KahanSum acc;
  for (size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    if (b <= a) continue;
    const int panels = std::max(1 << 10, static_cast<int>(32.0 * kappa_mag * (b - a) / (2.0 * kPi)));
    acc.add(simpson([&](double r) { return kernel(r) * bessel(kappa_mag * r, 0) * r; }, a, b,
                    panels));
  }
  return 2.0 * kPi * acc.value();
}

/// Fallback tensor-grid quadrature (2D global-support profiles).
double coefficient_grid_2d(const Kernel& kernel, const Domain& domain, std::array<int, 2> k,
                           int n) {
  const double L = domain.period;
  const double h = L / n;
  const double kx = 2.0 * kPi * k[0] / L;
  const double ky = 2.0 * kPi * k[1] / L;
  KahanSum acc;
  for (int i = 0; i < n; ++i) {
    const double x = -0.5 * L + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double y = -0.5 * L + (j + 0.5) * h;
      acc.add(kernel(std::hypot(x, y)) * std::cos(kx * x + ky * y));
    }
  }
  return acc.value() * h * h;
}

}  // namespace

double bessel_j0(double x) { return bessel(x, 0); }
double bessel_j1(double x) { return bessel(x, 1); }

double fourier_coefficient(const Kernel& kernel, const Domain& domain, std::array<int, 2> k) {
  if (!domain.is_torus())
    throw std::invalid_argument("fourier_coefficient: torus domains only");
  if (domain.dim > 2)
    throw std::invalid_argument("fourier_coefficient: 1D and 2D domains only");
  if (kernel.depends_on_crowd())
    throw std::invalid_argument("fourier_coefficient: crowd-dependent weights unsupported");

  const double L = domain.period;
  // coefficients are even in k: canonicalize so c(k) == c(-k) bit-exactly
  const double kmag = domain.dim == 1 ? std::abs(static_cast<double>(k[0]))
                                      : std::hypot(static_cast<double>(k[0]),
                                                   static_cast<double>(k[1]));
  const double kappa = 2.0 * kPi * kmag / L;
  const auto support = kernel.support_radius();
  const bool fits = support && *support <= 0.5 * L;

  if (kernel.family == Kernel::Family::Constant)
    return kmag == 0.0 ? kernel.amplitude * std::pow(L, domain.dim) : 0.0;

  if (domain.dim == 1) {
    if (kernel.family == Kernel::Family::Indicator && fits) {
      const double R = kernel.radius;
      return kmag == 0.0 ? kernel.amplitude * 2.0 * R
                         : kernel.amplitude * 2.0 * std::sin(kappa * R) / kappa;
    }
    return coefficient_radial_1d(kernel, domain, kappa);
  }

  if (kernel.family == Kernel::Family::Indicator && fits) {
    const double R = kernel.radius;
    return kmag == 0.0 ? kernel.amplitude * kPi * R * R
                       : kernel.amplitude * 2.0 * kPi * R * bessel_j1(kappa * R) / kappa;
  }
  if (fits) return coefficient_radial_2d(kernel, *support, kappa);
  return coefficient_grid_2d(kernel, domain, k, 1 << 9);
}

double grid_coefficient(const Kernel& kernel, const Domain& domain, std::array<int, 2> k,
                        int n_per_axis) {
  if (!domain.is_torus())
    throw std::invalid_argument("grid_coefficient: torus domains only");
  const double L = domain.period;
  const int n = n_per_axis;
  const double h = L / n;
  KahanSum acc;
  if (domain.dim == 1) {
    for (int c = 0; c < n; ++c) {
      const double delta = domain.wrap_delta(c * h);
      acc.add(kernel(std::abs(delta)) * std::cos(2.0 * kPi * k[0] * c / n));
    }
    return acc.value() * h;
  }
  for (int ci = 0; ci < n; ++ci) {
    const double dx = domain.wrap_delta(ci * h);
    for (int cj = 0; cj < n; ++cj) {
      const double dy = domain.wrap_delta(cj * h);
      acc.add(kernel(std::hypot(dx, dy)) *
              std::cos(2.0 * kPi * (static_cast<double>(k[0]) * ci + static_cast<double>(k[1]) * cj) / n));
    }
  }
  return acc.value() * h * h;
}

namespace {

/// Certified bound on |c(k)| for modes with |k|_inf >= k_floor.
double tail_envelope(const Kernel& kernel, const Domain& domain, int k_floor) {
  const double L = domain.period;
  const double kappa = 2.0 * kPi * k_floor / L;
  if (kernel.family == Kernel::Family::Constant) return 0.0;

  if (domain.dim == 1) {
    // integration by parts: |c| <= TV(phi) / kappa
    return kernel.radial_total_variation(domain) / kappa;
  }

  const auto support = kernel.support_radius();
  if (support && *support <= 0.5 * L) {
    // |J0(z)| <= sqrt(2/(pi z)) on the radial reduction; |k|_2 >= |k|_inf
    const double half_moment =
        simpson([&](double r) { return kernel(r) * std::sqrt(r); }, 0.0, *support, 1 << 12);
    return 2.0 * kPi * std::sqrt(2.0 / (kPi * kappa)) * half_moment;
  }

  // global monotone radial profile: integrate by parts along the axis of
  // the largest component; each row's variation is 2(phi(|y|) - phi(corner))
  const double half = 0.5 * L;
  const double row_tv_integral = simpson(
      [&](double y) { return 2.0 * (kernel(std::abs(y)) - kernel(std::hypot(half, y))); },
      -half, half, 1 << 12);
  return row_tv_integral / kappa;
}

}  // namespace

FourierGapResult sigma_phi(const Kernel& kernel, const Domain& domain, int k_max) {
  if (!domain.is_torus()) throw std::invalid_argument("sigma_phi: torus domains only");
  if (domain.dim > 2) throw std::invalid_argument("sigma_phi: 1D and 2D domains only");
  if (!kernel.normalized)
    throw std::invalid_argument("sigma_phi: kernel must be normalized to unit mass");
  if (k_max <= 0) k_max = domain.dim == 1 ? kSigmaDefaultKmax1D : kSigmaDefaultKmax2D;

  FourierGapResult result;
  result.k_max = k_max;
  result.mass_coefficient = fourier_coefficient(kernel, domain, {0, 0});

  double best = -std::numeric_limits<double>::infinity();
  std::array<int, 2> best_k{0, 0};
  double best_norm2 = 0.0;
  auto consider = [&](std::array<int, 2> k, double c) {
    const double norm2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
    const bool better =
        c > best || (c == best && (norm2 < best_norm2 ||
                                   (norm2 == best_norm2 &&
                                    std::pair(k[0], k[1]) < std::pair(best_k[0], best_k[1]))));
    if (better) {
      best = c;
      best_k = k;
      best_norm2 = norm2;
    }
  };

  if (domain.dim == 1) {
    for (int k = 1; k <= k_max; ++k) {
      const double c = fourier_coefficient(kernel, domain, {k, 0});
      if (k <= 8) result.coefficients.push_back({{k, 0}, c});
      consider({k, 0}, c);
    }
  } else {
    // half lattice: evenness pairs (k1, k2) with (-k1, -k2)
    for (int k1 = 0; k1 <= k_max; ++k1) {
      for (int k2 = -k_max; k2 <= k_max; ++k2) {
        if (k1 == 0 && k2 <= 0) continue;
        const double c = fourier_coefficient(kernel, domain, {k1, k2});
        if (std::max(k1, std::abs(k2)) <= 8) result.coefficients.push_back({{k1, k2}, c});
        consider({k1, k2}, c);
      }
    }
  }

  result.max_coefficient = best;
  result.argmax_mode = best_k;
  result.tail_bound = tail_envelope(kernel, domain, k_max + 1);
  if (!(result.tail_bound < best || result.tail_bound == 0.0))
    throw std::runtime_error(
        "sigma_phi: tail bound inconclusive at k_max = " + std::to_string(k_max) +
        " (bound " + std::to_string(result.tail_bound) + " vs max coefficient " +
        std::to_string(best) + "); increase k_max");
  result.sigma = 1.0 - best;
  return result;
}

PoincareResult poincare_check(const Kernel& kernel, const SpectralGrid& grid,
                              std::span<const double> w) {
  Convolution conv(kernel, grid);
  const size_t cells = grid.cells();
  if (w.size() != cells) throw std::invalid_argument("poincare_check: field size mismatch");

  // discrete gap of the sampled kernel: ghat(0) - max_{k != 0} ghat(k)
  // the r2c half-spectrum holds one representative of every +-k pair and
  // the symbol is even, so skipping linear index 0 skips exactly k = 0
  const auto symbol = conv.symbol();
  double max_sym = -std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < symbol.size(); ++i) max_sym = std::max(max_sym, symbol[i]);
  const double sigma_grid = conv.stencil_mass() - max_sym;

  const double hd = grid.cell_volume();
  const double Ld = std::pow(grid.domain.period, grid.dim());

  std::vector<double> conv_w(cells);
  conv.apply(w, conv_w);

  KahanSum sum_w, sum_w2, sum_w_convw;
  for (size_t a = 0; a < cells; ++a) {
    sum_w.add(w[a]);
    sum_w2.add(w[a] * w[a]);
    sum_w_convw.add(w[a] * conv_w[a]);
  }
  const double int_w = sum_w.value() * hd;
  const double int_w2 = sum_w2.value() * hd;
  const double int_w_convw = sum_w_convw.value() * hd;

  PoincareResult out;
  out.sigma_grid = sigma_grid;
  out.lhs = 2.0 * (conv.stencil_mass() * int_w2 - int_w_convw);
  out.rhs = sigma_grid / Ld * 2.0 * (Ld * int_w2 - int_w * int_w);
  out.margin = out.lhs - out.rhs;
  return out;
}

}  // namespace swarm
