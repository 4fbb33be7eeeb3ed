#include "swarm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "swarm/numeric.hpp"

namespace swarm {

namespace {

constexpr double kPi = std::numbers::pi;

double profile_tail(double r, double theta) { return std::pow(1.0 + r * r, -0.5 * theta); }

double tabulated_profile(const Kernel& k, double r) {
  const auto& rs = k.table_r;
  const auto& ps = k.table_phi;
  if (r > rs.back()) return 0.0;
  const auto it = std::upper_bound(rs.begin(), rs.end(), r);
  if (it == rs.begin()) return ps.front();
  const size_t hi = static_cast<size_t>(it - rs.begin());
  if (hi >= rs.size()) return ps.back();
  const size_t lo = hi - 1;
  const double w = (r - rs[lo]) / (rs[hi] - rs[lo]);
  return ps[lo] + w * (ps[hi] - ps[lo]);
}

/// Uniform-grid quadrature of profile(|y|) over the torus cell [-L/2, L/2)^d
/// with minimum-image radius; midpoint rule, which is the periodic trapezoid
/// rule for this integrand.
double torus_grid_mass(const Kernel& k, const Domain& domain, int n) {
  const double L = domain.period;
  const double h = L / n;
  KahanSum acc;
  if (domain.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const double x = -0.5 * L + (i + 0.5) * h;
      acc.add(k(std::abs(x)));
    }
    return acc.value() * h;
  }
  if (domain.dim == 2) {
    for (int i = 0; i < n; ++i) {
      const double x = -0.5 * L + (i + 0.5) * h;
      for (int j = 0; j < n; ++j) {
        const double y = -0.5 * L + (j + 0.5) * h;
        acc.add(k(std::hypot(x, y)));
      }
    }
    return acc.value() * h * h;
  }
  for (int i = 0; i < n; ++i) {
    const double x = -0.5 * L + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double y = -0.5 * L + (j + 0.5) * h;
      for (int l = 0; l < n; ++l) {
        const double z = -0.5 * L + (l + 0.5) * h;
        acc.add(k(std::sqrt(x * x + y * y + z * z)));
      }
    }
  }
  return acc.value() * h * h * h;
}

double sphere_surface(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

/// Composite-Simpson radial quadrature of surface * r^{d-1} profile(r),
/// with panels split at the profile's kink radii.
double radial_mass(const Kernel& k, int dim, double r_max, int panels = 1 << 12) {
  std::vector<double> breaks{0.0};
  if (const auto s = k.support_radius(); s && *s < r_max) breaks.push_back(*s);
  if (k.family == Kernel::Family::Tabulated)
    for (double r : k.table_r)
      if (r > 0.0 && r < r_max) breaks.push_back(r);
  breaks.push_back(r_max);
  std::sort(breaks.begin(), breaks.end());

  KahanSum acc;
  auto f = [&](double r) { return k(r) * std::pow(r, dim - 1); };
  for (size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double lo = breaks[s], hi = breaks[s + 1];
    if (hi <= lo) continue;
    const double h = (hi - lo) / panels;
    for (int i = 0; i < panels; ++i) {
      const double a = lo + i * h;
      acc.add(h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h)));
    }
  }
  return sphere_surface(dim) * acc.value();
}

}  // namespace

Kernel Kernel::fat_tail(double theta, double amplitude) {
  if (!(theta > 0.0)) throw std::invalid_argument("Kernel: fat-tail exponent must be positive");
  Kernel k;
  k.family = Family::FatTail;
  k.theta = theta;
  k.amplitude = amplitude;
  return k;
}

Kernel Kernel::indicator(double R0, double amplitude) {
  if (!(R0 > 0.0)) throw std::invalid_argument("Kernel: indicator radius must be positive");
  Kernel k;
  k.family = Family::Indicator;
  k.radius = R0;
  k.amplitude = amplitude;
  return k;
}

Kernel Kernel::increasing_compact(double R0, double amplitude) {
  if (!(R0 > 0.0)) throw std::invalid_argument("Kernel: support radius must be positive");
  Kernel k;
  k.family = Family::IncreasingCompact;
  k.radius = R0;
  k.amplitude = amplitude;
  return k;
}

Kernel Kernel::topological(double R0, double beta, double gamma, double amplitude) {
  if (!(R0 > 0.0)) throw std::invalid_argument("Kernel: support radius must be positive");
  if (!(gamma > 0.0) || beta < gamma)
    throw std::invalid_argument("Kernel: topological family needs beta >= gamma > 0");
  Kernel k;
  k.family = Family::Topological;
  k.radius = R0;
  k.beta = beta;
  k.gamma = gamma;
  k.amplitude = amplitude;
  return k;
}

Kernel Kernel::constant(double amplitude) {
  Kernel k;
  k.family = Family::Constant;
  k.amplitude = amplitude;
  return k;
}

Kernel Kernel::tabulated(std::vector<double> r, std::vector<double> phi, double amplitude) {
  if (r.size() != phi.size() || r.size() < 2)
    throw std::invalid_argument("Kernel: tabulated profile needs matching tables, >= 2 points");
  if (r.front() != 0.0) throw std::invalid_argument("Kernel: tabulated profile must start at r = 0");
  for (size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw std::invalid_argument("Kernel: tabulated radii must increase");
  for (double v : phi)
    if (!(v >= 0.0)) throw std::invalid_argument("Kernel: tabulated values must be non-negative");
  Kernel k;
  k.family = Family::Tabulated;
  k.table_r = std::move(r);
  k.table_phi = std::move(phi);
  k.amplitude = amplitude;
  return k;
}

double Kernel::operator()(double r) const {
  switch (family) {
    case Family::FatTail: return amplitude * profile_tail(r, theta);
    case Family::Indicator: return r <= radius ? amplitude : 0.0;
    case Family::IncreasingCompact: return r <= radius ? amplitude * (r / radius) : 0.0;
    case Family::Constant: return amplitude;
    case Family::Tabulated: return amplitude * tabulated_profile(*this, r);
    case Family::Topological:
      throw std::logic_error("Kernel: topological weights need the ensemble overload");
  }
  return 0.0;
}

std::optional<double> Kernel::support_radius() const {
  switch (family) {
    case Family::Indicator:
    case Family::IncreasingCompact:
    case Family::Topological: return radius;
    case Family::Tabulated: return table_r.back();
    default: return std::nullopt;
  }
}

double Kernel::radial_total_variation(const Domain& domain) const {
  const double half = domain.is_torus() ? 0.5 * domain.period
                                        : std::numeric_limits<double>::infinity();
  switch (family) {
    case Family::Constant: return 0.0;
    case Family::Indicator: return 2.0 * amplitude;
    case Family::IncreasingCompact:
      // rises to amplitude then drops to zero, on both sides of the origin
      return 4.0 * amplitude;
    case Family::FatTail:
      return 2.0 * amplitude *
             (1.0 - (std::isfinite(half) ? profile_tail(half, theta) : 0.0));
    case Family::Tabulated: {
      double tv = 0.0;
      for (size_t i = 1; i < table_phi.size(); ++i)
        tv += std::abs(table_phi[i] - table_phi[i - 1]);
      tv += table_phi.back();  // terminal jump to zero
      return 2.0 * amplitude * tv;
    }
    case Family::Topological:
      throw std::logic_error("Kernel: no radial profile for topological weights");
  }
  return 0.0;
}

double kernel_value(const Kernel& kernel, const Domain& domain,
                    std::span<const double> x, std::span<const double> xp) {
  return kernel(metric_distance(domain, x, xp));
}

double crowd_fraction(std::span<const double> positions, int n_agents,
                      std::span<const double> x, std::span<const double> xp,
                      const Domain& domain) {
  if (n_agents < 1) throw std::invalid_argument("crowd_fraction: empty ensemble");
  const auto d = static_cast<size_t>(domain.dim);
  if (x.size() != d || xp.size() != d || positions.size() != d * static_cast<size_t>(n_agents))
    throw std::invalid_argument("crowd_fraction: dimension mismatch");

  const double span = metric_distance(domain, x, xp);
  const double tol = 1e-12 * std::max(1.0, domain.is_torus() ? domain.period : span);
  int count = 0;

  if (d == 1) {
    // canonical order keeps the region symmetric in (x, x')
    const double a = std::min(x[0], xp[0]);
    const double b = std::max(x[0], xp[0]);
    if (!domain.is_torus()) {
      for (int k = 0; k < n_agents; ++k)
        if (positions[k] >= a - tol && positions[k] <= b + tol) ++count;
    } else {
      const double delta = domain.wrap_delta(b - a);  // shorter arc from a
      for (int k = 0; k < n_agents; ++k) {
        const double t = domain.wrap_delta(positions[k] - a);
        const bool inside = delta >= 0.0 ? (t >= -tol && t <= delta + tol)
                                         : (t >= delta - tol && t <= tol);
        if (inside) ++count;
      }
    }
  } else {
    // closed ball of diameter |x - x'| about the midpoint, anchored at the
    // lexicographically smaller endpoint for (x, x') symmetry
    std::span<const double> base = x, other = xp;
    if (std::lexicographical_compare(xp.begin(), xp.end(), x.begin(), x.end())) {
      base = xp;
      other = x;
    }
    std::array<double, 3> delta{}, mid{};
    displacement(domain, base, other, std::span(delta.data(), d));
    for (size_t i = 0; i < d; ++i)
      mid[i] = domain.wrap_position(base[i] + 0.5 * delta[i]);
    const double radius = 0.5 * span;
    for (int k = 0; k < n_agents; ++k) {
      const auto p = positions.subspan(static_cast<size_t>(k) * d, d);
      if (metric_distance(domain, p, std::span(mid.data(), d)) <= radius + tol) ++count;
    }
  }
  return static_cast<double>(count) / n_agents;
}

double kernel_value_topological(const Kernel& kernel, const Domain& domain,
                                std::span<const double> positions, int n_agents,
                                std::span<const double> x, std::span<const double> xp) {
  if (kernel.family != Kernel::Family::Topological)
    return kernel_value(kernel, domain, x, xp);
  const double r = metric_distance(domain, x, xp);
  if (r > kernel.radius) return 0.0;
  const double metric_exp = kernel.beta - kernel.gamma;
  if (r == 0.0 && metric_exp > 0.0)
    throw std::domain_error("Kernel: topological weight singular at coincident pair");
  const double mu = crowd_fraction(positions, n_agents, x, xp, domain);
  const double metric_part = metric_exp > 0.0 ? std::pow(r, -metric_exp) : 1.0;
  return kernel.amplitude * metric_part * std::pow(mu, -kernel.gamma);
}

double kernel_mass(const Kernel& kernel, const Domain& domain) {
  if (kernel.depends_on_crowd())
    throw std::invalid_argument("kernel_mass: crowd-dependent weights have no fixed profile");
  const int d = domain.dim;

  if (domain.is_torus()) {
    const double L = domain.period;
    const auto support = kernel.support_radius();
    const bool fits = support && *support <= 0.5 * L;
    switch (kernel.family) {
      case Kernel::Family::Constant: return kernel.amplitude * std::pow(L, d);
      case Kernel::Family::Indicator:
        if (fits) {
          const double R = kernel.radius;
          const double vol = d == 1 ? 2.0 * R : d == 2 ? kPi * R * R : 4.0 / 3.0 * kPi * R * R * R;
          return kernel.amplitude * vol;
        }
        break;
      case Kernel::Family::IncreasingCompact:
        if (fits) {
          const double R = kernel.radius;
          const double vol = d == 1 ? R : d == 2 ? 2.0 / 3.0 * kPi * R * R : kPi * R * R * R;
          return kernel.amplitude * vol;
        }
        break;
      case Kernel::Family::Tabulated:
        if (fits) return radial_mass(kernel, d, *support);
        break;
      default: break;
    }
    // 1D minimum-image mass reduces exactly to 2 int_0^{L/2} phi(r) dr
    if (d == 1) return radial_mass(kernel, 1, 0.5 * L);
    const int n = d == 2 ? kNormalizationGrid2D : kNormalizationGrid3D;
    return torus_grid_mass(kernel, domain, n);
  }

  // free space
  if (const auto support = kernel.support_radius()) return radial_mass(kernel, d, *support);
  if (kernel.family == Kernel::Family::FatTail && kernel.theta > d) {
    const double cutoff = 1e4;
    const double inner = radial_mass(kernel, d, cutoff, 1 << 18);
    // algebraic tail: integrand ~ r^{d-1-theta} past the cutoff
    const double tail = sphere_surface(d) * kernel.amplitude *
                        std::pow(cutoff, d - kernel.theta) / (kernel.theta - d);
    return inner + tail;
  }
  throw std::invalid_argument("kernel_mass: profile not integrable on free space");
}

Kernel normalize_kernel(const Kernel& kernel, const Domain& domain) {
  const double mass = kernel_mass(kernel, domain);
  if (!(mass > 1e-300)) throw std::invalid_argument("normalize_kernel: zero-mass profile");
  Kernel out = kernel;
  out.amplitude = kernel.amplitude / mass;
  out.normalized = true;
  out.normalization_mass = mass;
  return out;
}

double Potential::value(double r) const {
  switch (family) {
    case Family::Quadratic: return 0.5 * strength * r * r;
    case Family::Quartic: return 0.25 * strength * r * r * r * r;
  }
  return 0.0;
}

double Potential::d1(double r) const {
  switch (family) {
    case Family::Quadratic: return strength * r;
    case Family::Quartic: return strength * r * r * r;
  }
  return 0.0;
}

double Potential::d2(double r) const {
  switch (family) {
    case Family::Quadratic: return strength;
    case Family::Quartic: return 3.0 * strength * r * r;
  }
  return 0.0;
}

void MatrixKernel::eval(std::span<const double> dx, std::span<double> out) const {
  const size_t d = dx.size();
  if (out.size() != d * d) throw std::invalid_argument("MatrixKernel: output size mismatch");
  double r2 = 0.0;
  for (double v : dx) r2 += v * v;
  const double r = std::sqrt(r2);
  if (r == 0.0) {
    const double u2 = potential.d2(0.0);
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) out[i * d + j] = i == j ? u2 : 0.0;
    return;
  }
  const double u2 = potential.d2(r);
  const double u1_over_r = potential.d1(r) / r;
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < d; ++j) {
      const double proj = dx[i] * dx[j] / r2;
      out[i * d + j] = u2 * proj + u1_over_r * ((i == j ? 1.0 : 0.0) - proj);
    }
  }
}

void MatrixKernel::gradient(std::span<const double> dx, std::span<double> out) const {
  const size_t d = dx.size();
  if (out.size() != d) throw std::invalid_argument("MatrixKernel: output size mismatch");
  double r2 = 0.0;
  for (double v : dx) r2 += v * v;
  const double r = std::sqrt(r2);
  if (r == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double u1_over_r = potential.d1(r) / r;
  for (size_t i = 0; i < d; ++i) out[i] = u1_over_r * dx[i];
}

}  // namespace swarm
