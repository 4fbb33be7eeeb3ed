#include "swarm/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "swarm/numeric.hpp"

namespace swarm {

namespace {

constexpr double kTiny = 1e-300;

int wrap_index(int i, int n) {
  if (i < 0) return i + n;
  if (i >= n) return i - n;
  return i;
}

}  // namespace

double FieldState::total_mass() const {
  KahanSum acc;
  for (double r : rho) acc.add(r);
  return acc.value() * grid.cell_volume();
}

std::array<double, 2> FieldState::total_momentum() const {
  std::array<double, 2> out{0.0, 0.0};
  for (int c = 0; c < dim(); ++c) {
    KahanSum acc;
    const auto& uc = u[static_cast<size_t>(c)];
    for (size_t a = 0; a < cells(); ++a) acc.add(rho[a] * uc[a]);
    out[static_cast<size_t>(c)] = acc.value() * grid.cell_volume();
  }
  return out;
}

FieldState uniform_field(const SpectralGrid& grid, double rho0, std::array<double, 2> u0) {
  FieldState s;
  s.grid = grid;
  s.rho.assign(grid.cells(), rho0);
  for (int c = 0; c < grid.dim(); ++c)
    s.u[static_cast<size_t>(c)].assign(grid.cells(), u0[static_cast<size_t>(c)]);
  return s;
}

FieldState cosine_field_1d(const SpectralGrid& grid, double rho_base, double rho_eps,
                           double u_amp, int mode) {
  if (grid.dim() != 1) throw std::invalid_argument("cosine_field_1d: 1D grids only");
  FieldState s;
  s.grid = grid;
  const int n = grid.dims[0];
  s.rho.resize(static_cast<size_t>(n));
  s.u[0].resize(static_cast<size_t>(n));
  const double k = 2.0 * std::numbers::pi * mode / grid.domain.period;
  for (int a = 0; a < n; ++a) {
    const double x = grid.center(0, a);
    s.rho[static_cast<size_t>(a)] = rho_base * (1.0 + rho_eps * std::cos(k * x));
    s.u[0][static_cast<size_t>(a)] = u_amp * std::sin(k * x);
  }
  return s;
}

FieldState swirl_field_2d(const SpectralGrid& grid, double rho_base, double rho_eps,
                          double u_amp, int mode) {
  if (grid.dim() != 2) throw std::invalid_argument("swirl_field_2d: 2D grids only");
  FieldState s;
  s.grid = grid;
  const int nx = grid.dims[0], ny = grid.dims[1];
  s.rho.resize(grid.cells());
  s.u[0].resize(grid.cells());
  s.u[1].resize(grid.cells());
  const double k = 2.0 * std::numbers::pi * mode / grid.domain.period;
  for (int i = 0; i < nx; ++i) {
    const double x = grid.center(0, i);
    for (int j = 0; j < ny; ++j) {
      const double y = grid.center(1, j);
      const size_t a = static_cast<size_t>(i) * ny + j;
      s.rho[a] = rho_base * (1.0 + rho_eps * std::cos(k * x) * std::cos(k * y));
      s.u[0][a] = u_amp * std::sin(k * y);
      s.u[1][a] = u_amp * std::sin(k * x);
    }
  }
  return s;
}

FieldState gaussian_bump_field(const SpectralGrid& grid, double rho_base, double amp,
                               double width, std::array<double, 2> center,
                               std::array<double, 2> u0) {
  FieldState s;
  s.grid = grid;
  s.rho.resize(grid.cells());
  for (int c = 0; c < grid.dim(); ++c)
    s.u[static_cast<size_t>(c)].assign(grid.cells(), u0[static_cast<size_t>(c)]);
  const int nx = grid.dims[0];
  const int ny = grid.dim() > 1 ? grid.dims[1] : 1;
  for (int i = 0; i < nx; ++i) {
    const double dx = grid.domain.wrap_delta(grid.center(0, i) - center[0]);
    for (int j = 0; j < ny; ++j) {
      double r2 = dx * dx;
      if (grid.dim() > 1) {
        const double dy = grid.domain.wrap_delta(grid.center(1, j) - center[1]);
        r2 += dy * dy;
      }
      s.rho[static_cast<size_t>(i) * ny + j] =
          rho_base + amp * std::exp(-0.5 * r2 / (width * width));
    }
  }
  return s;
}

std::vector<double> convolve_density(Convolution& conv, const FieldState& state) {
  std::vector<double> out(state.cells());
  conv.apply(state.rho, out);
  return out;
}

std::array<std::vector<double>, 2> alignment_force(const FieldState& state, Convolution& conv,
                                                   double tau) {
  const size_t cells = state.cells();
  std::vector<double> conv_rho(cells), m(cells), conv_m(cells);
  conv.apply(state.rho, conv_rho);
  std::array<std::vector<double>, 2> force;
  for (int c = 0; c < state.dim(); ++c) {
    const auto& uc = state.u[static_cast<size_t>(c)];
    for (size_t a = 0; a < cells; ++a) m[a] = state.rho[a] * uc[a];
    conv.apply(m, conv_m);
    auto& fc = force[static_cast<size_t>(c)];
    fc.resize(cells);
    for (size_t a = 0; a < cells; ++a)
      fc[a] = tau * (state.rho[a] * conv_m[a] - m[a] * conv_rho[a]);
  }
  return force;
}

double field_energy_fluctuation(const FieldState& state) {
  const double m0 = state.total_mass();
  if (!(m0 > 0.0)) throw std::invalid_argument("field_energy_fluctuation: vacuum total mass");
  const double vol = state.grid.cell_volume();
  double result = 0.0;
  KahanSum e2;
  std::array<double, 2> mom{0.0, 0.0};
  for (int c = 0; c < state.dim(); ++c) {
    KahanSum pc;
    const auto& uc = state.u[static_cast<size_t>(c)];
    for (size_t a = 0; a < state.cells(); ++a) {
      pc.add(state.rho[a] * uc[a]);
      e2.add(state.rho[a] * uc[a] * uc[a]);
    }
    mom[static_cast<size_t>(c)] = pc.value() * vol;
  }
  const double kinetic2 = e2.value() * vol;
  result = 0.5 * (kinetic2 - (mom[0] * mom[0] + mom[1] * mom[1]) / m0);
  return result;
}

namespace {

/// Central-difference velocity gradients; fills lambda_min(grad_S u),
/// divergence and max |partial| per cell on the fly.
struct GradientScan {
  double max_grad = 0.0;
  double div_min = std::numeric_limits<double>::infinity();
  double lambda_min = std::numeric_limits<double>::infinity();
  size_t argmin_lambda = 0;

  // callback(lambda_min_cell, a) lets the eta scan combine with phi*rho
  template <typename F>
  static GradientScan run(const FieldState& s, F&& per_cell) {
    GradientScan out;
    const int nx = s.grid.dims[0];
    if (s.dim() == 1) {
      const double inv2h = 0.5 / s.grid.h[0];
      for (int a = 0; a < nx; ++a) {
        const double ux = (s.u[0][static_cast<size_t>(wrap_index(a + 1, nx))] -
                           s.u[0][static_cast<size_t>(wrap_index(a - 1, nx))]) *
                          inv2h;
        out.max_grad = std::max(out.max_grad, std::abs(ux));
        out.div_min = std::min(out.div_min, ux);
        per_cell(ux, static_cast<size_t>(a), out);
      }
      return out;
    }
    const int ny = s.grid.dims[1];
    const double inv2hx = 0.5 / s.grid.h[0];
    const double inv2hy = 0.5 / s.grid.h[1];
    auto at = [&](const std::vector<double>& f, int i, int j) {
      return f[static_cast<size_t>(wrap_index(i, nx)) * ny + wrap_index(j, ny)];
    };
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const double uxx = (at(s.u[0], i + 1, j) - at(s.u[0], i - 1, j)) * inv2hx;
        const double uxy = (at(s.u[0], i, j + 1) - at(s.u[0], i, j - 1)) * inv2hy;
        const double uyx = (at(s.u[1], i + 1, j) - at(s.u[1], i - 1, j)) * inv2hx;
        const double uyy = (at(s.u[1], i, j + 1) - at(s.u[1], i, j - 1)) * inv2hy;
        out.max_grad = std::max({out.max_grad, std::abs(uxx), std::abs(uxy), std::abs(uyx),
                                 std::abs(uyy)});
        out.div_min = std::min(out.div_min, uxx + uyy);
        const double lmin = sym2_eig_min(uxx, 0.5 * (uxy + uyx), uyy);
        per_cell(lmin, static_cast<size_t>(i) * ny + j, out);
      }
    }
    return out;
  }
};

}  // namespace

EtaSample threshold_eta(const FieldState& state, Convolution& conv, double tau) {
  std::vector<double> conv_rho(state.cells());
  conv.apply(state.rho, conv_rho);
  EtaSample sample;
  sample.eta_min = std::numeric_limits<double>::infinity();
  sample.conv_rho_min = *std::min_element(conv_rho.begin(), conv_rho.end());
  sample.conv_rho_max = *std::max_element(conv_rho.begin(), conv_rho.end());
  const auto scan = GradientScan::run(state, [&](double lmin, size_t a, GradientScan&) {
    const double eta = lmin + tau * conv_rho[a];
    if (eta < sample.eta_min) {
      sample.eta_min = eta;
      sample.argmin = a;
    }
  });
  sample.div_min = scan.div_min;
  sample.max_grad = scan.max_grad;
  return sample;
}

namespace {

struct Conserved {
  std::vector<double> rho;
  std::array<std::vector<double>, 2> m;
};

struct StageBuffers {
  std::vector<double> ux, uy;
  std::vector<double> conv_rho, conv_mx, conv_my;
  std::vector<double> fx_rho, fx_mx, fx_my;
  std::vector<double> fy_rho, fy_mx, fy_my;
  Conserved k1, k2, q1;

  void resize(size_t cells, int dim) {
    for (auto* v : {&ux, &conv_rho, &conv_mx, &fx_rho, &fx_mx})
      v->assign(cells, 0.0);
    if (dim > 1)
      for (auto* v : {&uy, &conv_my, &fx_my, &fy_rho, &fy_mx, &fy_my})
        v->assign(cells, 0.0);
    for (auto* c : {&k1, &k2, &q1}) {
      c->rho.assign(cells, 0.0);
      c->m[0].assign(cells, 0.0);
      if (dim > 1) c->m[1].assign(cells, 0.0);
    }
  }
};

struct StageInfo {
  double alpha_x = 0.0;
  double alpha_y = 0.0;
  double conv_rho_max = 0.0;
};

/// Conservative right side of one stage: LLF fluxes plus alignment source.
StageInfo hydro_rhs(const SpectralGrid& grid, Convolution& conv, double tau,
                    double vacuum_floor, const Conserved& q, Conserved& dq,
                    StageBuffers& w) {
  const int dim = grid.dim();
  const int nx = grid.dims[0];
  const int ny = dim > 1 ? grid.dims[1] : 1;
  const size_t cells = grid.cells();
  StageInfo info;

  // primitives with vacuum guard
  for (size_t a = 0; a < cells; ++a) {
    const double r = q.rho[a];
    w.ux[a] = r > vacuum_floor ? q.m[0][a] / r : 0.0;
    info.alpha_x = std::max(info.alpha_x, std::abs(w.ux[a]));
  }
  if (dim > 1) {
    for (size_t a = 0; a < cells; ++a) {
      const double r = q.rho[a];
      w.uy[a] = r > vacuum_floor ? q.m[1][a] / r : 0.0;
      info.alpha_y = std::max(info.alpha_y, std::abs(w.uy[a]));
    }
  }

  // alignment source (momentum only)
  conv.apply(q.rho, w.conv_rho);
  conv.apply(q.m[0], w.conv_mx);
  if (dim > 1) conv.apply(q.m[1], w.conv_my);
  info.conv_rho_max = *std::max_element(w.conv_rho.begin(), w.conv_rho.end());

  if (dim == 1) {
    const double h = grid.h[0];
    for (int a = 0; a < nx; ++a) {
      const int b = wrap_index(a + 1, nx);
      const auto sa = static_cast<size_t>(a), sb = static_cast<size_t>(b);
      const double alpha = std::max(std::abs(w.ux[sa]), std::abs(w.ux[sb]));
      w.fx_rho[sa] = 0.5 * (q.m[0][sa] + q.m[0][sb]) - 0.5 * alpha * (q.rho[sb] - q.rho[sa]);
      w.fx_mx[sa] = 0.5 * (q.m[0][sa] * w.ux[sa] + q.m[0][sb] * w.ux[sb]) -
                    0.5 * alpha * (q.m[0][sb] - q.m[0][sa]);
    }
    for (int a = 0; a < nx; ++a) {
      const auto sa = static_cast<size_t>(a);
      const auto sp = static_cast<size_t>(wrap_index(a - 1, nx));
      dq.rho[sa] = -(w.fx_rho[sa] - w.fx_rho[sp]) / h;
      dq.m[0][sa] = -(w.fx_mx[sa] - w.fx_mx[sp]) / h +
                    tau * (q.rho[sa] * w.conv_mx[sa] - q.m[0][sa] * w.conv_rho[sa]);
    }
    return info;
  }

  const double hx = grid.h[0];
  const double hy = grid.h[1];
  auto id = [ny](int i, int j) { return static_cast<size_t>(i) * ny + j; };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const size_t L = id(i, j);
      {  // x interface (i,j)-(i+1,j)
        const size_t R = id(wrap_index(i + 1, nx), j);
        const double alpha = std::max(std::abs(w.ux[L]), std::abs(w.ux[R]));
        w.fx_rho[L] = 0.5 * (q.m[0][L] + q.m[0][R]) - 0.5 * alpha * (q.rho[R] - q.rho[L]);
        w.fx_mx[L] = 0.5 * (q.m[0][L] * w.ux[L] + q.m[0][R] * w.ux[R]) -
                     0.5 * alpha * (q.m[0][R] - q.m[0][L]);
        w.fx_my[L] = 0.5 * (q.m[1][L] * w.ux[L] + q.m[1][R] * w.ux[R]) -
                     0.5 * alpha * (q.m[1][R] - q.m[1][L]);
      }
      {  // y interface (i,j)-(i,j+1)
        const size_t R = id(i, wrap_index(j + 1, ny));
        const double alpha = std::max(std::abs(w.uy[L]), std::abs(w.uy[R]));
        w.fy_rho[L] = 0.5 * (q.m[1][L] + q.m[1][R]) - 0.5 * alpha * (q.rho[R] - q.rho[L]);
        w.fy_mx[L] = 0.5 * (q.m[0][L] * w.uy[L] + q.m[0][R] * w.uy[R]) -
                     0.5 * alpha * (q.m[0][R] - q.m[0][L]);
        w.fy_my[L] = 0.5 * (q.m[1][L] * w.uy[L] + q.m[1][R] * w.uy[R]) -
                     0.5 * alpha * (q.m[1][R] - q.m[1][L]);
      }
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const size_t a = id(i, j);
      const size_t px = id(wrap_index(i - 1, nx), j);
      const size_t py = id(i, wrap_index(j - 1, ny));
      dq.rho[a] = -(w.fx_rho[a] - w.fx_rho[px]) / hx - (w.fy_rho[a] - w.fy_rho[py]) / hy;
      dq.m[0][a] = -(w.fx_mx[a] - w.fx_mx[px]) / hx - (w.fy_mx[a] - w.fy_mx[py]) / hy +
                   tau * (q.rho[a] * w.conv_mx[a] - q.m[0][a] * w.conv_rho[a]);
      dq.m[1][a] = -(w.fx_my[a] - w.fx_my[px]) / hx - (w.fy_my[a] - w.fy_my[py]) / hy +
                   tau * (q.rho[a] * w.conv_my[a] - q.m[1][a] * w.conv_rho[a]);
    }
  }
  return info;
}

FieldState to_state(const SpectralGrid& grid, const Conserved& q, double vacuum_floor,
                    double time) {
  FieldState s;
  s.grid = grid;
  s.time = time;
  s.rho = q.rho;
  for (int c = 0; c < grid.dim(); ++c) {
    auto& uc = s.u[static_cast<size_t>(c)];
    uc.resize(grid.cells());
    for (size_t a = 0; a < grid.cells(); ++a)
      uc[a] = q.rho[a] > vacuum_floor ? q.m[static_cast<size_t>(c)][a] / q.rho[a] : 0.0;
  }
  return s;
}

bool all_finite(const Conserved& q, int dim) {
  for (double v : q.rho)
    if (!std::isfinite(v)) return false;
  for (int c = 0; c < dim; ++c)
    for (double v : q.m[static_cast<size_t>(c)])
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

HydroResult simulate_hydro(FieldState state, const Kernel& kernel, const HydroConfig& config,
                           const std::function<double(const FieldState&)>* probe) {
  if (!(config.cfl > 0.0 && config.cfl < 1.0))
    throw std::invalid_argument("simulate_hydro: cfl must lie in (0, 1)");
  if (config.t_end < 0.0) throw std::invalid_argument("simulate_hydro: t_end must be >= 0");
  if (config.record_every < 1)
    throw std::invalid_argument("simulate_hydro: record_every must be >= 1");
  const int dim = state.dim();
  const size_t cells = state.cells();
  for (double r : state.rho)
    if (!(r >= 0.0)) throw std::invalid_argument("simulate_hydro: density must be non-negative");

  Convolution conv(kernel, state.grid);
  const double m0 = state.total_mass();
  const double cell_volume = state.grid.cell_volume();
  const double domain_volume = cell_volume * static_cast<double>(cells);
  const double vacuum_floor = config.vacuum_fraction * m0 / domain_volume;

  Conserved q;
  q.rho = state.rho;
  for (int c = 0; c < dim; ++c) {
    auto& mc = q.m[static_cast<size_t>(c)];
    mc.resize(cells);
    for (size_t a = 0; a < cells; ++a) mc[a] = state.rho[a] * state.u[static_cast<size_t>(c)][a];
  }

  StageBuffers w;
  w.resize(cells, dim);

  HydroResult result;
  result.trace.dim = dim;
  double gradient_cap = config.blowup_gradient_cap;

  auto record = [&](double t, const Conserved& qq) {
    FieldState s = to_state(state.grid, qq, vacuum_floor, t);
    const auto eta = threshold_eta(s, conv, config.tau);
    result.trace.times.push_back(t);
    result.trace.delta_e.push_back(field_energy_fluctuation(s));
    result.trace.rho_min.push_back(*std::min_element(s.rho.begin(), s.rho.end()));
    result.trace.rho_max.push_back(*std::max_element(s.rho.begin(), s.rho.end()));
    result.trace.eta_min.push_back(eta.eta_min);
    result.trace.mass.push_back(s.total_mass());
    const auto mom = s.total_momentum();
    result.trace.momentum_x.push_back(mom[0]);
    result.trace.momentum_y.push_back(mom[1]);
    result.trace.max_grad.push_back(eta.max_grad);
    result.trace.div_min.push_back(eta.div_min);
    result.trace.conv_rho_min.push_back(eta.conv_rho_min);
    result.trace.conv_rho_max.push_back(eta.conv_rho_max);
    if (probe && *probe) result.trace.lambda2.push_back((*probe)(s));
    if (config.record_snapshots) result.snapshots.push_back(std::move(s));
  };

  // auto gradient cap from the initial state
  {
    const FieldState s0 = to_state(state.grid, q, vacuum_floor, 0.0);
    const auto scan0 = GradientScan::run(s0, [](double, size_t, GradientScan&) {});
    if (gradient_cap <= 0.0) gradient_cap = 1e3 * std::max(scan0.max_grad, 1.0);
  }

  record(0.0, q);

  double t = 0.0;
  long step = 0;
  while (t < config.t_end - 1e-14 * std::max(1.0, config.t_end)) {
    const StageInfo info =
        hydro_rhs(state.grid, conv, config.tau, vacuum_floor, q, w.k1, w);
    double dt = config.cfl * state.grid.h[0] / std::max(info.alpha_x, kTiny);
    if (dim > 1)
      dt = std::min(dt, config.cfl * state.grid.h[1] / std::max(info.alpha_y, kTiny));
    dt = std::min(dt, config.cfl / std::max(config.tau * info.conv_rho_max, kTiny));
    dt = std::min(dt, config.dt_max);
    dt = std::min(dt, config.t_end - t);

    // Heun: q1 = q + dt k1; q_next = q + dt/2 (k1 + k2(q1))
    for (size_t a = 0; a < cells; ++a) w.q1.rho[a] = q.rho[a] + dt * w.k1.rho[a];
    for (int c = 0; c < dim; ++c)
      for (size_t a = 0; a < cells; ++a)
        w.q1.m[static_cast<size_t>(c)][a] =
            q.m[static_cast<size_t>(c)][a] + dt * w.k1.m[static_cast<size_t>(c)][a];

    hydro_rhs(state.grid, conv, config.tau, vacuum_floor, w.q1, w.k2, w);
    for (size_t a = 0; a < cells; ++a)
      q.rho[a] += 0.5 * dt * (w.k1.rho[a] + w.k2.rho[a]);
    for (int c = 0; c < dim; ++c)
      for (size_t a = 0; a < cells; ++a)
        q.m[static_cast<size_t>(c)][a] +=
            0.5 * dt * (w.k1.m[static_cast<size_t>(c)][a] + w.k2.m[static_cast<size_t>(c)][a]);

    // roundoff-scale negatives appear at vacuum fronts where the guarded
    // wave speed vanishes; anything larger means a broken CFL condition
    // and is left for the sentinel below
    const double negativity_floor = -1e-13 * m0 / domain_volume;
    for (size_t a = 0; a < cells; ++a) {
      if (q.rho[a] < 0.0 && q.rho[a] >= negativity_floor) {
        q.rho[a] = 0.0;
        for (int c = 0; c < dim; ++c) q.m[static_cast<size_t>(c)][a] = 0.0;
      }
    }

    t += dt;
    ++step;

    if (!all_finite(q, dim)) {
      result.blow_up = BlowUpEvent{t, 0, std::numeric_limits<double>::quiet_NaN(),
                                   "non-finite state"};
      break;
    }
    {
      const FieldState s = to_state(state.grid, q, vacuum_floor, t);
      double max_grad = 0.0;
      size_t argmax = 0;
      GradientScan::run(s, [&](double, size_t a, GradientScan& g) {
        if (g.max_grad > max_grad) {
          max_grad = g.max_grad;
          argmax = a;
        }
      });
      if (max_grad > gradient_cap) {
        record(t, q);
        result.blow_up = BlowUpEvent{t, argmax, max_grad, "velocity gradient cap exceeded"};
        break;
      }
    }

    if (step % config.record_every == 0 || t >= config.t_end - 1e-14)
      record(t, q);
  }

  result.final_state = to_state(state.grid, q, vacuum_floor, t);
  return result;
}

ThresholdReport threshold_report(const HydroTrace& trace, double eta_c, double eta_c_conv,
                                 double tolerance, const std::optional<BlowUpEvent>& blow_up) {
  ThresholdReport report;
  report.times = trace.times;
  report.eta_min_series = trace.eta_min;
  report.eta_c = eta_c;
  report.eta_c_conv = eta_c_conv;
  report.worst_eta = trace.eta_min.empty()
                         ? 0.0
                         : *std::min_element(trace.eta_min.begin(), trace.eta_min.end());
  report.persists = !trace.eta_min.empty() && report.worst_eta >= eta_c - tolerance;
  if (blow_up) {
    report.blowup_time = blow_up->time;
    report.persists = false;
  }
  return report;
}

LagrangianReport lagrangian_invariant_1d(std::span<const FieldState> snapshots,
                                         const Kernel& kernel, double tau) {
  if (snapshots.empty()) throw std::invalid_argument("lagrangian_invariant_1d: no snapshots");
  if (snapshots.front().dim() != 1)
    throw std::invalid_argument("lagrangian_invariant_1d: 1D runs only");

  Convolution conv(kernel, snapshots.front().grid);
  LagrangianReport report;
  report.worst_min_G = std::numeric_limits<double>::infinity();
  const int n = snapshots.front().grid.dims[0];
  const double h = snapshots.front().grid.h[0];
  std::vector<double> conv_rho(static_cast<size_t>(n));

  for (const auto& s : snapshots) {
    conv.apply(s.rho, conv_rho);
    KahanSum total;
    double min_G = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      const double ux = (s.u[0][static_cast<size_t>(wrap_index(a + 1, n))] -
                         s.u[0][static_cast<size_t>(wrap_index(a - 1, n))]) *
                        0.5 / h;
      const double G = ux + tau * conv_rho[static_cast<size_t>(a)];
      total.add(G);
      min_G = std::min(min_G, G);
    }
    report.times.push_back(s.time);
    report.min_G.push_back(min_G);
    report.integral_G.push_back(total.value() * h);
    report.worst_min_G = std::min(report.worst_min_G, min_G);
  }
  for (double v : report.integral_G)
    report.integral_drift = std::max(report.integral_drift, std::abs(v - report.integral_G.front()));
  return report;
}

FlockingCertificate flocking_certificate(const HydroTrace& trace, double sigma, double tau,
                                         double mean_density, double gate_c, double eps_cert) {
  if (trace.rho_min.size() != trace.times.size() || trace.rho_max.size() != trace.times.size())
    throw std::invalid_argument("flocking_certificate: mismatched series");
  FlockingCertificate cert;
  cert.gate_c = gate_c;
  std::vector<double> rates(trace.size());
  double worst_var = 0.0;
  for (size_t k = 0; k < trace.size(); ++k) {
    const double rm = trace.rho_min[k];
    const double rM = trace.rho_max[k];
    rates[k] = rM > 0.0 ? (rm / rM) * rm : 0.0;
    if (mean_density > 0.0) worst_var = std::max(worst_var, (rM - rm) / mean_density);
  }
  cert.decay = exponential_decay_certificate(trace.times, trace.delta_e, rates,
                                             -tau * sigma, eps_cert);
  cert.worst_variation = worst_var;
  cert.density_gate_ok = worst_var <= (1.0 - gate_c) * (1.0 + 1e-12);
  return cert;
}

CertificateResult spectral_flocking_certificate(const HydroTrace& trace, double tau,
                                                double eps_cert) {
  if (trace.lambda2.size() != trace.times.size())
    throw std::invalid_argument(
        "spectral_flocking_certificate: run recorded no spectral-gap series");
  std::vector<double> rates(trace.size());
  for (size_t k = 0; k < trace.size(); ++k)
    rates[k] = std::min(trace.lambda2[k], trace.rho_min[k]);
  return exponential_decay_certificate(trace.times, trace.delta_e, rates, -2.0 * tau, eps_cert);
}

}  // namespace swarm
