#include "swarm/particles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "swarm/numeric.hpp"

namespace swarm {

namespace {

/// Per-agent compensated accumulators for pairwise force assembly.
struct PairAccumulator {
  std::vector<KahanSum> acc;
  int dim;

  PairAccumulator(int n, int d) : acc(static_cast<size_t>(n) * d), dim(d) {}

  void add(int i, int j, std::span<const double> term) {
    for (int c = 0; c < dim; ++c) {
      acc[static_cast<size_t>(i) * dim + c].add(term[c]);
      acc[static_cast<size_t>(j) * dim + c].add(-term[c]);
    }
  }

  void write_scaled(double scale, std::span<double> out) const {
    for (size_t k = 0; k < acc.size(); ++k) out[k] += scale * acc[k].value();
  }
};

double pair_weight(const Ensemble& e, const Kernel& kernel, int i, int j) {
  if (kernel.depends_on_crowd())
    return kernel_value_topological(kernel, e.domain, e.pos, e.n, e.position(i), e.position(j));
  return kernel_value(kernel, e.domain, e.position(i), e.position(j));
}

void alignment_pair_term(const Ensemble& e, double w, int i, int j, std::span<double> term) {
  const auto vi = e.velocity(i);
  const auto vj = e.velocity(j);
  for (size_t c = 0; c < term.size(); ++c) term[c] = w * (vj[c] - vi[c]);
}

/// Uniform cell binning for compactly supported kernels. Pairs are visited
/// in a fixed cell-major order; results match the direct path to roundoff.
struct CellList {
  std::array<int, 3> nbins{1, 1, 1};
  std::array<double, 3> origin{};
  std::array<double, 3> width{};
  bool periodic = false;
  int dim = 1;
  std::vector<std::vector<int>> cells;

  static std::optional<CellList> build(const Ensemble& e, double cutoff) {
    CellList cl;
    cl.dim = e.dim();
    cl.periodic = e.domain.is_torus();
    int total = 1;
    for (int c = 0; c < cl.dim; ++c) {
      double lo, hi;
      if (cl.periodic) {
        lo = 0.0;
        hi = e.domain.period;
      } else {
        lo = hi = e.pos[c];
        for (int i = 1; i < e.n; ++i) {
          lo = std::min(lo, e.pos[static_cast<size_t>(i) * cl.dim + c]);
          hi = std::max(hi, e.pos[static_cast<size_t>(i) * cl.dim + c]);
        }
        hi += 1e-9 * (1.0 + std::abs(hi));
      }
      const int nb = static_cast<int>(std::floor((hi - lo) / cutoff));
      // wrapped neighbor offsets need >= 3 bins per axis to stay distinct
      if (nb < (cl.periodic ? 3 : 1)) return std::nullopt;
      cl.nbins[c] = nb;
      cl.origin[c] = lo;
      cl.width[c] = (hi - lo) / nb;
      total *= nb;
    }
    cl.cells.resize(static_cast<size_t>(total));
    for (int i = 0; i < e.n; ++i) {
      cl.cells[static_cast<size_t>(cl.cell_of(e.position(i)))].push_back(i);
    }
    return cl;
  }

  int cell_of(std::span<const double> x) const {
    int idx = 0;
    for (int c = 0; c < dim; ++c) {
      int b = static_cast<int>(std::floor((x[c] - origin[c]) / width[c]));
      b = std::clamp(b, 0, nbins[c] - 1);
      idx = idx * nbins[c] + b;
    }
    return idx;
  }

  int flatten(const std::array<int, 3>& b) const {
    int idx = 0;
    for (int c = 0; c < dim; ++c) idx = idx * nbins[c] + b[c];
    return idx;
  }

  template <typename PairFn>
  void for_each_pair(PairFn&& fn) const {
    // half stencil: offsets lexicographically positive, so each neighbor
    // cell pair is visited exactly once
    std::vector<std::array<int, 3>> offsets;
    std::array<int, 3> off{0, 0, 0};
    const int lo = -1, hi = 1;
    auto lex_positive = [&](const std::array<int, 3>& o) {
      for (int c = dim - 1; c >= 0; --c) {
        if (o[c] > 0) return true;
        if (o[c] < 0) return false;
      }
      return false;
    };
    for (off[0] = lo; off[0] <= hi; ++off[0]) {
      for (off[1] = dim > 1 ? lo : 0; off[1] <= (dim > 1 ? hi : 0); ++off[1]) {
        for (off[2] = dim > 2 ? lo : 0; off[2] <= (dim > 2 ? hi : 0); ++off[2]) {
          if (lex_positive(off)) offsets.push_back(off);
        }
      }
    }

    std::array<int, 3> b{0, 0, 0};
    auto visit_cell = [&](const std::array<int, 3>& cell) {
      const auto& here = cells[static_cast<size_t>(flatten(cell))];
      for (size_t a = 0; a < here.size(); ++a)
        for (size_t bb = a + 1; bb < here.size(); ++bb) fn(here[a], here[bb]);
      for (const auto& o : offsets) {
        std::array<int, 3> nb{0, 0, 0};
        bool ok = true;
        for (int c = 0; c < dim; ++c) {
          int v = cell[c] + o[c];
          if (periodic) {
            v = (v % nbins[c] + nbins[c]) % nbins[c];
          } else if (v < 0 || v >= nbins[c]) {
            ok = false;
            break;
          }
          nb[c] = v;
        }
        if (!ok) continue;
        const auto& there = cells[static_cast<size_t>(flatten(nb))];
        for (int i : here)
          for (int j : there) fn(std::min(i, j), std::max(i, j));
      }
    };

    for (b[0] = 0; b[0] < nbins[0]; ++b[0]) {
      if (dim == 1) {
        visit_cell(b);
        continue;
      }
      for (b[1] = 0; b[1] < nbins[1]; ++b[1]) {
        if (dim == 2) {
          visit_cell(b);
          continue;
        }
        for (b[2] = 0; b[2] < nbins[2]; ++b[2]) visit_cell(b);
      }
    }
  }
};

}  // namespace

void Ensemble::wrap_positions() {
  if (!domain.is_torus()) return;
  for (double& x : pos) x = domain.wrap_position(x);
}

void cs_rhs(const Ensemble& ensemble, const Kernel& kernel, double tau,
            std::span<double> accel, PairPath path) {
  const int n = ensemble.n;
  const int d = ensemble.dim();
  if (accel.size() != static_cast<size_t>(n) * d)
    throw std::invalid_argument("cs_rhs: acceleration buffer size mismatch");
  std::fill(accel.begin(), accel.end(), 0.0);
  if (n == 0) return;

  PairAccumulator acc(n, d);
  std::array<double, 3> term{};
  auto handle_pair = [&](int i, int j) {
    const double w = pair_weight(ensemble, kernel, i, j);
    if (w == 0.0) return;
    alignment_pair_term(ensemble, w, i, j, std::span(term.data(), d));
    acc.add(i, j, std::span(term.data(), d));
  };

  bool used_cells = false;
  if (path == PairPath::CellList) {
    if (const auto cutoff = kernel.support_radius()) {
      if (const auto cl = CellList::build(ensemble, *cutoff)) {
        cl->for_each_pair(handle_pair);
        used_cells = true;
      }
    }
  }
  if (!used_cells) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) handle_pair(i, j);
  }
  acc.write_scaled(tau / n, accel);
}

void three_zone_rhs(const Ensemble& ensemble, const MatrixKernel& mkernel, double tau,
                    std::span<double> accel) {
  const int n = ensemble.n;
  const int d = ensemble.dim();
  if (accel.size() != static_cast<size_t>(n) * d)
    throw std::invalid_argument("three_zone_rhs: acceleration buffer size mismatch");
  std::fill(accel.begin(), accel.end(), 0.0);
  if (n == 0) return;

  PairAccumulator align(n, d);
  PairAccumulator attract(n, d);
  std::array<double, 3> dx{}, term{}, grad{};
  std::array<double, 9> phi{};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      displacement(ensemble.domain, ensemble.position(i), ensemble.position(j),
                   std::span(dx.data(), d));
      mkernel.eval(std::span(dx.data(), d), std::span(phi.data(), static_cast<size_t>(d) * d));
      const auto vi = ensemble.velocity(i);
      const auto vj = ensemble.velocity(j);
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int b = 0; b < d; ++b) s += phi[static_cast<size_t>(a) * d + b] * (vj[b] - vi[b]);
        term[static_cast<size_t>(a)] = s;
      }
      align.add(i, j, std::span(term.data(), d));
      // force on i is -(1/N) grad_{x_i} U(|x_i - x_j|) = +(1/N) U'(r) dx/r
      mkernel.gradient(std::span(dx.data(), d), std::span(grad.data(), d));
      attract.add(i, j, std::span(grad.data(), d));
    }
  }
  align.write_scaled(tau / n, accel);
  attract.write_scaled(1.0 / n, accel);
}

double energy_fluctuation(const Ensemble& ensemble) {
  const int n = ensemble.n;
  const int d = ensemble.dim();
  if (n < 1) throw std::invalid_argument("energy_fluctuation: empty ensemble");
  std::array<KahanSum, 3> mean{};
  for (int i = 0; i < n; ++i) {
    const auto v = ensemble.velocity(i);
    for (int c = 0; c < d; ++c) mean[static_cast<size_t>(c)].add(v[c]);
  }
  std::array<double, 3> vbar{};
  for (int c = 0; c < d; ++c) vbar[static_cast<size_t>(c)] = mean[static_cast<size_t>(c)].value() / n;
  KahanSum sq;
  for (int i = 0; i < n; ++i) {
    const auto v = ensemble.velocity(i);
    for (int c = 0; c < d; ++c) {
      const double dv = v[c] - vbar[static_cast<size_t>(c)];
      sq.add(dv * dv);
    }
  }
  return 2.0 * sq.value() / n;
}

Diameters flock_diameter(const Ensemble& ensemble) {
  const int n = ensemble.n;
  const int d = ensemble.dim();
  Diameters out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out.position = std::max(out.position,
                              metric_distance(ensemble.domain, ensemble.position(i),
                                              ensemble.position(j)));
      double s = 0.0;
      const auto vi = ensemble.velocity(i);
      const auto vj = ensemble.velocity(j);
      for (int c = 0; c < d; ++c) s += (vi[c] - vj[c]) * (vi[c] - vj[c]);
      out.velocity = std::max(out.velocity, std::sqrt(s));
    }
  }
  return out;
}

namespace {

using Rhs = std::function<void(const Ensemble&, std::span<double>)>;

bool state_ok(const Ensemble& e, double cap) {
  for (double x : e.pos)
    if (!std::isfinite(x)) return false;
  for (double v : e.vel) {
    if (!std::isfinite(v) || std::abs(v) > cap) return false;
  }
  return true;
}

SimResult run_sim(Ensemble ensemble, const SimConfig& config, const Rhs& rhs,
                  const std::function<double(const Ensemble&)>* lambda2_probe) {
  if (!(config.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  if (config.t_end < 0.0) throw std::invalid_argument("simulate: t_end must be non-negative");
  if (config.record_every < 1) throw std::invalid_argument("simulate: record_every must be >= 1");

  const size_t nd = ensemble.pos.size();
  std::vector<double> k1(nd), k2(nd), k3(nd), k4(nd);
  std::vector<double> vk1(nd), vk2(nd), vk3(nd), vk4(nd);
  Ensemble stage = ensemble;

  SimResult result;
  auto record = [&](double t, const Ensemble& e) {
    result.trace.times.push_back(t);
    result.trace.delta_e.push_back(energy_fluctuation(e));
    const auto diam = flock_diameter(e);
    result.trace.diameter.push_back(diam.position);
    result.trace.velocity_diameter.push_back(diam.velocity);
    if (lambda2_probe && *lambda2_probe)
      result.trace.lambda2.push_back((*lambda2_probe)(e));
  };

  double t = 0.0;
  record(t, ensemble);
  const auto n_steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-12));
  for (long step = 0; step < n_steps; ++step) {
    const double dt = std::min(config.dt, config.t_end - t);
    if (config.integrator == Integrator::Euler) {
      rhs(ensemble, vk1);
      for (size_t k = 0; k < nd; ++k) {
        ensemble.pos[k] += dt * ensemble.vel[k];
        ensemble.vel[k] += dt * vk1[k];
      }
    } else {
      // classical RK4 on (x, v); stages keep unwrapped positions, the
      // minimum-image metric absorbs cell exits
      rhs(ensemble, vk1);
      std::copy(ensemble.vel.begin(), ensemble.vel.end(), k1.begin());

      for (size_t k = 0; k < nd; ++k) {
        stage.pos[k] = ensemble.pos[k] + 0.5 * dt * k1[k];
        stage.vel[k] = ensemble.vel[k] + 0.5 * dt * vk1[k];
      }
      rhs(stage, vk2);
      std::copy(stage.vel.begin(), stage.vel.end(), k2.begin());

      for (size_t k = 0; k < nd; ++k) {
        stage.pos[k] = ensemble.pos[k] + 0.5 * dt * k2[k];
        stage.vel[k] = ensemble.vel[k] + 0.5 * dt * vk2[k];
      }
      rhs(stage, vk3);
      std::copy(stage.vel.begin(), stage.vel.end(), k3.begin());

      for (size_t k = 0; k < nd; ++k) {
        stage.pos[k] = ensemble.pos[k] + dt * k3[k];
        stage.vel[k] = ensemble.vel[k] + dt * vk3[k];
      }
      rhs(stage, vk4);
      std::copy(stage.vel.begin(), stage.vel.end(), k4.begin());

      for (size_t k = 0; k < nd; ++k) {
        ensemble.pos[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        ensemble.vel[k] += dt / 6.0 * (vk1[k] + 2.0 * vk2[k] + 2.0 * vk3[k] + vk4[k]);
      }
    }
    ensemble.wrap_positions();
    t += dt;

    if (!state_ok(ensemble, config.velocity_cap)) {
      result.blow_up = BlowUp{t, "non-finite state or velocity cap exceeded"};
      break;
    }
    if ((step + 1) % config.record_every == 0 || step + 1 == n_steps) record(t, ensemble);
  }

  result.final_state = std::move(ensemble);
  return result;
}

}  // namespace

SimResult simulate(Ensemble ensemble, const Kernel& kernel, const SimConfig& config) {
  const double tau = config.tau;
  const PairPath path = config.pair_path;
  Rhs rhs = [&kernel, tau, path](const Ensemble& e, std::span<double> a) {
    cs_rhs(e, kernel, tau, a, path);
  };
  return run_sim(std::move(ensemble), config, rhs, nullptr);
}

SimResult simulate(Ensemble ensemble, const MatrixKernel& mkernel, const SimConfig& config) {
  const double tau = config.tau;
  Rhs rhs = [&mkernel, tau](const Ensemble& e, std::span<double> a) {
    three_zone_rhs(e, mkernel, tau, a);
  };
  return run_sim(std::move(ensemble), config, rhs, nullptr);
}

SimResult simulate_with_probe(Ensemble ensemble, const Kernel& kernel, const SimConfig& config,
                              const std::function<double(const Ensemble&)>& lambda2_probe) {
  const double tau = config.tau;
  const PairPath path = config.pair_path;
  Rhs rhs = [&kernel, tau, path](const Ensemble& e, std::span<double> a) {
    cs_rhs(e, kernel, tau, a, path);
  };
  return run_sim(std::move(ensemble), config, rhs, &lambda2_probe);
}

Ensemble random_uniform_ensemble(const Domain& domain, int n, double pos_half_width,
                                 double vel_half_width, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_uniform_ensemble: n must be positive");
  Ensemble e;
  e.domain = domain;
  e.n = n;
  const int d = domain.dim;
  e.pos.resize(static_cast<size_t>(n) * d);
  e.vel.resize(static_cast<size_t>(n) * d);
  std::mt19937_64 rng(seed);
  // positions first, then velocities: the draw order is part of the contract
  if (domain.is_torus()) {
    std::uniform_real_distribution<double> px(0.0, domain.period);
    for (auto& x : e.pos) x = px(rng);
  } else {
    std::uniform_real_distribution<double> px(-pos_half_width, pos_half_width);
    for (auto& x : e.pos) x = px(rng);
  }
  std::uniform_real_distribution<double> pv(-vel_half_width, vel_half_width);
  for (auto& v : e.vel) v = pv(rng);
  return e;
}

Ensemble two_cluster_ensemble(const Domain& domain, int n, double separation,
                              double closing_speed, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("two_cluster_ensemble: n must be >= 2");
  Ensemble e;
  e.domain = domain;
  e.n = n;
  const int d = domain.dim;
  e.pos.assign(static_cast<size_t>(n) * d, 0.0);
  e.vel.assign(static_cast<size_t>(n) * d, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1 * separation, 0.1 * separation);
  for (int i = 0; i < n; ++i) {
    const double side = i < n / 2 ? -1.0 : 1.0;
    e.pos[static_cast<size_t>(i) * d] = side * 0.5 * separation + jitter(rng);
    for (int c = 1; c < d; ++c) e.pos[static_cast<size_t>(i) * d + c] = jitter(rng);
    e.vel[static_cast<size_t>(i) * d] = -side * closing_speed;
  }
  if (domain.is_torus()) {
    for (auto& x : e.pos) x = domain.wrap_position(x + 0.5 * domain.period);
  }
  return e;
}

}  // namespace swarm
