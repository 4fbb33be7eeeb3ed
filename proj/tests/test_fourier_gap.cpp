#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "swarm/fourier_gap.hpp"
#include "swarm/numeric.hpp"

using namespace swarm;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Independent Bessel oracle: 1000-point trapezoid of the integral
/// representation (1/pi) int_0^pi cos(n theta - x sin theta) dtheta.
double bessel_oracle(double x, int order) {
  const int n = 1000;
  KahanSum acc;
  for (int i = 0; i <= n; ++i) {
    const double theta = kPi * i / n;
    const double f = std::cos(order * theta - x * std::sin(theta));
    acc.add((i == 0 || i == n) ? 0.5 * f : f);
  }
  return acc.value() * (kPi / n) / kPi;
}
}  // namespace

TEST_CASE("Bessel functions") {
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(bessel_j1(1.0) == doctest::Approx(bessel_oracle(1.0, 1)).epsilon(1e-12));
  CHECK(bessel_j1(1.0) == doctest::Approx(0.440050586).epsilon(1e-9));
  CHECK(bessel_j1(2.0) == doctest::Approx(0.576724808).epsilon(1e-9));
  CHECK(bessel_j0(0.0) == doctest::Approx(1.0));
  for (double x : {0.3, 2.7, 7.9, 8.1, 15.0, 40.0}) {
    CHECK(bessel_j0(x) == doctest::Approx(bessel_oracle(x, 0)).epsilon(1e-12));
    CHECK(bessel_j1(x) == doctest::Approx(bessel_oracle(x, 1)).epsilon(1e-12));
  }
}

TEST_CASE("Fourier coefficients of radial kernels") {
  const Domain t1 = Domain::torus(1, kTwoPi);
  const Kernel ind = normalize_kernel(Kernel::indicator(1.0), t1);

  SUBCASE("unit mass at k = 0") {
    CHECK(fourier_coefficient(ind, t1, {0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("1D indicator: c(k) = sin(k)/k") {
    CHECK(fourier_coefficient(ind, t1, {1, 0}) ==
          doctest::Approx(std::sin(1.0)).epsilon(1e-14));
    CHECK(fourier_coefficient(ind, t1, {2, 0}) ==
          doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-14));
  }
  SUBCASE("coefficients are even in k, bit-exactly") {
    const Kernel ft = normalize_kernel(Kernel::fat_tail(0.5), t1);
    for (int k = 1; k <= 12; ++k) {
      CHECK(fourier_coefficient(ft, t1, {k, 0}) == fourier_coefficient(ft, t1, {-k, 0}));
    }
  }
  SUBCASE("free-space domains are rejected") {
    CHECK_THROWS_AS((void)fourier_coefficient(ind, Domain::free_space(1), {1, 0}),
                    std::invalid_argument);
  }
  SUBCASE("smooth kernel: radial reduction matches the grid sum") {
    const Kernel ft = normalize_kernel(Kernel::fat_tail(0.5), t1);
    for (int k : {1, 2, 5}) {
      const double radial = fourier_coefficient(ft, t1, {k, 0});
      const double grid = grid_coefficient(ft, t1, {k, 0}, 1 << 14);
      CHECK(radial == doctest::Approx(grid).epsilon(1e-7));
    }
  }
  SUBCASE("2D indicator: c(k) = 2 J1(|k|)/|k|") {
    const Domain t2 = Domain::torus(2, kTwoPi);
    const Kernel ind2 = normalize_kernel(Kernel::indicator(1.0), t2);
    CHECK(fourier_coefficient(ind2, t2, {1, 0}) ==
          doctest::Approx(2.0 * bessel_j1(1.0)).epsilon(1e-12));
    const double k_mag = std::sqrt(5.0);
    CHECK(fourier_coefficient(ind2, t2, {1, 2}) ==
          doctest::Approx(2.0 * bessel_j1(k_mag) / k_mag).epsilon(1e-12));
    CHECK(fourier_coefficient(ind2, t2, {0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("2D compact non-indicator profile agrees with a tensor-grid oracle") {
    // the grid oracle converges slowly across the support jump, so compare
    // loosely and confirm it approaches the radial value under refinement
    const Domain t2 = Domain::torus(2, kTwoPi);
    const Kernel inc = normalize_kernel(Kernel::increasing_compact(1.0), t2);
    const double radial = fourier_coefficient(inc, t2, {1, 1});
    const double grid = grid_coefficient(inc, t2, {1, 1}, 1 << 11);
    CHECK(radial == doctest::Approx(grid).epsilon(1e-3));
  }
}

TEST_CASE("sigma_phi") {
  const Domain t1 = Domain::torus(1, kTwoPi);

  SUBCASE("1D indicator: sigma = 1 - sin(1)") {
    const Kernel ind = normalize_kernel(Kernel::indicator(1.0), t1);
    const auto result = sigma_phi(ind, t1, 64);
    CHECK(result.sigma == doctest::Approx(1.0 - std::sin(1.0)).epsilon(1e-12));
    CHECK(result.argmax_mode[0] == 1);
    CHECK(result.tail_bound < result.max_coefficient);
    CHECK(result.sigma > 0.0);
    CHECK(result.sigma <= 1.0);
  }
  SUBCASE("constant kernel: all nonzero modes vanish, sigma = 1") {
    const Kernel constant = normalize_kernel(Kernel::constant(1.0), t1);
    const auto result = sigma_phi(constant, t1, 16);
    CHECK(result.sigma == doctest::Approx(1.0));
  }
  SUBCASE("2D indicator: sigma = 1 - 2 J1(1), argmax at |k| = 1") {
    const Domain t2 = Domain::torus(2, kTwoPi);
    const Kernel ind2 = normalize_kernel(Kernel::indicator(1.0), t2);
    const auto result = sigma_phi(ind2, t2, 16);
    CHECK(result.sigma == doctest::Approx(1.0 - 2.0 * bessel_j1(1.0)).epsilon(1e-10));
    CHECK(result.sigma == doctest::Approx(0.11990).epsilon(1e-4));
    const double norm2 = result.argmax_mode[0] * result.argmax_mode[0] +
                         result.argmax_mode[1] * result.argmax_mode[1];
    CHECK(norm2 == 1.0);
  }
  SUBCASE("grid convergence: sigma is grid-free for the indicator families") {
    const Kernel ind = normalize_kernel(Kernel::indicator(1.0), t1);
    const auto a = sigma_phi(ind, t1, 64);
    const auto b = sigma_phi(ind, t1, 128);
    CHECK(std::abs(a.sigma - b.sigma) < 1e-10);
  }
  SUBCASE("unnormalized kernels are rejected") {
    CHECK_THROWS_AS((void)sigma_phi(Kernel::indicator(1.0), t1, 8), std::invalid_argument);
  }
  SUBCASE("inconclusive tail bound reports an error demanding larger k_max") {
    // k_max = 1 leaves the certified envelope far above the found maximum
    // for a narrow kernel whose coefficients decay slowly
    const Kernel narrow = normalize_kernel(Kernel::indicator(0.05), t1);
    CHECK_THROWS_AS((void)sigma_phi(narrow, t1, 1), std::runtime_error);
  }
  SUBCASE("tail envelope dominates computed coefficients beyond k_max/2") {
    for (const Kernel& raw :
         {Kernel::indicator(1.0), Kernel::fat_tail(0.5), Kernel::increasing_compact(1.3)}) {
      const Kernel k = normalize_kernel(raw, t1);
      for (int mode = 33; mode <= 64; ++mode) {
        const double c = std::abs(fourier_coefficient(k, t1, {mode, 0}));
        const double tv = k.radial_total_variation(t1);
        CHECK(c <= tv / (kTwoPi * mode / kTwoPi) + 1e-12);
      }
    }
  }
}

TEST_CASE("Poincare inequality check") {
  const Domain t1 = Domain::torus(1, kTwoPi);
  const Kernel ind = normalize_kernel(Kernel::indicator(1.0), t1);
  const auto grid = SpectralGrid::make(t1, 128);

  SUBCASE("constant field gives zero margin") {
    std::vector<double> w(grid.cells(), 0.8);
    const auto res = poincare_check(ind, grid, w);
    CHECK(res.lhs == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(res.rhs == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("extremal mode attains near-equality") {
    std::vector<double> w(grid.cells());
    for (int a = 0; a < 128; ++a) w[static_cast<size_t>(a)] = std::cos(grid.center(0, a));
    const auto res = poincare_check(ind, grid, w);
    CHECK(res.margin >= -1e-12);
    CHECK(res.margin <= 1e-10 * std::max(1.0, res.lhs));
  }
  SUBCASE("random band-limited fields keep non-negative margins") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> w(grid.cells(), 0.0);
      for (int m = 1; m <= 10; ++m) {
        const double amp = u(rng);
        const double phase = kPi * u(rng);
        for (int a = 0; a < 128; ++a)
          w[static_cast<size_t>(a)] += amp * std::cos(m * grid.center(0, a) + phase);
      }
      CHECK(poincare_check(ind, grid, w).margin >= -1e-10);
    }
  }
  SUBCASE("Parseval consistency of the plain fluctuation integral") {
    // direct double sum of |w - w'|^2 h^2 against the moment identity used
    // by the check: 2 (L int w^2 - (int w)^2)
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto small = SpectralGrid::make(t1, 64);
    std::vector<double> w(small.cells());
    for (auto& v : w) v = u(rng);
    const double h = small.cell_volume();
    double direct = 0.0;
    for (int a = 0; a < 64; ++a)
      for (int b = 0; b < 64; ++b) {
        const double dw = w[static_cast<size_t>(a)] - w[static_cast<size_t>(b)];
        direct += dw * dw * h * h;
      }
    KahanSum sw, sw2;
    for (double v : w) {
      sw.add(v);
      sw2.add(v * v);
    }
    const double moment = 2.0 * (kTwoPi * sw2.value() * h - (sw.value() * h) * (sw.value() * h));
    CHECK(direct == doctest::Approx(moment).epsilon(1e-10));
  }
}
