#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "swarm/graph_spectral.hpp"
#include "swarm/linalg.hpp"

using namespace swarm;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

WeightedGraph graph_from(const Eigen::MatrixXd& w, bool scaled) {
  WeightedGraph g;
  g.weights = w;
  g.scale_by_n = scaled;
  return g;
}
}  // namespace

TEST_CASE("adjacency") {
  const Domain t1 = Domain::torus(1, kTwoPi);

  SUBCASE("single agent gives the 1x1 zero matrix") {
    Ensemble e;
    e.domain = t1;
    e.n = 1;
    e.pos = {0.5};
    e.vel = {0.0};
    const auto g = adjacency(e, Kernel::constant(1.0));
    CHECK(g.size() == 1);
    CHECK(g.weights(0, 0) == 0.0);
  }
  SUBCASE("two far agents under an indicator kernel are disconnected") {
    Ensemble e;
    e.domain = t1;
    e.n = 2;
    e.pos = {0.0, std::numbers::pi};
    e.vel = {0.0, 0.0};
    const auto g = adjacency(e, normalize_kernel(Kernel::indicator(1.0), t1));
    CHECK(g.weights(0, 1) == 0.0);
    CHECK(combinatorial_components(g) == 2);
    const auto report = fiedler(graph_laplacian(g));
    CHECK(report.lambda2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(!report.connected);
  }
  SUBCASE("constant kernel fills all off-diagonal entries") {
    Ensemble e;
    e.domain = t1;
    e.n = 4;
    e.pos = {0.0, 1.0, 2.0, 3.0};
    e.vel = {0.0, 0.0, 0.0, 0.0};
    const auto g = adjacency(e, Kernel::constant(0.7));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(g.weights(i, j) == (i == j ? 0.0 : 0.7));
  }
}

TEST_CASE("graph Laplacian spectra") {
  SUBCASE("complete graph on 3 vertices, unscaled: eigenvalues {0, 3, 3}") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 3);
    w.diagonal().setZero();
    const auto lap = graph_laplacian(graph_from(w, false));
    const auto pairs = jacobi_eigen(lap);
    CHECK(pairs.values(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pairs.values(1) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(pairs.values(2) == doctest::Approx(3.0).epsilon(1e-13));
  }
  SUBCASE("path graph on 3 vertices, unscaled: eigenvalues {0, 1, 3}") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = w(1, 0) = 1.0;
    w(1, 2) = w(2, 1) = 1.0;
    const auto lap = graph_laplacian(graph_from(w, false));
    const auto pairs = jacobi_eigen(lap);
    CHECK(pairs.values(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pairs.values(1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(pairs.values(2) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(fiedler(lap).lambda2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero weights give the zero matrix") {
    const auto lap = graph_laplacian(graph_from(Eigen::MatrixXd::Zero(4, 4), false));
    CHECK(lap.norm() == 0.0);
  }
  SUBCASE("complete unit graph with 1/N scaling has Fiedler value 1") {
    for (int n : {8, 32, 100}) {
      Eigen::MatrixXd w = Eigen::MatrixXd::Ones(n, n);
      w.diagonal().setZero();
      const auto report = fiedler(graph_laplacian(graph_from(w, true)));
      CHECK(report.lambda2 == doctest::Approx(1.0).epsilon(1e-11));
      CHECK(report.connected);
    }
  }
  SUBCASE("row sums vanish") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(20, 20);
    for (int i = 0; i < 20; ++i)
      for (int j = i + 1; j < 20; ++j) w(i, j) = w(j, i) = u(rng);
    const auto lap = graph_laplacian(graph_from(w, false));
    for (int i = 0; i < 20; ++i) CHECK(std::abs(lap.row(i).sum()) <= 1e-12);
  }
}

TEST_CASE("quadratic-form identity of the graph Laplacian") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 24;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
  const auto lap = graph_laplacian(graph_from(w, false));
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = u(rng) - 0.5;
    double direct = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) direct += 0.5 * w(i, j) * (v(i) - v(j)) * (v(i) - v(j));
    CHECK(v.dot(lap * v) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("connectivity equivalence: algebraic vs combinatorial") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Domain t1 = Domain::torus(1, kTwoPi);
  const Kernel kernel = normalize_kernel(Kernel::indicator(0.35), t1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto e = random_uniform_ensemble(t1, 14, 1.0, 1.0, 1000 + trial);
    const auto g = adjacency(e, kernel);
    const auto report = fiedler(graph_laplacian(g));
    const bool algebraic = report.lambda2 > 1e-10;
    const bool combinatorial = combinatorial_components(g) == 1;
    CHECK(algebraic == combinatorial);
  }
}

TEST_CASE("iterative eigensolver matches dense Jacobi") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {16, 48, 64}) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng) < 0.3 ? u(rng) : 0.0;
    // force connectivity with a ring
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      w(i, j) = w(j, i) = std::max(w(i, j), 0.2);
    }
    const auto lap = graph_laplacian(graph_from(w, true));
    const auto dense = jacobi_eigen(lap);
    const Eigen::VectorXd ones = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    const auto iter = deflated_second_smallest(lap, {ones});
    CHECK(iter.converged);
    CHECK(iter.value == doctest::Approx(dense.values(1)).epsilon(1e-9));
  }
}

TEST_CASE("decay certificate") {
  SUBCASE("constant-rate exact decay passes with tiny margin") {
    EnergyTrace trace;
    const double tau = 1.0;
    for (int k = 0; k <= 100; ++k) {
      const double t = 0.01 * k;
      trace.times.push_back(t);
      trace.delta_e.push_back(std::exp(-2.0 * tau * t));
      trace.lambda2.push_back(1.0);
      trace.diameter.push_back(0.0);
      trace.velocity_diameter.push_back(0.0);
    }
    const auto cert = decay_certificate(trace, tau);
    CHECK(cert.pass);
    CHECK(std::abs(cert.worst_margin) <= 1e-12);
  }
  SUBCASE("disconnected graph degenerates to monotonicity") {
    EnergyTrace trace;
    for (int k = 0; k <= 10; ++k) {
      trace.times.push_back(0.1 * k);
      trace.delta_e.push_back(1.0 - 0.05 * k);  // decreasing
      trace.lambda2.push_back(0.0);
      trace.diameter.push_back(0.0);
      trace.velocity_diameter.push_back(0.0);
    }
    CHECK(decay_certificate(trace, 1.0).pass);
  }
  SUBCASE("zero initial fluctuation passes vacuously") {
    EnergyTrace trace;
    trace.times = {0.0, 1.0};
    trace.delta_e = {0.0, 0.0};
    trace.lambda2 = {1.0, 1.0};
    trace.diameter = {0.0, 0.0};
    trace.velocity_diameter = {0.0, 0.0};
    const auto cert = decay_certificate(trace, 1.0);
    CHECK(cert.pass);
    CHECK(cert.detail.find("vacuous") != std::string::npos);
  }
  SUBCASE("violating trace fails") {
    EnergyTrace trace;
    trace.times = {0.0, 1.0};
    trace.delta_e = {1.0, 0.9};  // decays slower than exp(-2)
    trace.lambda2 = {1.0, 1.0};
    trace.diameter = {0.0, 0.0};
    trace.velocity_diameter = {0.0, 0.0};
    CHECK(!decay_certificate(trace, 1.0).pass);
  }
  SUBCASE("mismatched grids throw") {
    EnergyTrace trace;
    trace.times = {0.0, 1.0};
    trace.delta_e = {1.0, 0.5};
    trace.lambda2 = {1.0};
    CHECK_THROWS_AS((void)decay_certificate(trace, 1.0), std::invalid_argument);
  }
}

TEST_CASE("lambda2 clamps tiny negatives and reports residuals") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(6, 6);
  w.diagonal().setZero();
  auto lap = graph_laplacian(graph_from(w, true));
  const auto report = fiedler(lap);
  CHECK(report.lambda2 >= 0.0);
  CHECK(report.residual <= 1e-10);
}
