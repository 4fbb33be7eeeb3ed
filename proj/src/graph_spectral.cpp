#include "swarm/graph_spectral.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "swarm/linalg.hpp"
#include "swarm/numeric.hpp"

namespace swarm {

WeightedGraph adjacency(const Ensemble& ensemble, const Kernel& kernel, bool scale_by_n) {
  const int n = ensemble.n;
  WeightedGraph g;
  g.scale_by_n = scale_by_n;
  g.weights = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = kernel.depends_on_crowd()
                           ? kernel_value_topological(kernel, ensemble.domain, ensemble.pos,
                                                      ensemble.n, ensemble.position(i),
                                                      ensemble.position(j))
                           : kernel_value(kernel, ensemble.domain, ensemble.position(i),
                                          ensemble.position(j));
      g.weights(i, j) = w;
      g.weights(j, i) = w;
    }
  }
  return g;
}

Eigen::MatrixXd graph_laplacian(const WeightedGraph& graph) {
  const int n = graph.size();
  Eigen::MatrixXd lap = -graph.weights;
  for (int i = 0; i < n; ++i) {
    KahanSum degree;
    for (int j = 0; j < n; ++j)
      if (j != i) degree.add(graph.weights(i, j));
    lap(i, i) = degree.value();
  }
  if (graph.scale_by_n && n > 0) lap /= static_cast<double>(n);
  return lap;
}

SpectralGapReport fiedler(const Eigen::MatrixXd& laplacian) {
  const auto n = laplacian.rows();
  if (n < 1) throw std::invalid_argument("fiedler: empty matrix");
  SpectralGapReport report;
  if (n == 1) {
    report.lambda2 = 0.0;
    report.fiedler_vector = Eigen::VectorXd::Zero(1);
    report.connected = true;
    return report;
  }

  if (n <= kJacobiMaxN) {
    const auto pairs = jacobi_eigen(laplacian);
    report.lambda2 = pairs.values(1);
    report.fiedler_vector = pairs.vectors.col(1);
    report.residual =
        (laplacian * report.fiedler_vector - report.lambda2 * report.fiedler_vector).norm();
  } else {
    const Eigen::VectorXd ones =
        Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const auto eig = deflated_second_smallest(laplacian, {ones});
    if (!eig.converged)
      throw std::runtime_error("fiedler: eigensolver did not converge, residual " +
                               std::to_string(eig.residual));
    report.lambda2 = eig.value;
    report.fiedler_vector = eig.vector;
    report.residual = eig.residual;
  }

  if (report.lambda2 < 0.0 && report.lambda2 >= -1e-10) {
    report.lambda2 = 0.0;
    report.clamped = true;
  }
  report.connected = report.lambda2 > 1e-10;
  return report;
}

int combinatorial_components(const WeightedGraph& graph) {
  const int n = graph.size();
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (graph.weights(i, j) > 0.0) {
        const int ra = find(i), rb = find(j);
        if (ra != rb) parent[static_cast<size_t>(ra)] = rb;
      }
  int components = 0;
  for (int i = 0; i < n; ++i)
    if (find(i) == i) ++components;
  return components;
}

CertificateResult decay_certificate(const EnergyTrace& trace, double tau, double eps_cert) {
  if (trace.lambda2.size() != trace.times.size() || trace.delta_e.size() != trace.times.size())
    throw std::invalid_argument("decay_certificate: trace series on mismatched grids");
  return exponential_decay_certificate(trace.times, trace.delta_e, trace.lambda2, -2.0 * tau,
                                       eps_cert);
}

std::function<double(const Ensemble&)> lambda2_probe(const Kernel& kernel) {
  return [kernel](const Ensemble& e) {
    return fiedler(graph_laplacian(adjacency(e, kernel))).lambda2;
  };
}

}  // namespace swarm
