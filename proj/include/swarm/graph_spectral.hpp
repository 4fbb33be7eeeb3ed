#ifndef SWARM_GRAPH_SPECTRAL_HPP
#define SWARM_GRAPH_SPECTRAL_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "swarm/certificates.hpp"
#include "swarm/kernels.hpp"
#include "swarm/particles.hpp"

namespace swarm {

/// Time-slice of the communication graph: symmetric non-negative weights
/// with zero diagonal. When scale_by_n is set, graph_laplacian() returns
/// (1/N) (D - W); the complete unit graph then has spectral gap exactly 1,
/// matching the mean-field decay rate exp(-2 tau t) of the fluctuations.
struct WeightedGraph {
  Eigen::MatrixXd weights;
  bool scale_by_n = true;

  int size() const { return static_cast<int>(weights.rows()); }
};

WeightedGraph adjacency(const Ensemble& ensemble, const Kernel& kernel,
                        bool scale_by_n = true);

Eigen::MatrixXd graph_laplacian(const WeightedGraph& graph);

struct SpectralGapReport {
  double lambda2 = 0.0;
  Eigen::VectorXd fiedler_vector;
  bool connected = false;
  double residual = 0.0;
  bool clamped = false;  // lambda2 landed in [-1e-10, 0) and was set to 0
};

/// Fiedler value (second-smallest Laplacian eigenvalue) and vector.
/// Dense Jacobi up to kJacobiMaxN rows, deflated power iteration above.
inline constexpr int kJacobiMaxN = 256;
SpectralGapReport fiedler(const Eigen::MatrixXd& laplacian);

/// Number of connected components of the positive-weight edge set
/// (union-find; the combinatorial counterpart of lambda2 > 0).
int combinatorial_components(const WeightedGraph& graph);

/// Check the fluctuation-decay certificate along a recorded trace:
///   deltaE(t) <= exp(-2 tau int_0^t lambda2(s) ds) deltaE(0) (1 + eps),
/// with the integral by trapezoid on the recorded grid.
CertificateResult decay_certificate(const EnergyTrace& trace, double tau,
                                    double eps_cert = 1e-6);

/// Probe for simulate_with_probe(): Fiedler value of the (1/N)-scaled
/// Laplacian of the instantaneous communication graph.
std::function<double(const Ensemble&)> lambda2_probe(const Kernel& kernel);

}  // namespace swarm

#endif
