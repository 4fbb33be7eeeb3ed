#ifndef SWARM_LINALG_HPP
#define SWARM_LINALG_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace swarm {

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns match values
};

/// Cyclic Jacobi rotation eigensolver for dense symmetric matrices.
/// Self-contained reference path; quadratic convergence makes it an
/// exactness oracle at small n.
EigenPairs jacobi_eigen(const Eigen::MatrixXd& A, double tol = 1e-14, int max_sweeps = 64);

struct IterativeEig {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Second-smallest eigenvalue of a symmetric PSD operator by power iteration
/// on the spectral complement: iterate B = s I - A with the known null-ish
/// directions in `deflate` projected out each step; s is an upper bound for
/// the spectrum estimated by a short power run on A itself.
IterativeEig deflated_second_smallest(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply, int n,
    const std::vector<Eigen::VectorXd>& deflate, double tol = 1e-10, int max_iters = 200000);

IterativeEig deflated_second_smallest(const Eigen::MatrixXd& A,
                                      const std::vector<Eigen::VectorXd>& deflate,
                                      double tol = 1e-10, int max_iters = 200000);

}  // namespace swarm

#endif
