#include "swarm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace swarm {

EigenPairs jacobi_eigen(const Eigen::MatrixXd& A, double tol, int max_sweeps) {
  if (A.rows() != A.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  const auto n = A.rows();
  Eigen::MatrixXd M = 0.5 * (A + A.transpose());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, M.norm());

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * M(p, q) * M(p, q);
    if (std::sqrt(off) <= tol * scale) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = M(p, q);
        if (apq == 0.0) continue;
        const double theta = (M(q, q) - M(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double mkp = M(k, p), mkq = M(k, q);
          M(k, p) = c * mkp - s * mkq;
          M(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mpk = M(p, k), mqk = M(q, k);
          M(p, k) = c * mpk - s * mqk;
          M(q, k) = s * mpk + c * mqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return M(a, a) < M(b, b); });

  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = M(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]);
    out.vectors.col(k) = V.col(order[static_cast<size_t>(k)]);
  }
  return out;
}

namespace {

Eigen::VectorXd seeded_start(int n) {
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

void project_out(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
  for (const auto& b : basis) v -= b.dot(v) * b;
}

}  // namespace

IterativeEig deflated_second_smallest(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply, int n,
    const std::vector<Eigen::VectorXd>& deflate, double tol, int max_iters) {
  if (n < 2) throw std::invalid_argument("deflated_second_smallest: need n >= 2");

  // orthonormal deflation basis
  std::vector<Eigen::VectorXd> basis;
  for (const auto& d : deflate) {
    Eigen::VectorXd b = d;
    project_out(b, basis);
    const double norm = b.norm();
    if (norm > 1e-14) basis.push_back(b / norm);
  }

  Eigen::VectorXd tmp(n);

  // spectral upper bound from a short power run on the operator itself
  Eigen::VectorXd v = seeded_start(n);
  v.normalize();
  double s = 1.0;
  for (int it = 0; it < 60; ++it) {
    apply(v, tmp);
    const double norm = tmp.norm();
    if (norm < 1e-300) break;
    s = std::max(s, v.dot(tmp));
    v = tmp / norm;
  }
  apply(v, tmp);
  s = 1.05 * std::max(s, v.dot(tmp)) + 1e-12;

  // power iteration on s I - A restricted to the deflation complement
  v = seeded_start(n);
  project_out(v, basis);
  v.normalize();
  IterativeEig out;
  out.vector = v;
  const double scale = std::max(1.0, s);
  for (int it = 0; it < max_iters; ++it) {
    apply(v, tmp);
    const double mu = v.dot(tmp);
    const double residual = (tmp - mu * v).norm();
    if (residual <= tol * scale) {
      out.value = mu;
      out.vector = v;
      out.residual = residual;
      out.converged = true;
      out.iterations = it;
      return out;
    }
    Eigen::VectorXd w = s * v - tmp;
    project_out(w, basis);
    const double norm = w.norm();
    if (norm < 1e-300) break;
    v = w / norm;
    out.value = mu;
    out.vector = v;
    out.residual = residual;
    out.iterations = it;
  }
  apply(v, tmp);
  out.value = v.dot(tmp);
  out.residual = (tmp - out.value * v).norm();
  out.vector = v;
  out.converged = out.residual <= tol * scale;
  return out;
}

IterativeEig deflated_second_smallest(const Eigen::MatrixXd& A,
                                      const std::vector<Eigen::VectorXd>& deflate, double tol,
                                      int max_iters) {
  auto apply = [&A](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = A * x; };
  return deflated_second_smallest(apply, static_cast<int>(A.rows()), deflate, tol, max_iters);
}

}  // namespace swarm
