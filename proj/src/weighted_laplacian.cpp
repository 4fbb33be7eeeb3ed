#include "swarm/weighted_laplacian.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "swarm/linalg.hpp"
#include "swarm/numeric.hpp"

namespace swarm {

WeightedLaplacian assemble_weighted_laplacian(std::span<const double> rho, const Kernel& kernel,
                                              const SpectralGrid& grid) {
  const size_t cells = grid.cells();
  if (rho.size() != cells)
    throw std::invalid_argument("assemble_weighted_laplacian: density size mismatch");
  for (double r : rho)
    if (!(r >= 0.0))
      throw std::invalid_argument("assemble_weighted_laplacian: density must be non-negative");

  WeightedLaplacian lap;
  lap.grid = grid;
  lap.rho.assign(rho.begin(), rho.end());

  const int ny = grid.dim() > 1 ? grid.dims[1] : 1;
  const double vol = grid.cell_volume();
  const auto n = static_cast<Eigen::Index>(cells);

  std::vector<double> sqrt_rho(cells);
  for (size_t a = 0; a < cells; ++a) sqrt_rho[a] = std::sqrt(rho[a]);

  lap.matrix.resize(n, n);
  auto cell_split = [ny](size_t a) { return std::pair<int, int>(static_cast<int>(a) / ny, static_cast<int>(a) % ny); };
  for (size_t a = 0; a < cells; ++a) {
    const auto [ai, aj] = cell_split(a);
    KahanSum diag;  // (phi * rho)(x_a) by the same direct sum as the row
    for (size_t b = 0; b < cells; ++b) {
      const auto [bi, bj] = cell_split(b);
      const double phi = kernel(grid.offset_distance(ai - bi, aj - bj)) * vol;
      diag.add(phi * rho[b]);
      if (a != b) lap.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          -phi * sqrt_rho[a] * sqrt_rho[b];
    }
    const auto [ci, cj] = cell_split(a);
    const double phi_self = kernel(grid.offset_distance(ci - ci, cj - cj)) * vol;
    lap.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) =
        diag.value() - phi_self * rho[a];
  }
  // enforce exact symmetry against accumulation-order differences
  lap.matrix = 0.5 * (lap.matrix + lap.matrix.transpose()).eval();
  return lap;
}

namespace {

Eigen::VectorXd sqrt_rho_vector(std::span<const double> rho) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(rho.size()));
  for (size_t a = 0; a < rho.size(); ++a) v(static_cast<Eigen::Index>(a)) = std::sqrt(rho[a]);
  return v;
}

}  // namespace

Lambda2Result lambda2_weighted(const WeightedLaplacian& lap) {
  const auto n = lap.matrix.rows();
  Lambda2Result out;
  if (n < 2) throw std::invalid_argument("lambda2_weighted: need at least 2 cells");

  if (n <= kWeightedJacobiMaxN) {
    const auto pairs = jacobi_eigen(lap.matrix);
    out.value = pairs.values(1);
    out.vector = pairs.vectors.col(1);
  } else if (n <= kWeightedDenseMaxN) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap.matrix);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("lambda2_weighted: dense eigensolver failed");
    out.value = solver.eigenvalues()(1);
    out.vector = solver.eigenvectors().col(1);
  } else {
    const auto eig = deflated_second_smallest(lap.matrix, {sqrt_rho_vector(lap.rho)});
    if (!eig.converged)
      throw std::runtime_error("lambda2_weighted: iterative eigensolver did not converge");
    out.value = eig.value;
    out.vector = eig.vector;
  }
  out.residual = (lap.matrix * out.vector - out.value * out.vector).norm();
  return out;
}

Lambda2Result lambda2_operator(std::span<const double> rho, Convolution& conv) {
  const size_t cells = conv.grid().cells();
  if (rho.size() != cells) throw std::invalid_argument("lambda2_operator: density size mismatch");

  std::vector<double> conv_rho(cells);
  conv.apply(rho, conv_rho);
  const Eigen::VectorXd sr = sqrt_rho_vector(rho);

  std::vector<double> buf_in(cells), buf_out(cells);
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    for (size_t a = 0; a < cells; ++a) buf_in[a] = sr(static_cast<Eigen::Index>(a)) * x(static_cast<Eigen::Index>(a));
    conv.apply(buf_in, buf_out);
    y.resize(static_cast<Eigen::Index>(cells));
    for (size_t a = 0; a < cells; ++a)
      y(static_cast<Eigen::Index>(a)) = conv_rho[a] * x(static_cast<Eigen::Index>(a)) -
                                        sr(static_cast<Eigen::Index>(a)) * buf_out[a];
  };

  const auto eig = deflated_second_smallest(apply, static_cast<int>(cells), {sr});
  if (!eig.converged)
    throw std::runtime_error("lambda2_operator: eigensolver did not converge, residual " +
                             std::to_string(eig.residual));
  Lambda2Result out;
  out.value = eig.value;
  out.vector = eig.vector;
  out.residual = eig.residual;
  return out;
}

GapBoundReport verify_gap_bound(double lambda2, double sigma, std::span<const double> rho) {
  GapBoundReport report;
  report.lambda2 = lambda2;
  report.sigma = sigma;
  report.rho_minus = *std::min_element(rho.begin(), rho.end());
  report.rho_plus = *std::max_element(rho.begin(), rho.end());
  report.c_rho = report.rho_plus > 0.0 ? report.rho_minus / report.rho_plus : 0.0;
  report.bound = 0.5 * sigma * report.c_rho * report.rho_minus;
  report.pass = lambda2 >= report.bound - 1e-10;
  report.margin_factor = report.bound > 0.0 ? lambda2 / report.bound
                                            : std::numeric_limits<double>::infinity();
  return report;
}

KineticCheck kinetic_fluctuation_check(const WeightedLaplacian& lap,
                                       std::span<const std::vector<double>> u_components) {
  const size_t cells = lap.rho.size();
  const double vol = lap.grid.cell_volume();
  KineticCheck check;
  check.lambda2 = lambda2_weighted(lap).value;

  KahanSum mass;
  for (double r : lap.rho) mass.add(r);
  const double m0 = mass.value() * vol;
  if (!(m0 > 0.0)) throw std::invalid_argument("kinetic_fluctuation_check: vacuum total mass");

  double lhs = 0.0;
  double plain = 0.0;  // integral of |u - u'|^2 rho rho'
  for (const auto& w : u_components) {
    if (w.size() != cells)
      throw std::invalid_argument("kinetic_fluctuation_check: field size mismatch");
    Eigen::VectorXd x(static_cast<Eigen::Index>(cells));
    KahanSum sw, sw2;
    for (size_t a = 0; a < cells; ++a) {
      x(static_cast<Eigen::Index>(a)) = std::sqrt(lap.rho[a]) * w[a];
      sw.add(lap.rho[a] * w[a]);
      sw2.add(lap.rho[a] * w[a] * w[a]);
    }
    lhs += 2.0 * vol * x.dot(lap.matrix * x);
    const double int_rw = sw.value() * vol;
    const double int_rw2 = sw2.value() * vol;
    plain += 2.0 * (m0 * int_rw2 - int_rw * int_rw);
  }
  check.lhs = lhs;
  check.rhs = check.lambda2 / m0 * plain;
  check.margin = check.lhs - check.rhs;
  return check;
}

void write_triplets(const WeightedLaplacian& lap, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_triplets: cannot open " + path.string());
  const auto n = lap.matrix.rows();
  char buf[96];
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = lap.matrix(i, j);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n", static_cast<long long>(i),
                    static_cast<long long>(j), v);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write_triplets: write failed for " + path.string());
}

}  // namespace swarm
