#ifndef SWARM_NUMERIC_HPP
#define SWARM_NUMERIC_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace swarm {

/// Kahan compensated accumulator. Fixed summation order in the callers
/// keeps pairwise reductions bit-reproducible across runs.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline double kahan_total(std::span<const double> xs) {
  KahanSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

/// Trapezoid integral of samples y(t) on a (possibly non-uniform) grid,
/// returned cumulatively: out[k] = integral from t[0] to t[k].
std::vector<double> cumulative_trapezoid(std::span<const double> t,
                                         std::span<const double> y);

/// Smallest eigenvalue of a symmetric 2x2 matrix [[a, b], [b, c]].
inline double sym2_eig_min(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  return mean - disc;
}

/// Smallest eigenvalue of a symmetric 3x3 matrix (row-major, 9 entries),
/// by Jacobi rotations on the 3x3 block.
double sym3_eig_min(const double m[9]);

}  // namespace swarm

#endif
