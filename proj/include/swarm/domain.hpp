#ifndef SWARM_DOMAIN_HPP
#define SWARM_DOMAIN_HPP

#include <span>
#include <stdexcept>
#include <string>

namespace swarm {

/// Ambient space of positions: either free space R^d or the flat torus [0,L)^d.
struct Domain {
  enum class Kind { Torus, Free };

  Kind kind = Kind::Torus;
  int dim = 1;
  double period = 0.0;  // cell edge length L, torus only

  static Domain torus(int dim, double period);
  static Domain free_space(int dim);

  bool is_torus() const { return kind == Kind::Torus; }

  /// Signed minimum-image offset of a scalar coordinate difference.
  double wrap_delta(double delta) const;

  /// Reduce a coordinate into the fundamental cell [0, L).
  double wrap_position(double x) const;
};

/// Componentwise displacement x' - x under the domain metric
/// (minimum image on the torus). Writes dim components into out.
void displacement(const Domain& domain, std::span<const double> x,
                  std::span<const double> xp, std::span<double> out);

/// Distance between two points: Euclidean in free space, minimum-image
/// on the torus. Throws std::invalid_argument on dimension mismatch.
double metric_distance(const Domain& domain, std::span<const double> x,
                       std::span<const double> xp);

}  // namespace swarm

#endif
