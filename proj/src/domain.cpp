#include "swarm/domain.hpp"

#include <cmath>

namespace swarm {

Domain Domain::torus(int dim, double period) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("Domain: dim must be 1, 2 or 3");
  if (!(period > 0.0)) throw std::invalid_argument("Domain: torus period must be positive");
  return Domain{Kind::Torus, dim, period};
}

Domain Domain::free_space(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("Domain: dim must be 1, 2 or 3");
  return Domain{Kind::Free, dim, 0.0};
}

double Domain::wrap_delta(double delta) const {
  if (kind == Kind::Free) return delta;
  // nearest periodic image; round-half-away ties keep the map deterministic
  return delta - period * std::round(delta / period);
}

double Domain::wrap_position(double x) const {
  if (kind == Kind::Free) return x;
  double y = std::fmod(x, period);
  if (y < 0.0) y += period;
  if (y >= period) y = 0.0;  // guard against fmod rounding to L
  return y;
}

void displacement(const Domain& domain, std::span<const double> x,
                  std::span<const double> xp, std::span<double> out) {
  const auto d = static_cast<size_t>(domain.dim);
  if (x.size() != d || xp.size() != d || out.size() != d)
    throw std::invalid_argument("displacement: dimension mismatch");
  for (size_t i = 0; i < d; ++i) out[i] = domain.wrap_delta(xp[i] - x[i]);
}

double metric_distance(const Domain& domain, std::span<const double> x,
                       std::span<const double> xp) {
  const auto d = static_cast<size_t>(domain.dim);
  if (x.size() != d || xp.size() != d)
    throw std::invalid_argument("metric_distance: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < d; ++i) {
    const double delta = domain.wrap_delta(xp[i] - x[i]);
    s += delta * delta;
  }
  return std::sqrt(s);
}

}  // namespace swarm
