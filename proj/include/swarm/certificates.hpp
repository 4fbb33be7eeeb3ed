#ifndef SWARM_CERTIFICATES_HPP
#define SWARM_CERTIFICATES_HPP

#include <span>
#include <string>

namespace swarm {

struct CertificateResult {
  bool pass = false;
  double worst_margin = 0.0;  // max over samples of value/bound - 1
  double worst_time = 0.0;
  std::string detail;
};

/// Verify value(t) <= value(0) * exp(rate_scale * int_0^t rate(s) ds) * (1 + eps)
/// at every sample, with the integral by trapezoid on the recorded grid.
/// value(0) == 0 passes vacuously.
CertificateResult exponential_decay_certificate(std::span<const double> times,
                                                std::span<const double> values,
                                                std::span<const double> rates,
                                                double rate_scale, double eps_cert);

}  // namespace swarm

#endif
