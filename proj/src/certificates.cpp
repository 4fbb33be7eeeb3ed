#include "swarm/certificates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "swarm/numeric.hpp"

namespace swarm {

CertificateResult exponential_decay_certificate(std::span<const double> times,
                                                std::span<const double> values,
                                                std::span<const double> rates,
                                                double rate_scale, double eps_cert) {
  if (times.size() != values.size() || times.size() != rates.size())
    throw std::invalid_argument("exponential_decay_certificate: mismatched series");
  if (times.empty()) throw std::invalid_argument("exponential_decay_certificate: empty series");

  CertificateResult result;
  const double v0 = values.front();
  if (v0 == 0.0) {
    result.pass = true;
    result.detail = "vacuous: initial value is zero";
    return result;
  }

  const auto integral = cumulative_trapezoid(times, rates);
  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = times.front();
  for (size_t k = 0; k < times.size(); ++k) {
    const double bound = v0 * std::exp(rate_scale * integral[k]);
    const double margin = values[k] / bound - 1.0;
    if (margin > worst) {
      worst = margin;
      worst_t = times[k];
    }
  }
  result.worst_margin = worst;
  result.worst_time = worst_t;
  result.pass = worst <= eps_cert;
  return result;
}

}  // namespace swarm
