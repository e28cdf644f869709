#include "adaptnet/signal_model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adaptnet {

double NodeProfile::trace_ru() const {
  return std::accumulate(regressor_spectrum.begin(), regressor_spectrum.end(),
                         0.0);
}

double NodeProfile::zeta_norm2() const {
  double s = 0.0;
  for (const double z : regressor_spectrum) s += z * z;
  return s;
}

void NodeProfile::validate() const {
  if (noise_variance < 0.0)
    throw std::invalid_argument("noise_variance must be >= 0");
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be > 0");
  if (regressor_spectrum.empty())
    throw std::invalid_argument("regressor_spectrum must be nonempty");
  for (const double z : regressor_spectrum)
    if (!(z > 0.0))
      throw std::invalid_argument("regressor spectrum entries must be > 0");
}

std::vector<double> make_true_parameter(int m) {
  if (m < 1) throw std::invalid_argument("parameter length must be >= 1");
  return std::vector<double>(m, 1.0 / std::sqrt(2.0));
}

DataSample sample(const NodeProfile& profile, std::span<const double> w0,
                  Rng& rng) {
  const std::size_t m = profile.regressor_spectrum.size();
  if (w0.size() != m)
    throw std::invalid_argument("w0 length does not match spectrum length");
  DataSample s;
  s.regressor.resize(m);
  for (std::size_t k = 0; k < m; ++k)
    s.regressor[k] = std::sqrt(profile.regressor_spectrum[k]) * rng.gaussian();
  const double noise = std::sqrt(profile.noise_variance) * rng.gaussian();
  s.measurement = dot(s.regressor, w0) + noise;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace adaptnet
