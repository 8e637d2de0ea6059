#include "namlite/gates.hpp"

#include <algorithm>

#include "namlite/error.hpp"

namespace namlite {

double smooth_step(double mu, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("smooth-step gamma must be positive");
  const double half = 0.5 * gamma;
  if (mu <= -half) return 0.0;
  if (mu >= half) return 1.0;
  return -2.0 / (gamma * gamma * gamma) * mu * mu * mu + 1.5 / gamma * mu + 0.5;
}

double smooth_step_grad(double mu, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("smooth-step gamma must be positive");
  const double half = 0.5 * gamma;
  if (mu <= -half || mu >= half) return 0.0;
  return -6.0 / (gamma * gamma * gamma) * mu * mu + 1.5 / gamma;
}

double default_gamma(std::size_t n_samples, int batch_size, int hidden_dim) {
  if (n_samples == 0 || batch_size <= 0 || hidden_dim <= 0) {
    throw ConfigError("default_gamma needs positive sample count, batch size and dimension");
  }
  const double iterations = static_cast<double>(n_samples) / batch_size;
  return std::min(iterations / 250.0 * 16.0 / hidden_dim, 1.0);
}

}  // namespace namlite
