#ifndef NAMLITE_GATES_HPP
#define NAMLITE_GATES_HPP

#include <cstddef>

namespace namlite {

// Cubic smooth-step: exactly 0 for mu <= -gamma/2, exactly 1 for
// mu >= gamma/2, and -(2/gamma^3) mu^3 + (3/(2 gamma)) mu + 1/2 in between.
// ConfigError if gamma <= 0.
double smooth_step(double mu, double gamma);

// Derivative of smooth_step in mu; zero outside the open interval.
double smooth_step_grad(double mu, double gamma);

// min(N/B * 1/250 * 16/d, 1).
double default_gamma(std::size_t n_samples, int batch_size, int hidden_dim);

}  // namespace namlite

#endif  // NAMLITE_GATES_HPP
