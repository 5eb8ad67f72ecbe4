#pragma once

#include "levy/rng.hpp"
#include "levy/types.hpp"

#include <complex>
#include <vector>

namespace levy {

/// Per-particle stability indices. Each particle's driving process has
/// characteristic function exp(-t |xi|^alpha); alpha = 2 is Brownian with
/// covariance 2t.
class NoiseSpec {
 public:
  NoiseSpec() = default;
  explicit NoiseSpec(std::vector<double> per_particle_alpha, bool deterministic = false);
  static NoiseSpec uniform(std::size_t n, double alpha);

  std::size_t size() const { return alpha_.size(); }
  double alpha(std::size_t i) const { return alpha_.at(i); }
  const std::vector<double>& alphas() const { return alpha_; }
  double min_alpha() const;
  bool brownian(std::size_t i) const { return alpha_.at(i) == 2.0; }
  /// Zero noise; used for damped deterministic runs.
  bool deterministic() const { return deterministic_; }

 private:
  std::vector<double> alpha_;
  bool deterministic_ = false;
};

double sample_stable_1d(double alpha, double t, RngStream& rng);

/// Rotationally invariant draw in R^d; alpha = 2 dispatches to the Gaussian path.
Vector sample_isotropic_stable(std::size_t d, double alpha, double t, RngStream& rng);

/// Positive draw with Laplace transform exp(-t lambda^a), a in (0, 1).
double sample_subordinator_increment(double alpha_half, double t, RngStream& rng);

/// Writes one increment of every particle's process over time t into out.
void sample_noise_increment(const NoiseSpec& spec, std::size_t d, double t, RngStream& rng,
                            Vector& out);

std::complex<double> empirical_char_function(const std::vector<Vector>& samples,
                                             const Vector& xi);
std::complex<double> empirical_char_function(const std::vector<double>& samples, double xi);

}  // namespace levy
