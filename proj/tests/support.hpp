#pragma once

#include "levy/potentials.hpp"
#include "levy/rng.hpp"
#include "levy/types.hpp"

#include <cmath>
#include <functional>
#include <memory>

namespace levy::test {

inline std::shared_ptr<const PotentialModel> harmonic(std::size_t n = 1, std::size_t d = 1) {
  Confinement c;
  c.c0 = 1.0;
  c.exponent = 2.0;
  return std::make_shared<const PotentialModel>(n, d, c, Interaction{});
}

inline std::shared_ptr<const PotentialModel> lennard_jones(double c0 = 1.0) {
  Confinement c;
  c.c0 = c0;
  c.exponent = 2.0;
  Interaction i;
  i.kind = InteractionKind::LennardJones;
  return std::make_shared<const PotentialModel>(2, 3, c, i);
}

inline std::shared_ptr<const PotentialModel> coulomb_like(InteractionKind kind, std::size_t n,
                                                          std::size_t d, double c0 = 1.0) {
  Confinement c;
  c.c0 = c0;
  c.exponent = 2.0;
  Interaction i;
  i.kind = kind;
  return std::make_shared<const PotentialModel>(n, d, c, i, PairNormalization::MeanField);
}

inline Vector random_vector(RngStream& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = scale * rng.normal();
  return v;
}

/// Configuration with all pairs at least min_gap apart.
inline Vector spread_configuration(RngStream& rng, std::size_t n, std::size_t d, double scale,
                                   double min_gap) {
  for (;;) {
    Vector x = random_vector(rng, static_cast<Eigen::Index>(n * d), scale);
    if (min_pair_distance(x, d) >= min_gap) return x;
  }
}

/// Central difference of f along each coordinate.
inline Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                               double h) {
  Vector g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vector a = x, b = x;
    a[k] += h;
    b[k] -= h;
    g[k] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace levy::test
