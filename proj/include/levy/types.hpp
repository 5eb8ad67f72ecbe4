#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>

namespace levy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Phase-space point. Positions and velocities are stored particle-major:
/// particle i occupies entries [i*d, (i+1)*d).
struct PhaseState {
  Vector x;
  Vector v;
};

inline Eigen::Map<const Vector> particle(const Vector& u, std::size_t i, std::size_t d) {
  return Eigen::Map<const Vector>(u.data() + i * d, static_cast<Eigen::Index>(d));
}

inline Eigen::Map<Vector> particle(Vector& u, std::size_t i, std::size_t d) {
  return Eigen::Map<Vector>(u.data() + i * d, static_cast<Eigen::Index>(d));
}

}  // namespace levy
