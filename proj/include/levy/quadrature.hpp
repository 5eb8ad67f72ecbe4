#pragma once

#include "levy/phase_function.hpp"

#include <cstddef>
#include <optional>

namespace levy {

/// Settings of the jump-integral quadrature.
///
/// The integral over the Levy measure is split into a small ball |z| < eps
/// (second-order Taylor estimate), adaptive Gauss-Kronrod panels in log r on
/// [eps, r_max] with a nested angular rule per radius, and an analytic tail.
struct QuadratureSpec {
  double eps = 1e-4;
  double r_max = 1e4;
  int panels_per_decade = 2;
  std::size_t max_panels = 4000;
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  /// Starting angular level: d = 2 uses 8 * 2^l directions on the half circle,
  /// d = 3 an n x 2n product rule on the hemisphere with n = 4 * 2^(l/2).
  int angular_level = 0;
  /// Angular budget per radius; beyond the first radius that needs more, the
  /// integral is closed by the tail bound.
  std::size_t max_angular_points = 4096;
  std::size_t max_circle_points = 512;
  double angular_rel_tol = 1e-9;
  /// Used when the integrand supplies no growth bound of its own.
  std::optional<TailModel> tail;

  /// Same rule with every node count doubled.
  QuadratureSpec refined() const;
  void validate() const;
};

struct JumpResult {
  double value = 0.0;
  double error = 0.0;
  /// Contribution of |z| <= 1 (symmetrised second difference).
  double inner = 0.0;
  double inner_error = 0.0;
  double outer = 0.0;
  double outer_error = 0.0;
  /// Radius where the grid stops and the analytic tail starts.
  double cutoff_radius = 0.0;
  std::size_t evaluations = 0;
};

/// Constant of the isotropic stable Levy measure c |z|^(-d-alpha) dz whose
/// process has characteristic function exp(-t |xi|^alpha).
double levy_constant(std::size_t d, double alpha);

/// Surface area of the unit sphere in R^d.
double sphere_area(std::size_t d);

JumpResult jump_integral(const JumpSlice& slice, std::size_t d, double alpha,
                         const QuadratureSpec& q);
JumpResult jump_integral(const PhaseFunction& f, const PhaseState& z, std::size_t i, std::size_t d,
                         double alpha, const QuadratureSpec& q);

/// Velocity Laplacian of one particle by Richardson-extrapolated second
/// differences; used for Brownian particles. Returns (value, error).
std::pair<double, double> velocity_laplacian(const JumpSlice& slice, std::size_t d, double scale);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace levy
