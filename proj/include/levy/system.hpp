#pragma once

#include "levy/noise.hpp"
#include "levy/potentials.hpp"

#include <memory>
#include <string>

namespace levy {

enum class Scheme { TamedEuler, AdaptiveEuler, ExactOUSplitting };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct Guards {
  /// Proposals with a pair closer than this are rejected.
  double min_pair_distance = 1e-9;
  /// Adaptive Euler halves its substep until |drift| * h <= this.
  double drift_step = 0.25;
  std::size_t max_halvings = 40;
  /// Consecutive rejections tolerated before a trajectory counts as stuck.
  std::size_t max_rejections = 200;
};

/// Immutable description of the kinetic system
///   dx = v dt,  dv = -(gamma v + grad U(x)) dt + dL_t.
struct SystemSpec {
  std::size_t n = 1;
  std::size_t d = 1;
  double gamma = 1.0;
  std::shared_ptr<const PotentialModel> potential;
  NoiseSpec noise;
  Scheme scheme = Scheme::TamedEuler;
  double h = 1e-3;
  Guards guards;

  std::size_t total_dim() const { return n * d; }
  void validate() const;
};

/// Admissible phase state of the system: right sizes, finite U.
bool in_state_space(const SystemSpec& sys, const PhaseState& z);

/// Kinetic plus potential energy |v|^2 / 2 + U(x).
double hamiltonian(const SystemSpec& sys, const PhaseState& z);

}  // namespace levy
