#pragma once

#include "levy/potentials.hpp"
#include "levy/rng.hpp"

#include <cstdint>
#include <vector>

namespace levy {

/// Stratification knobs shared by the assumption checks and drift scans.
/// Pair distances are relative to the model's pair length scale.
struct SamplerOptions {
  std::uint64_t seed = 1;
  double scale_min = 1e-2;
  double scale_max = 1e3;
  std::size_t scale_levels = 24;
  double pair_min = 1e-4;
  double pair_max = 10.0;
  std::size_t pair_levels = 24;
  /// Velocity magnitudes; level 0 is v = 0.
  double speed_min = 1e-2;
  double speed_max = 1e3;
  std::size_t speed_levels = 16;
};

/// Deterministic stratified sampler of admissible configurations. Sample k
/// depends only on (options, k), so sample sets nest under refinement.
class ConfigurationSampler {
 public:
  ConfigurationSampler(const PotentialModel& model, SamplerOptions options = {});

  /// k-th configuration; may lie outside D(U) when a pair is pinned very close.
  Vector configuration(std::size_t k) const;
  PhaseState phase_state(std::size_t k) const;

  /// First n admissible configurations (finite U and gradient).
  std::vector<Vector> configurations(std::size_t n) const;
  std::vector<PhaseState> phase_states(std::size_t n) const;

  const SamplerOptions& options() const { return options_; }
  const PotentialModel& model() const { return *model_; }

 private:
  const PotentialModel* model_;
  SamplerOptions options_;
};

/// Uniform direction on the unit sphere in R^d.
Vector random_direction(std::size_t d, RngStream& rng);

}  // namespace levy
