#pragma once

#include "levy/system.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace levy {

/// One macro step from z with the given noise increment. Returns nullopt when
/// the proposal leaves the domain or brings a pair closer than the guard.
/// Throws DomainError if z itself is outside the state space.
std::optional<PhaseState> step(const PhaseState& z, const SystemSpec& sys, const Vector& dL,
                               double h);

struct StepStats {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  /// Step-size halvings after rejections.
  std::uint64_t reductions = 0;
  std::uint64_t max_consecutive_rejections = 0;
  double min_step = 0.0;
};

struct Trajectory {
  std::uint64_t stream_id = 0;
  std::vector<PhaseState> snapshots;
  StepStats stats;
};

struct TrajectoryBatch {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  /// Index of a snapshot time; throws ParameterError when absent.
  std::size_t time_index(double t) const;
  /// All trajectories at snapshot index m.
  std::vector<PhaseState> ensemble(std::size_t m) const;
  StepStats totals() const;
};

struct SimulationOptions {
  double horizon = 1.0;
  /// Snapshot times in [0, horizon]; strictly increasing.
  std::vector<double> snapshots;
  std::size_t trajectories = 1;
  std::uint64_t seed = 1;
  /// Offset of the trajectory stream ids, so ensembles can share a seed.
  std::uint64_t stream_offset = 0;
  std::size_t threads = 1;
};

/// Ensemble of independent trajectories from z0. Trajectory m draws from
/// RngStream(seed, stream_offset + m).
TrajectoryBatch simulate(const SystemSpec& sys, const PhaseState& z0,
                         const SimulationOptions& options);

/// Rows of (trajectory, time, x..., v...) with a header line.
void write_csv(const TrajectoryBatch& batch, std::ostream& out);

/// Little-endian columnar layout: magic "LEVYTRJ1", u64 rows, u64 dim, then
/// the trajectory column (u64), the time column (f64) and one f64 column per
/// coordinate, x before v.
void write_binary(const TrajectoryBatch& batch, std::ostream& out);

}  // namespace levy
