#pragma once

#include "levy/dynamics.hpp"
#include "levy/phase_function.hpp"

#include <functional>
#include <string>
#include <vector>

namespace levy {

class LyapunovModel;

struct DecayFit {
  /// Decay rate of log(value) against time; positive for decay.
  double rate = 0.0;
  double r2 = 0.0;
  /// Fitted index range [first, last].
  std::size_t first = 0;
  std::size_t last = 0;
};

struct DecayCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> stderrs;
  DecayFit fit;
};

/// Ensemble mean of lyap at each requested snapshot time. The curve is not
/// fitted; see fit_decay_rate.
DecayCurve empirical_moment(const TrajectoryBatch& batch, const PhaseFunction& lyap,
                            const std::vector<double>& times);

/// Least-squares fit of log(value) on time over the longest initial run of
/// values above noise_floor. Needs at least four points in that run.
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                        double noise_floor = 0.0);
DecayFit fit_decay_rate(const DecayCurve& curve, double noise_floor = 0.0);

using StateFunction = std::function<double(const PhaseState&)>;

struct TvOptions {
  /// Bins per retained coordinate; 0 selects ceil(n^(1/(k+2))) for k coordinates.
  std::size_t bins = 0;
  /// Both ensembles keep at least this fraction inside the window.
  double coverage = 0.99;
};

/// Lyapunov-weighted histogram distance between two ensembles. States with
/// energy up to the larger coverage quantile are binned (raw coordinates up
/// to four, else energy, speed and minimum pair distance); the rest form a
/// tail weighted by its mean weight.
double weighted_tv_estimate(const std::vector<PhaseState>& a, const std::vector<PhaseState>& b,
                            const StateFunction& weight, const StateFunction& energy,
                            std::size_t d, const TvOptions& options = {});
double weighted_tv_estimate(const std::vector<PhaseState>& a, const std::vector<PhaseState>& b,
                            const LyapunovModel& lyap, const TvOptions& options = {});

struct TwoStartOptions {
  std::size_t trajectories = 500;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  TvOptions tv;
};

struct TwoStartResult {
  DecayCurve curve;
  /// Distance between the two halves of the first ensemble at the last time.
  double noise_floor = 0.0;
  bool decreasing = false;
};

/// Distance curve between ensembles started at a and b (streams 0..M-1 and
/// M..2M-1), fitted above the noise floor. A proxy for the distance to the
/// invariant law, not the distance itself.
TwoStartResult two_start_diagnostic(const SystemSpec& sys, const LyapunovModel& lyap,
                                    const PhaseState& a, const PhaseState& b,
                                    const std::vector<double>& times,
                                    const TwoStartOptions& options = {});

struct GibbsStatistic {
  std::string name;
  double empirical = 0.0;
  double standard_error = 0.0;
  double reference = 0.0;
  double z_score = 0.0;
  double relative_error = 0.0;
};

struct GibbsReport {
  double inverse_temperature = 0.0;
  double burn_in = 0.0;
  std::size_t samples = 0;
  std::vector<GibbsStatistic> statistics;
  const GibbsStatistic& at(const std::string& name) const;
};

/// Inverse temperature of the invariant density exp(-beta H) for Brownian
/// noise with covariance 2t: beta = gamma.
double stationary_inverse_temperature(const SystemSpec& sys);

/// Compares time-and-ensemble averages after burn_in against quadrature of
/// exp(-beta H): mean |v|^2, mean U, per-coordinate mean and second moment of
/// x, and the x-v correlation. Standard errors come from per-trajectory means.
GibbsReport gibbs_oracle_check(const TrajectoryBatch& batch, const SystemSpec& sys,
                               double inverse_temperature, double burn_in = 0.0);

}  // namespace levy
