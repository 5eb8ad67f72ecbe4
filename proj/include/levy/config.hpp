#pragma once

#include "levy/potentials.hpp"
#include "levy/lyapunov.hpp"
#include "levy/quadrature.hpp"
#include "levy/sampling.hpp"
#include "levy/system.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace levy {

struct LyapunovConfig {
  int which = 1;  ///< 1: cutoff-perturbed energy, 2: mean-field energy
  std::optional<double> theta;
  /// Manual values replacing estimated constants (r0, C_U, ..., a, b, C_star).
  std::map<std::string, double> overrides;
  std::size_t samples = 2000;
};

struct SimulationConfig {
  std::string scheme = "tamed_euler";
  double h = 1e-3;
  double horizon = 1.0;
  std::size_t trajectories = 1;
  std::vector<double> snapshots;
  std::uint64_t seed = 1;
  std::vector<double> x0;
  std::vector<double> v0;
  std::string format = "csv";
};

struct DiagnosticsConfig {
  std::size_t scan_states = 500;
  double pair_min = 1e-3;
  std::uint64_t scan_seed = 7;
  double C_cap = std::numeric_limits<double>::quiet_NaN();
  /// Second start for the two-ensemble distance curve.
  std::vector<double> x0_alt;
  std::vector<double> v0_alt;
  std::vector<double> tv_times;
  std::size_t tv_bins = 0;
  double burn_in = 0.0;
};

struct ControlConfig {
  double horizon = 1.0;
  std::vector<double> x0, v0, xT, vT;
  std::size_t grid = 4000;
  double delta_plan = std::numeric_limits<double>::quiet_NaN();
  std::size_t max_detours = 8;
};

struct RunConfig {
  std::size_t n = 1;
  std::size_t d = 1;
  double gamma = 1.0;
  double c0 = 0.0;
  double confinement_exponent = 2.0;
  double offset = 0.0;
  std::string interaction = "none";
  std::string normalization = "pair_sum";
  double c1 = 1.0;
  double c2 = 1.0;
  double strength = 1.0;
  double power = 1.0;
  std::vector<double> alpha;
  bool deterministic_noise = false;
  Guards guards;

  LyapunovConfig lyapunov;
  QuadratureSpec quadrature;
  SimulationConfig simulation;
  DiagnosticsConfig diagnostics;
  ControlConfig control;
  std::filesystem::path output_dir = "out";
};

struct ConfigViolation {
  std::string field;
  std::string rule;
  /// Modelling assumption the rule protects.
  std::string assumption;
};

/// Parses TOML text. Malformed documents, wrong value types and unknown keys
/// raise ParameterError; range checks are left to validate_config.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
/// Reads and parses a file; IoError when it cannot be read.
RunConfig load_config(const std::filesystem::path& path);

std::vector<ConfigViolation> validate_config(const RunConfig& cfg);

/// Builders for a validated configuration.
std::shared_ptr<const PotentialModel> build_potential(const RunConfig& cfg);
NoiseSpec build_noise(const RunConfig& cfg);
SystemSpec build_system(const RunConfig& cfg);
double effective_theta(const RunConfig& cfg);
/// Start state from the given coordinate lists (zeros when empty).
PhaseState build_state(const RunConfig& cfg, const std::vector<double>& x,
                       const std::vector<double>& v);
SamplerOptions sampler_options(const RunConfig& cfg);
/// Lyapunov function of the configured case: estimated constants with the
/// manual overrides applied.
LyapunovModel build_lyapunov(const RunConfig& cfg, const SystemSpec& sys);

}  // namespace levy
