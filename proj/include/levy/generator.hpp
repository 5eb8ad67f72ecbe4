#pragma once

#include "levy/lyapunov.hpp"
#include "levy/quadrature.hpp"
#include "levy/system.hpp"

#include <string>
#include <vector>

namespace levy {

struct GeneratorValue {
  double value = 0.0;
  /// Quadrature error plus a rounding bound on the transport term.
  double error = 0.0;
  double transport = 0.0;
  double jump = 0.0;
  double jump_error = 0.0;
};

/// Generator of the kinetic system applied to f at z: transport and friction
/// from the gradient, one jump integral (or velocity Laplacian for Brownian
/// particles) per particle.
GeneratorValue apply_generator(const PhaseFunction& f, const PhaseState& z, const SystemSpec& sys,
                               const QuadratureSpec& q);

struct DriftRecord {
  std::size_t index = 0;
  PhaseState state;
  double lyapunov = 0.0;
  double generator = 0.0;
  double error = 0.0;
  double energy = 0.0;
  double min_pair = kInf;
};

struct DriftReport {
  double lambda = 0.0;
  double C = 0.0;
  double C_cap = 0.0;
  bool certified = false;
  /// Candidate sweep (C, lambda(C)).
  std::vector<std::pair<double, double>> sweep;
  std::vector<DriftRecord> records;
  /// Indices into records that fail every candidate.
  std::vector<std::size_t> violations;
  std::string scan;
  /// min of -generator / lyapunov over the top energy decile; a scan-relative
  /// estimate of the rate at infinity.
  double high_energy_rate = 0.0;
};

struct DriftOptions {
  std::size_t candidates = 64;
  /// Largest C considered; NaN selects 10 * max |generator|.
  double C_cap = std::numeric_limits<double>::quiet_NaN();
  std::size_t threads = 1;
  std::string scan_description;
};

/// min_k (C - g_k - err_k) / V_k.
double drift_rate(const std::vector<double>& g, const std::vector<double>& lyap,
                  const std::vector<double>& err, double C);

/// Sweeps C over log-spaced candidates up to the cap and keeps the best rate.
/// Fills lambda, C, C_cap, sweep, violations and certified of the report.
void fit_drift(const std::vector<double>& g, const std::vector<double>& lyap,
               const std::vector<double>& err, const DriftOptions& options, DriftReport& report);

DriftReport verify_drift(const LyapunovModel& lyap, const SystemSpec& sys,
                         const std::vector<PhaseState>& scan, const QuadratureSpec& q,
                         const DriftOptions& options = {});

/// Stratified drift scan: energy levels, speeds and pair distances down to
/// pair_min times the pair length scale.
std::vector<PhaseState> stratified_drift_scan(const PotentialModel& model, std::size_t n,
                                              double pair_min = 1e-3, std::uint64_t seed = 7);

}  // namespace levy
