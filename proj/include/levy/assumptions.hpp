#pragma once

#include "levy/noise.hpp"
#include "levy/potentials.hpp"
#include "levy/sampling.hpp"

#include <map>
#include <string>
#include <vector>

namespace levy {

enum class AssumptionKind { HU, HV, HK, HVHK, Hnu };
std::string to_string(AssumptionKind kind);

/// Outcome of a sampled assumption check. Constants come from the first half
/// of the samples; margins are evaluated on all of them, so pass also means
/// the constants survive a doubling of the sample set.
struct AssumptionReport {
  AssumptionKind kind = AssumptionKind::HU;
  double sampled_sup = 0.0;
  /// Smallest margin per inequality; an inequality holds when its margin >= 0.
  std::map<std::string, double> margins;
  std::map<std::string, double> constants;
  std::vector<Vector> witnesses;
  std::size_t samples = 0;
  bool pass = false;
  std::string message;
};

inline constexpr double kSafetyFactor = 1.05;

/// sup U (1 + |Hess U|_HS) / (1 + |grad U|^2) over stratified samples.
AssumptionReport check_HU(const PotentialModel& model, const ConfigurationSampler& sampler,
                          std::size_t n);

/// Confinement and pair-kernel conditions of the mean-field decomposition.
AssumptionReport check_HV_HK(const PotentialModel& model, const ConfigurationSampler& sampler,
                             std::size_t n);

/// Finite theta-moment condition: theta < min alpha_i.
AssumptionReport check_Hnu(const NoiseSpec& noise, double theta);

/// One-particle term of the mean-field split, including its share of the offset.
double mean_field_single(const PotentialModel& model, const Vector& u);
Vector mean_field_single_gradient(const PotentialModel& model, const Vector& u);

/// Both sides of the homogeneity inequality for the pair kernel at x.
struct HomogeneityTerms {
  double lhs = 0.0;
  double rhs_sum = 0.0;
};
HomogeneityTerms homogeneity_terms(const PotentialModel& model, const Vector& x);

}  // namespace levy
