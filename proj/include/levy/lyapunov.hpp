#pragma once

#include "levy/assumptions.hpp"
#include "levy/phase_function.hpp"
#include "levy/potentials.hpp"
#include "levy/sampling.hpp"

#include <memory>
#include <utility>
#include <variant>

namespace levy {

/// C-infinity step: 0 for u <= r0, 1 for u >= 2 r0, slope at most 2 / r0.
double smooth_cutoff(double u, double r0);
double smooth_cutoff_slope(double u, double r0);

/// Constants of the cutoff-perturbed energy. The first block is primitive;
/// the second is recomputed from it by from_primitives.
struct Case1Constants {
  double r0 = 0.0;      ///< |grad U| >= 1 on {U >= r0}
  double R_U = 0.0;     ///< level above which the ratio bound C_U applies
  double C_U = 0.0;     ///< sup over {U >= R_U} of U (1 + |H|) / |grad U|^2
  double C_U_beta = 0.0;  ///< sup of |H| over {U <= beta0}
  double C_star = 1.0;  ///< 1 + sup over {U < r0} of |U|
  double gamma = 1.0;
  double kappa_fraction = 0.9;

  double theta0 = 0.0;
  double beta0 = 0.0;
  double kappa_star = 0.0;
  double kappa = 0.0;

  static Case1Constants from_primitives(double r0, double R_U, double C_U, double C_U_beta,
                                        double C_star, double gamma,
                                        double kappa_fraction = 0.9);
  /// Bitwise comparison of the derived block against a fresh recomputation.
  bool derived_consistent() const;
};

/// Parameters of the mean-field energy with unit-vector and <x, v> perturbations.
struct Case2Params {
  double C_V = 0.0;   ///< growth constant of the one-particle term
  double C_VV = 0.0;  ///< gradient-to-value bound of the one-particle term
  double gamma = 1.0;
  double a = 0.0;  ///< unit-vector perturbation weight
  double b = 0.0;  ///< <x, v> perturbation weight
  double C_star = 1.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  /// Largest admissible (a, b) for the given constants.
  static std::pair<double, double> admissible_weights(double C_V, double C_VV, double gamma);
};

Case1Constants estimate_case1_constants(const PotentialModel& model, double gamma,
                                        const ConfigurationSampler& sampler, std::size_t n);

Case2Params derive_case2_params(const AssumptionReport& report, double gamma,
                                const PotentialModel& model, const ConfigurationSampler& sampler,
                                std::size_t n);

/// theta-th power of a perturbed energy; value >= 1 on the admissible set.
class LyapunovModel : public PhaseFunction {
 public:
  LyapunovModel(std::shared_ptr<const PotentialModel> model, Case1Constants c, double theta);
  LyapunovModel(std::shared_ptr<const PotentialModel> model, Case2Params p, double theta);

  bool is_case1() const { return std::holds_alternative<Case1Constants>(params_); }
  const Case1Constants& case1() const { return std::get<Case1Constants>(params_); }
  const Case2Params& case2() const { return std::get<Case2Params>(params_); }
  double theta() const { return theta_; }
  const PotentialModel& potential() const { return *model_; }
  std::shared_ptr<const PotentialModel> potential_ptr() const { return model_; }

  /// Perturbed energy before the power theta/2.
  double energy(const PhaseState& z) const;
  void energy_gradient(const PhaseState& z, Vector& gx, Vector& gv) const;
  /// Velocity gradient of the energy restricted to particle i.
  Vector energy_velocity_gradient(const PhaseState& z, std::size_t i) const;

  double value(const PhaseState& z) const override;
  void gradient(const PhaseState& z, Vector& gx, Vector& gv) const override;
  JumpSlice slice(const PhaseState& z, std::size_t i, std::size_t d) const override;

  /// Two-sided bound on the case-1 energy: (lower, upper).
  std::pair<double, double> case1_sandwich(const PhaseState& z) const;
  /// Denominator of the case-2 sandwich ratio.
  double case2_sandwich_denominator(const PhaseState& z) const;

 private:
  struct Local {
    double u = 0.0;
    Vector g;
    double g2 = 0.0;
    double cut = 0.0;
    double cut_slope = 0.0;
  };
  Local local_case1(const Vector& x) const;
  Vector mean_field_unit_sum(const Vector& x, std::size_t i) const;

  std::shared_ptr<const PotentialModel> model_;
  std::variant<Case1Constants, Case2Params> params_;
  double theta_;
};

/// Default exponent: half the smallest stability index.
double default_theta(double min_alpha);

}  // namespace levy
