#pragma once

#include "levy/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace levy {

enum class InteractionKind { None, LennardJones, PowerLaw, Coulomb, LogCoulomb };
enum class PairNormalization { PairSum, MeanField };

std::string to_string(InteractionKind kind);
std::string to_string(PairNormalization norm);
InteractionKind parse_interaction_kind(const std::string& name);
PairNormalization parse_normalization(const std::string& name);

/// Smooth one-particle term with its derivatives.
struct SmoothField {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

/// Smooth radial pair term phi(r) with first and second derivative.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// c0 * (1 + |u|^2)^(exponent/2) plus an optional perturbation.
struct Confinement {
  double c0 = 0.0;
  double exponent = 2.0;
  std::optional<SmoothField> perturbation;
};

struct Interaction {
  InteractionKind kind = InteractionKind::None;
  double c1 = 1.0;  ///< r^-12 coefficient (Lennard-Jones)
  double c2 = 1.0;  ///< r^-6 coefficient (Lennard-Jones)
  double strength = 1.0;  ///< prefactor for power-law, Coulomb and log kinds
  double power = 1.0;     ///< decay exponent of the power-law kind
  std::optional<RadialProfile> perturbation;
};

/// Value and radial derivatives of a pair term at distance r.
struct RadialJet {
  double k = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

/// U(x) = offset + sum_i V(x_i) + w * sum_pairs K(x_i - x_j), w = 1 over
/// unordered pairs or 1/N over ordered pairs.
class PotentialModel {
 public:
  PotentialModel(std::size_t n, std::size_t d, Confinement confinement, Interaction interaction,
                 PairNormalization normalization = PairNormalization::PairSum,
                 double offset = 0.0);

  std::size_t particles() const { return n_; }
  std::size_t dim() const { return d_; }
  std::size_t total_dim() const { return n_ * d_; }
  const Confinement& confinement() const { return confinement_; }
  const Interaction& interaction() const { return interaction_; }
  PairNormalization normalization() const { return normalization_; }
  double offset() const { return offset_; }

  /// U(x), or +inf outside the domain.
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
  bool in_domain(const Vector& x) const;

  /// Interaction part only (no confinement, no offset).
  double interaction_value(const Vector& x) const;

  double confinement_value(const Vector& u) const;
  Vector confinement_gradient(const Vector& u) const;
  Matrix confinement_hessian(const Vector& u) const;

  /// Pair term K as a function of the separation length.
  RadialJet pair_jet(double r) const;
  bool singular() const;
  bool interacting() const { return interaction_.kind != InteractionKind::None && n_ > 1; }
  /// Weight of one unordered pair in U.
  double unordered_pair_weight() const;

  /// True when U splits as sum V + (1/N) sum_{i != j} K with radial K.
  bool has_mean_field_decomposition() const;

  /// Length scale of the pair term: LJ minimiser, or 1 for other kinds.
  double pair_length_scale() const;

 private:
  void check_dim(const Vector& x) const;

  std::size_t n_;
  std::size_t d_;
  Confinement confinement_;
  Interaction interaction_;
  PairNormalization normalization_;
  double offset_;
};

/// Minimum pairwise distance; +inf for a single particle.
double min_pair_distance(const Vector& x, std::size_t d);

}  // namespace levy
