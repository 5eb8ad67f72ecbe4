#pragma once

#include "levy/types.hpp"

#include <functional>
#include <limits>

namespace levy {

/// Growth bound |f(x, v + w e_i) - f(x, v)| <= coefficient * |w|^exponent,
/// valid for |w| >= the radius it was requested for.
/// When value_bound is finite the function itself is bounded by it, and the
/// tail is estimated as -f(x, v) times the tail mass instead.
struct TailModel {
  double exponent = 0.0;
  double coefficient = 0.0;
  double value_bound = std::numeric_limits<double>::quiet_NaN();
};

/// Restriction of a phase function to the velocity of one particle.
struct JumpSlice {
  double base = 0.0;
  /// f(x, v + w on particle i) - f(x, v).
  std::function<double(const Vector& w)> increment;
  /// Optional growth bound for the far field, as a function of the radius.
  std::function<TailModel(double radius)> tail;
};

/// Smooth function on phase space with an analytic gradient.
class PhaseFunction {
 public:
  virtual ~PhaseFunction() = default;
  virtual double value(const PhaseState& z) const = 0;
  virtual void gradient(const PhaseState& z, Vector& grad_x, Vector& grad_v) const = 0;
  /// Default slice differences value(); overrides may be more accurate.
  virtual JumpSlice slice(const PhaseState& z, std::size_t i, std::size_t d) const;
};

/// Phase function assembled from callables.
class LambdaPhaseFunction : public PhaseFunction {
 public:
  using ValueFn = std::function<double(const PhaseState&)>;
  using GradFn = std::function<void(const PhaseState&, Vector&, Vector&)>;
  using IncrementFn = std::function<double(const PhaseState&, std::size_t, const Vector&)>;
  using TailFn = std::function<TailModel(const PhaseState&, std::size_t, double)>;

  LambdaPhaseFunction(ValueFn value, GradFn gradient, IncrementFn increment = {},
                      TailFn tail = {});

  double value(const PhaseState& z) const override { return value_(z); }
  void gradient(const PhaseState& z, Vector& gx, Vector& gv) const override {
    gradient_(z, gx, gv);
  }
  JumpSlice slice(const PhaseState& z, std::size_t i, std::size_t d) const override;

 private:
  ValueFn value_;
  GradFn gradient_;
  IncrementFn increment_;
  TailFn tail_;
};

}  // namespace levy
