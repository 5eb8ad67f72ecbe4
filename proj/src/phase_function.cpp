#include "levy/phase_function.hpp"

namespace levy {

JumpSlice PhaseFunction::slice(const PhaseState& z, std::size_t i, std::size_t d) const {
  JumpSlice s;
  s.base = value(z);
  const double base = s.base;
  s.increment = [this, z, i, d, base](const Vector& w) {
    PhaseState moved = z;
    particle(moved.v, i, d) += w;
    return value(moved) - base;
  };
  return s;
}

LambdaPhaseFunction::LambdaPhaseFunction(ValueFn value, GradFn gradient, IncrementFn increment,
                                         TailFn tail)
    : value_(std::move(value)),
      gradient_(std::move(gradient)),
      increment_(std::move(increment)),
      tail_(std::move(tail)) {}

JumpSlice LambdaPhaseFunction::slice(const PhaseState& z, std::size_t i, std::size_t d) const {
  JumpSlice s = increment_ ? JumpSlice{value_(z), {}, {}} : PhaseFunction::slice(z, i, d);
  if (increment_) {
    s.increment = [this, z, i](const Vector& w) { return increment_(z, i, w); };
  }
  if (tail_) {
    s.tail = [this, z, i](double radius) { return tail_(z, i, radius); };
  }
  return s;
}

}  // namespace levy
