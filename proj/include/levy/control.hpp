#pragma once

#include "levy/system.hpp"

#include <limits>
#include <vector>

namespace levy {

/// Piecewise quintic position plan through knots with prescribed positions
/// and velocities and zero acceleration, so the plan is C2.
class HermitePlan {
 public:
  HermitePlan() = default;
  HermitePlan(std::vector<double> knot_times, std::vector<Vector> positions,
              std::vector<Vector> velocities);

  Vector position(double s) const;
  Vector velocity(double s) const;
  Vector acceleration(double s) const;
  double horizon() const { return times_.back(); }
  const std::vector<double>& knot_times() const { return times_; }
  const std::vector<Vector>& knot_positions() const { return pos_; }
  /// Position, velocity and acceleration at s.
  void jet(double s, Vector& p, Vector& v, Vector& a) const { eval(s, &p, &v, &a); }

 private:
  std::size_t segment(double s) const;
  void eval(double s, Vector* p, Vector* v, Vector* a) const;

  std::vector<double> times_;
  std::vector<Vector> pos_;
  std::vector<Vector> vel_;
};

struct ControlOptions {
  std::size_t grid = 4000;
  /// Planned paths keep all pairs at least this far apart; NaN selects half
  /// the pair length scale for Lennard-Jones and 0.1 otherwise.
  double delta_plan = std::numeric_limits<double>::quiet_NaN();
  std::size_t max_detours = 8;
};

/// Deterministic control steering the noise-free system between two states.
/// u(s) = v(s) - v(0) + int_0^s (gamma v + grad U(x)) dr along the plan.
struct ControlPath {
  double horizon = 0.0;
  double delta_plan = 0.0;
  double min_pair = kInf;
  std::size_t detours = 0;
  HermitePlan plan;
  double gamma = 1.0;
  std::vector<double> times;
  std::vector<Vector> positions;
  std::vector<Vector> controls;

  /// du/ds at s, from the plan.
  Vector control_rate(double s, const PotentialModel& pot) const;
};

double default_delta_plan(const PotentialModel& pot);

/// Minimum pair distance along a plan sampled on `samples` + 1 points.
double plan_min_pair_distance(const HermitePlan& plan, std::size_t d, std::size_t samples,
                              double* where = nullptr);

ControlPath synthesize_control(const PhaseState& z0, const PhaseState& zT, double horizon,
                               const SystemSpec& sys, const ControlOptions& options = {});

/// Classical RK4 on dx = v, dv = -(gamma v + grad U) + du/ds over the control
/// grid. Throws DomainError naming the exit time if the path leaves the domain.
PhaseState integrate_controlled(const PhaseState& z0, const ControlPath& cp, const SystemSpec& sys,
                                std::size_t steps = 0);

}  // namespace levy
