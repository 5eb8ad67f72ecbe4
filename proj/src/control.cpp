#include "levy/control.hpp"

#include "levy/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levy {

HermitePlan::HermitePlan(std::vector<double> knot_times, std::vector<Vector> positions,
                         std::vector<Vector> velocities)
    : times_(std::move(knot_times)), pos_(std::move(positions)), vel_(std::move(velocities)) {
  if (times_.size() < 2 || pos_.size() != times_.size() || vel_.size() != times_.size())
    fail_parameter("plan needs at least two knots with positions and velocities");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1])) fail_parameter("knot times must be strictly increasing");
}

std::size_t HermitePlan::segment(double s) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), s);
  const auto k = static_cast<std::size_t>(it - times_.begin());
  return std::clamp<std::size_t>(k, 1, times_.size() - 1) - 1;
}

void HermitePlan::eval(double s, Vector* p, Vector* v, Vector* a) const {
  const std::size_t k = segment(s);
  const double dt = times_[k + 1] - times_[k];
  const double t = (s - times_[k]) / dt;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  // Quintic Hermite basis with zero end accelerations.
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
  const Vector& p0 = pos_[k];
  const Vector& p1 = pos_[k + 1];
  const Vector w0 = dt * vel_[k];
  const Vector w1 = dt * vel_[k + 1];
  if (p) *p = h0 * p0 + h1 * w0 + h4 * w1 + h5 * p1;
  if (v) {
    const double d0 = -30 * t2 + 60 * t3 - 30 * t4;
    const double d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double d4 = -12 * t2 + 28 * t3 - 15 * t4;
    *v = (d0 * p0 + d1 * w0 + d4 * w1 - d0 * p1) / dt;
  }
  if (a) {
    const double e0 = -60 * t + 180 * t2 - 120 * t3;
    const double e1 = -36 * t + 96 * t2 - 60 * t3;
    const double e4 = -24 * t + 84 * t2 - 60 * t3;
    *a = (e0 * p0 + e1 * w0 + e4 * w1 - e0 * p1) / (dt * dt);
  }
}

Vector HermitePlan::position(double s) const {
  Vector p;
  eval(s, &p, nullptr, nullptr);
  return p;
}

Vector HermitePlan::velocity(double s) const {
  Vector v;
  eval(s, nullptr, &v, nullptr);
  return v;
}

Vector HermitePlan::acceleration(double s) const {
  Vector a;
  eval(s, nullptr, nullptr, &a);
  return a;
}

Vector ControlPath::control_rate(double s, const PotentialModel& pot) const {
  Vector p, v, a;
  plan.jet(s, p, v, a);
  return a + gamma * v + pot.gradient(p);
}

double default_delta_plan(const PotentialModel& pot) {
  if (pot.interaction().kind == InteractionKind::LennardJones) return 0.5 * pot.pair_length_scale();
  return 0.1;
}

double plan_min_pair_distance(const HermitePlan& plan, std::size_t d, std::size_t samples,
                              double* where) {
  double best = kInf;
  const double T = plan.horizon();
  for (std::size_t k = 0; k <= samples; ++k) {
    const double s = T * static_cast<double>(k) / static_cast<double>(samples);
    const double r = min_pair_distance(plan.position(s), d);
    if (r < best) {
      best = r;
      if (where) *where = s;
    }
  }
  return best;
}

namespace {

// Unit vector orthogonal to w (any unit vector when w vanishes); empty in 1-d.
Vector orthogonal_direction(const Vector& w) {
  const auto d = w.size();
  if (d < 2) return Vector();
  Eigen::Index axis = 0;
  for (Eigen::Index k = 1; k < d; ++k)
    if (std::fabs(w[k]) < std::fabs(w[axis])) axis = k;
  Vector e = Vector::Unit(d, axis);
  const double wn = w.norm();
  if (wn > 0.0) e -= (e.dot(w) / (wn * wn)) * w;
  return e / e.norm();
}

std::pair<std::size_t, std::size_t> closest_pair(const Vector& x, std::size_t n, std::size_t d) {
  double best = kInf;
  std::pair<std::size_t, std::size_t> ij{0, 1};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = (particle(x, i, d) - particle(x, j, d)).norm();
      if (r < best) {
        best = r;
        ij = {i, j};
      }
    }
  return ij;
}

void catmull_rom(const std::vector<double>& t, const std::vector<Vector>& p,
                 std::vector<Vector>& v) {
  for (std::size_t k = 1; k + 1 < t.size(); ++k) v[k] = (p[k + 1] - p[k - 1]) / (t[k + 1] - t[k - 1]);
}

}  // namespace

ControlPath synthesize_control(const PhaseState& z0, const PhaseState& zT, double horizon,
                               const SystemSpec& sys, const ControlOptions& options) {
  sys.validate();
  if (!(horizon > 0.0)) fail_parameter("control horizon must be positive");
  if (options.grid < 2) fail_parameter("control grid needs at least two intervals");
  if (!in_state_space(sys, z0) || !in_state_space(sys, zT))
    throw DomainError("control endpoints must lie in the state space");
  const PotentialModel& pot = *sys.potential;
  const std::size_t n = sys.n, d = sys.d;
  const double delta = std::isnan(options.delta_plan) ? default_delta_plan(pot) : options.delta_plan;
  const bool guarded = n > 1 && pot.interacting();

  std::vector<double> kt{0.0, horizon};
  std::vector<Vector> kp{z0.x, zT.x};
  std::vector<Vector> kv{z0.v, zT.v};
  HermitePlan plan(kt, kp, kv);
  const std::size_t scan = 4 * options.grid;
  std::size_t detours = 0;
  double min_pair = guarded ? kInf : min_pair_distance(z0.x, d);
  if (guarded) {
    for (;;) {
      double where = 0.0;
      min_pair = plan_min_pair_distance(plan, d, scan, &where);
      if (min_pair >= delta) break;
      if (detours == options.max_detours) {
        std::ostringstream os;
        os << "no admissible plan after " << detours << " detours: min pair distance " << min_pair
           << " < " << delta << " at s = " << where;
        throw PlanningError(os.str());
      }
      ++detours;
      Vector x = plan.position(where);
      const Vector v = plan.velocity(where);
      const auto [i, j] = closest_pair(x, n, d);
      Vector sep = particle(x, i, d) - particle(x, j, d);
      Vector e;
      if (sep.norm() > 1e-9 * delta) {
        e = sep / sep.norm();
      } else {
        e = orthogonal_direction(Vector(particle(v, i, d) - particle(v, j, d)));
        if (e.size() == 0) e = Vector::Ones(1);
      }
      const Vector mid = 0.5 * (particle(x, i, d) + particle(x, j, d));
      particle(x, i, d) = mid + delta * e;
      particle(x, j, d) = mid - delta * e;
      // Reuse a knot that is already close to the offending time.
      std::size_t slot = kt.size();
      for (std::size_t k = 1; k + 1 < kt.size(); ++k)
        if (std::fabs(kt[k] - where) < 1e-3 * horizon) slot = k;
      if (slot == kt.size()) {
        if (where <= 1e-3 * horizon || where >= horizon * (1 - 1e-3)) {
          std::ostringstream os;
          os << "endpoint pair distance " << min_pair << " is below the planning margin " << delta;
          throw PlanningError(os.str());
        }
        const auto it = std::upper_bound(kt.begin(), kt.end(), where);
        slot = static_cast<std::size_t>(it - kt.begin());
        kt.insert(kt.begin() + static_cast<std::ptrdiff_t>(slot), where);
        kp.insert(kp.begin() + static_cast<std::ptrdiff_t>(slot), x);
        kv.insert(kv.begin() + static_cast<std::ptrdiff_t>(slot), v);
      } else {
        kp[slot] = x;
      }
      catmull_rom(kt, kp, kv);
      plan = HermitePlan(kt, kp, kv);
    }
  }

  ControlPath cp;
  cp.horizon = horizon;
  cp.delta_plan = delta;
  cp.min_pair = min_pair;
  cp.detours = detours;
  cp.plan = plan;
  cp.gamma = sys.gamma;
  const std::size_t g = options.grid;
  auto integrand = [&](double s) {
    Vector p, v, a;
    plan.jet(s, p, v, a);
    if (!pot.in_domain(p)) {
      std::ostringstream os;
      os << "planned path leaves the domain at s = " << s;
      throw PlanningError(os.str());
    }
    return Vector(sys.gamma * v + pot.gradient(p));
  };
  Vector integral = Vector::Zero(static_cast<Eigen::Index>(sys.total_dim()));
  Vector f_prev = integrand(0.0);
  for (std::size_t k = 0; k <= g; ++k) {
    const double s = horizon * static_cast<double>(k) / static_cast<double>(g);
    if (k > 0) {
      const double s0 = horizon * static_cast<double>(k - 1) / static_cast<double>(g);
      const Vector f_mid = integrand(0.5 * (s0 + s));
      const Vector f_end = integrand(s);
      integral += (s - s0) / 6.0 * (f_prev + 4.0 * f_mid + f_end);
      f_prev = f_end;
    }
    cp.times.push_back(s);
    cp.positions.push_back(plan.position(s));
    cp.controls.push_back(k == 0 ? Vector(Vector::Zero(integral.size()))
                                 : Vector(plan.velocity(s) - z0.v + integral));
  }
  return cp;
}

PhaseState integrate_controlled(const PhaseState& z0, const ControlPath& cp, const SystemSpec& sys,
                                std::size_t steps) {
  sys.validate();
  if (!in_state_space(sys, z0)) throw DomainError("controlled start is outside the state space");
  if (cp.times.size() < 2) fail_parameter("control path has no grid");
  if (steps == 0) steps = cp.times.size() - 1;
  const PotentialModel& pot = *sys.potential;
  const double h = cp.horizon / static_cast<double>(steps);

  auto rhs = [&](double s, const Vector& x, const Vector& v, Vector& dx, Vector& dv) {
    if (!pot.in_domain(x)) {
      std::ostringstream os;
      os << "controlled path leaves the domain at t = " << s;
      throw DomainError(os.str());
    }
    dx = v;
    dv = -sys.gamma * v - pot.gradient(x) + cp.control_rate(s, pot);
  };
  Vector x = z0.x, v = z0.v;
  Vector k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
  for (std::size_t k = 0; k < steps; ++k) {
    const double s = h * static_cast<double>(k);
    rhs(s, x, v, k1x, k1v);
    rhs(s + 0.5 * h, x + 0.5 * h * k1x, v + 0.5 * h * k1v, k2x, k2v);
    rhs(s + 0.5 * h, x + 0.5 * h * k2x, v + 0.5 * h * k2v, k3x, k3v);
    rhs(s + h, x + h * k3x, v + h * k3v, k4x, k4v);
    x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  if (!pot.in_domain(x)) {
    std::ostringstream os;
    os << "controlled path leaves the domain at t = " << cp.horizon;
    throw DomainError(os.str());
  }
  return {x, v};
}

}  // namespace levy
