#include "levy/control.hpp"
#include "levy/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace levy;
using namespace levy::test;

namespace {

SystemSpec quiet_system(std::shared_ptr<const PotentialModel> m, double gamma = 1.0) {
  SystemSpec s;
  s.n = m->particles();
  s.d = m->dim();
  s.gamma = gamma;
  s.potential = std::move(m);
  s.noise = NoiseSpec(std::vector<double>(s.n, 1.5), true);
  return s;
}

double distance(const PhaseState& a, const PhaseState& b) {
  return std::sqrt((a.x - b.x).squaredNorm() + (a.v - b.v).squaredNorm());
}

PhaseState lj_state(double a) {
  PhaseState z{Vector::Zero(6), Vector::Zero(6)};
  z.x << a, 0, 0, -a, 0, 0;
  return z;
}

}  // namespace

TEST_CASE("rest-to-rest quintic") {
  HermitePlan p({0.0, 1.0}, {Vector::Zero(1), Vector::Ones(1)}, {Vector::Zero(1), Vector::Zero(1)});
  for (double s = 0.0; s <= 1.0; s += 0.05) {
    const double want = 10 * std::pow(s, 3) - 15 * std::pow(s, 4) + 6 * std::pow(s, 5);
    const double rate = 30 * s * s - 60 * std::pow(s, 3) + 30 * std::pow(s, 4);
    CHECK(p.position(s)[0] == doctest::Approx(want).epsilon(1e-13));
    CHECK(p.velocity(s)[0] == doctest::Approx(rate).epsilon(1e-12));
  }
  CHECK(p.acceleration(0.0)[0] == doctest::Approx(0.0));
  CHECK(p.acceleration(1.0)[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS(HermitePlan({0.0}, {Vector::Zero(1)}, {Vector::Zero(1)}), ParameterError);
  CHECK_THROWS_AS(HermitePlan({0.0, 0.0}, {Vector::Zero(1), Vector::Zero(1)},
                              {Vector::Zero(1), Vector::Zero(1)}),
                  ParameterError);
}

TEST_CASE("plan through several knots is twice differentiable") {
  HermitePlan p({0.0, 0.4, 1.0}, {Vector::Zero(1), Vector::Constant(1, 2.0), Vector::Ones(1)},
                {Vector::Zero(1), Vector::Constant(1, 1.0), Vector::Zero(1)});
  const double e = 1e-7;
  CHECK(p.position(0.4)[0] == doctest::Approx(2.0));
  CHECK(p.velocity(0.4 - e)[0] == doctest::Approx(p.velocity(0.4 + e)[0]).epsilon(1e-5));
  CHECK(std::fabs(p.acceleration(0.4 - e)[0] - p.acceleration(0.4 + e)[0]) < 1e-3);
}

TEST_CASE("staying at the rest point needs no control") {
  const SystemSpec sys = quiet_system(harmonic(2, 2));
  const PhaseState rest{Vector::Zero(4), Vector::Zero(4)};
  const ControlPath cp = synthesize_control(rest, rest, 1.0, sys);
  for (const auto& u : cp.controls) CHECK(u.norm() == 0.0);
  CHECK(distance(integrate_controlled(rest, cp, sys), rest) == 0.0);
}

TEST_CASE("harmonic round trip") {
  const SystemSpec sys = quiet_system(harmonic(), 0.8);
  const PhaseState a{Vector::Zero(1), Vector::Zero(1)};
  const PhaseState b{Vector::Ones(1), Vector::Zero(1)};
  const ControlPath cp = synthesize_control(a, b, 1.0, sys);
  CHECK(cp.controls.front().norm() == 0.0);
  CHECK(cp.positions.back()[0] == doctest::Approx(1.0));
  CHECK(distance(integrate_controlled(a, cp, sys), b) < 1e-6);

  const PhaseState c{Vector::Constant(1, -0.5), Vector::Constant(1, 2.0)};
  const ControlPath back = synthesize_control(b, c, 2.5, sys);
  CHECK(distance(integrate_controlled(b, back, sys), c) < 1e-6);
}

TEST_CASE("control rate inverts the velocity equation") {
  const auto m = harmonic();
  const SystemSpec sys = quiet_system(m, 0.5);
  const ControlPath cp = synthesize_control({Vector::Zero(1), Vector::Zero(1)},
                                            {Vector::Ones(1), Vector::Zero(1)}, 1.0, sys);
  for (double s : {0.1, 0.5, 0.9}) {
    const Vector rate = cp.control_rate(s, *m);
    const Vector want = cp.plan.acceleration(s) + 0.5 * cp.plan.velocity(s) + m->gradient(cp.plan.position(s));
    CHECK(rate[0] == doctest::Approx(want[0]).epsilon(1e-12));
  }
}

TEST_CASE("Lennard-Jones swap keeps the pair apart") {
  const auto m = lennard_jones();
  const SystemSpec sys = quiet_system(m);
  const PhaseState a = lj_state(0.6), b = lj_state(-0.6);
  const ControlPath cp = synthesize_control(a, b, 2.0, sys);
  CHECK(cp.delta_plan == doctest::Approx(0.5 * std::pow(2.0, 1.0 / 6.0)));
  CHECK(cp.detours >= 1);
  CHECK(cp.min_pair >= cp.delta_plan);
  double scanned = kInf;
  for (const auto& x : cp.positions) scanned = std::min(scanned, min_pair_distance(x, 3));
  CHECK(scanned >= cp.delta_plan);
  CHECK(plan_min_pair_distance(cp.plan, 3, 20000) >= cp.delta_plan);
  const PhaseState end = integrate_controlled(a, cp, sys);
  CHECK(distance(end, b) < 1e-3);
}

TEST_CASE("planning failures") {
  const SystemSpec sys = quiet_system(lennard_jones());
  ControlOptions none;
  none.max_detours = 0;
  CHECK_THROWS_AS(synthesize_control(lj_state(0.6), lj_state(-0.6), 2.0, sys, none), PlanningError);
  // The start itself is closer than the planning margin.
  CHECK_THROWS_AS(synthesize_control(lj_state(0.2), lj_state(0.6), 2.0, sys), PlanningError);
  CHECK_THROWS_AS(synthesize_control(lj_state(0.6), lj_state(0.0), 2.0, sys), DomainError);
  CHECK_THROWS_AS(synthesize_control(lj_state(0.6), lj_state(0.7), 0.0, sys), ParameterError);
}

TEST_CASE("controlled path leaving the domain") {
  const SystemSpec sys = quiet_system(lennard_jones());
  const ControlPath cp = synthesize_control(lj_state(0.6), lj_state(0.7), 1.0, sys);
  // With four steps of 0.25 the first midpoint stage puts both particles at
  // the origin.
  PhaseState z = lj_state(0.6);
  z.v << -4.8, 0, 0, 4.8, 0, 0;
  try {
    integrate_controlled(z, cp, sys, 4);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("t = 0.125") != std::string::npos);
  }
}
