#include "levy/assumptions.hpp"
#include "levy/error.hpp"
#include "levy/generator.hpp"
#include "levy/lyapunov.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace levy;
using namespace levy::test;

namespace {

LyapunovModel case1_model(const std::shared_ptr<const PotentialModel>& m, double theta) {
  const ConfigurationSampler s(*m);
  return LyapunovModel(m, estimate_case1_constants(*m, 1.0, s, 2000), theta);
}

LyapunovModel case2_model(const std::shared_ptr<const PotentialModel>& m, double theta) {
  const ConfigurationSampler s(*m);
  const auto rep = check_HV_HK(*m, s, 1000);
  return LyapunovModel(m, derive_case2_params(rep, 1.0, *m, s, 2000), theta);
}

void check_gradient(const LyapunovModel& lyap, const PhaseState& z) {
  Vector gx, gv;
  lyap.gradient(z, gx, gv);
  const double hx = 1e-6 * std::max(1.0, z.x.norm());
  const double hv = 1e-6 * std::max(1.0, z.v.norm());
  const Vector fx = central_gradient(
      [&](const Vector& x) { return lyap.value(PhaseState{x, z.v}); }, z.x, hx);
  const Vector fv = central_gradient(
      [&](const Vector& v) { return lyap.value(PhaseState{z.x, v}); }, z.v, hv);
  CHECK(relative_error(gx, fx) < 1e-5);
  CHECK(relative_error(gv, fv) < 1e-5);
}

}  // namespace

TEST_CASE("cutoff endpoints, midpoint and slope bound") {
  const double r0 = 2.5;
  CHECK(smooth_cutoff(r0, r0) == 0.0);
  CHECK(smooth_cutoff(2.0 * r0, r0) == 1.0);
  CHECK(smooth_cutoff(1.5 * r0, r0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(smooth_cutoff(0.0, r0) == 0.0);
  CHECK(smooth_cutoff(10.0 * r0, r0) == 1.0);
  double max_slope = 0.0;
  double prev = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double u = r0 + r0 * k / 10000.0;
    max_slope = std::max(max_slope, std::fabs(smooth_cutoff_slope(u, r0)));
    const double c = smooth_cutoff(u, r0);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(max_slope <= 2.0 / r0 + 1e-8);
  CHECK(smooth_cutoff_slope(1.5 * r0, r0) == doctest::Approx(2.0 / r0));
  CHECK_THROWS_AS(smooth_cutoff(1.0, 0.0), ParameterError);
}

TEST_CASE("kappa* arithmetic") {
  // theta0 = 4, beta0 = 4, C_U* = 2, Hessian sup 3, gamma = 1.
  const auto c = Case1Constants::from_primitives(2.0, 4.0, 2.0, 3.0, 1.0, 1.0);
  CHECK(c.theta0 == 4.0);
  CHECK(c.beta0 == 4.0);
  CHECK(c.kappa_star == doctest::Approx(1.0 / 164.0).epsilon(1e-15));
  CHECK(c.kappa == doctest::Approx(0.9 / 164.0).epsilon(1e-15));
  CHECK(c.kappa < c.kappa_star);
  CHECK(c.kappa_star <= 1.0 / std::sqrt(c.theta0));
  CHECK(c.derived_consistent());
  Case1Constants broken = c;
  broken.kappa *= 1.0 + 1e-15;
  CHECK(!broken.derived_consistent());
}

TEST_CASE("estimated constants for 1 + |x|^2") {
  const auto m = harmonic(1, 1);
  const auto c = estimate_case1_constants(*m, 1.0, ConfigurationSampler(*m), 2000);
  // |grad U| = 2|x| >= 1 iff U >= 5/4.
  CHECK(c.r0 >= 1.25);
  CHECK(c.kappa < c.kappa_star);
  CHECK(c.kappa_star <= 1.0 / std::sqrt(c.theta0));
  CHECK(c.derived_consistent());
}

TEST_CASE("case-1 value below the cutoff") {
  auto flat = std::make_shared<const PotentialModel>(1, 1, Confinement{}, Interaction{});
  const auto c = Case1Constants::from_primitives(1.0, 1.0, 1.0, 0.0, 2.0, 1.0);
  LyapunovModel lyap(flat, c, 1.0);
  PhaseState z{Vector::Zero(1), Vector::Zero(1)};
  CHECK(lyap.value(z) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  Vector gx, gv;
  lyap.gradient(z, gx, gv);
  CHECK(gv.isZero(0.0));
}

TEST_CASE("case-1 value matches a direct evaluation of the formula") {
  const auto m = lennard_jones();
  const LyapunovModel lyap = case1_model(m, 0.7);
  const auto& c = lyap.case1();
  RngStream rng(5, 1);
  for (int k = 0; k < 200; ++k) {
    const PhaseState z{spread_configuration(rng, 2, 3, 2.0, 0.5), random_vector(rng, 6, 3.0)};
    // Cutoff recomputed from its definition f(s) / (f(s) + f(1 - s)).
    const double u = m->value(z.x);
    const double s = (u - c.r0) / c.r0;
    double cut = s <= 0 ? 0.0 : s >= 1 ? 1.0 : std::exp(-1 / s) / (std::exp(-1 / s) + std::exp(-1 / (1 - s)));
    const Vector g = m->gradient(z.x);
    const double psi = c.kappa * cut * u * z.v.dot(g) / g.squaredNorm();
    const double want = std::pow(c.C_star + 0.5 * z.v.squaredNorm() + u + psi, 0.35);
    CHECK(lyap.value(z) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("case-1 energy sandwich at random states") {
  for (const auto& m : {harmonic(1, 1), harmonic(2, 3), lennard_jones()}) {
    const LyapunovModel lyap = case1_model(m, 0.7);
    RngStream rng(6, m->total_dim());
    for (int k = 0; k < 1000; ++k) {
      const double scale = std::pow(10.0, rng.uniform(-1.0, 2.0));
      const PhaseState z{spread_configuration(rng, m->particles(), m->dim(), scale, 0.3 * std::min(1.0, scale)),
                         random_vector(rng, static_cast<Eigen::Index>(m->total_dim()), scale)};
      const auto [lo, hi] = lyap.case1_sandwich(z);
      const double e = lyap.energy(z);
      REQUIRE(lo <= e);
      REQUIRE(e <= hi);
      REQUIRE(lyap.value(z) >= 1.0);
    }
  }
}

TEST_CASE("case-1 gradients match finite differences") {
  for (const auto& m : {harmonic(1, 2), lennard_jones()}) {
    const LyapunovModel lyap = case1_model(m, 0.7);
    RngStream rng(7, m->total_dim());
    for (int k = 0; k < 100; ++k) {
      const double scale = std::pow(10.0, rng.uniform(-0.5, 1.0));
      const PhaseState z{spread_configuration(rng, m->particles(), m->dim(), scale, 0.8),
                         random_vector(rng, static_cast<Eigen::Index>(m->total_dim()), scale)};
      check_gradient(lyap, z);
    }
  }
}

TEST_CASE("case-1 velocity gradient of the energy at a hand-set state") {
  const auto m = harmonic(1, 2);
  const auto c = Case1Constants::from_primitives(1.3, 2.0, 1.5, 2.5, 1.5, 1.0);
  LyapunovModel lyap(m, c, 0.8);
  PhaseState z{Vector(2), Vector(2)};
  z.x << 3.0, -1.0;  // U = 11, above 2 r0
  z.v << 0.5, 2.0;
  const double u = 11.0;
  const Vector g = 2.0 * z.x;
  const Vector want = z.v + c.kappa * 1.0 * u * g / g.squaredNorm();
  CHECK((lyap.energy_velocity_gradient(z, 0) - want).norm() < 1e-15);
  Vector gx, gv;
  lyap.gradient(z, gx, gv);
  const double e = lyap.energy(z);
  CHECK((gv - 0.4 * std::pow(e, -0.6) * want).norm() < 1e-14);
}

TEST_CASE("case-2 weight arithmetic") {
  const auto [a, b] = Case2Params::admissible_weights(1.0, 2.0, 1.0);
  CHECK(b == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(a == doctest::Approx(1.0 / 32.0).epsilon(1e-15));
  for (double cv : {0.1, 0.5, 1.0, 2.0, 10.0})
    for (double cvv : {0.1, 1.0, 4.0})
      for (double g : {0.1, 1.0, 5.0}) {
        const auto [aa, bb] = Case2Params::admissible_weights(cv, cvv, g);
        CHECK(aa + bb <= 0.5);
        CHECK(bb <= 0.5 * cv);
        CHECK(aa <= bb * cv / (2.0 * cvv) * (1.0 + 1e-15));
      }
}

TEST_CASE("case-2 energy without perturbations") {
  const auto m = coulomb_like(InteractionKind::Coulomb, 3, 3);
  Case2Params p;
  p.C_star = 2.0;
  LyapunovModel lyap(m, p, 0.6);
  RngStream rng(9, 9);
  const PhaseState z{spread_configuration(rng, 3, 3, 1.0, 0.3), random_vector(rng, 9)};
  CHECK(lyap.value(z) ==
        doctest::Approx(std::pow(2.0 + 0.5 * z.v.squaredNorm() + m->value(z.x), 0.3)).epsilon(1e-14));
}

TEST_CASE("case-2 perturbation bound") {
  for (const auto& m : {coulomb_like(InteractionKind::Coulomb, 3, 3),
                        coulomb_like(InteractionKind::LogCoulomb, 3, 2)}) {
    const LyapunovModel lyap = case2_model(m, 0.5);
    const auto& p = lyap.case2();
    const double n = static_cast<double>(m->particles());
    RngStream rng(10, m->dim());
    for (int k = 0; k < 1000; ++k) {
      const double scale = std::pow(10.0, rng.uniform(-1.0, 2.0));
      const PhaseState z{spread_configuration(rng, 3, m->dim(), scale, 1e-3),
                         random_vector(rng, static_cast<Eigen::Index>(m->total_dim()), scale)};
      const double pert = lyap.energy(z) - (p.C_star + 0.5 * z.v.squaredNorm() + m->value(z.x));
      const double bound = (p.a + p.b) * z.v.squaredNorm() / 2.0 + p.b * z.x.squaredNorm() / 2.0 +
                           n * p.a / 2.0;
      REQUIRE(std::fabs(pert) <= bound * (1.0 + 1e-12) + 1e-12);
    }
  }
}

TEST_CASE("case-2 sandwich and lower bound on sampled states") {
  for (const auto& m : {coulomb_like(InteractionKind::Coulomb, 3, 3),
                        coulomb_like(InteractionKind::LogCoulomb, 3, 2)}) {
    const LyapunovModel lyap = case2_model(m, 0.5);
    const auto& p = lyap.case2();
    CHECK(p.c1 > 0.0);
    CHECK(p.c1 <= p.c2);
    SamplerOptions o;
    o.seed = 99;
    const ConfigurationSampler s(*m, o);
    for (const auto& z : s.phase_states(1000)) {
      const double r = lyap.energy(z) / lyap.case2_sandwich_denominator(z);
      REQUIRE(r >= p.c1);
      REQUIRE(r <= p.c2);
      REQUIRE(lyap.value(z) >= 1.0);
    }
  }
}

TEST_CASE("case-2 velocity gradient at a hand-set two-particle state") {
  const auto m = coulomb_like(InteractionKind::Coulomb, 2, 3);
  Case2Params p;
  p.a = 0.1;
  p.b = 0.2;
  p.C_star = 3.0;
  LyapunovModel lyap(m, p, 1.0);
  PhaseState z{Vector(6), Vector(6)};
  z.x << 1, 0, 0, -1, 0, 0;
  z.v << 0.5, 1.0, 0.0, 0.0, -1.0, 2.0;
  // n(x1 - x2) = e1; the energy differentiates to a/N per unit vector.
  Vector want0(3), want1(3);
  want0 << 0.5 - 0.05 + 0.2, 1.0, 0.0;
  want1 << 0.0 + 0.05 - 0.2, -1.0, 2.0;
  CHECK((lyap.energy_velocity_gradient(z, 0) - want0).norm() < 1e-15);
  CHECK((lyap.energy_velocity_gradient(z, 1) - want1).norm() < 1e-15);
}

TEST_CASE("case-2 projection term is odd in the velocity") {
  const auto m = coulomb_like(InteractionKind::LogCoulomb, 3, 2);
  Case2Params p;
  p.a = 0.07;
  p.b = 0.0;
  p.C_star = 5.0;
  LyapunovModel lyap(m, p, 1.0);
  RngStream rng(12, 0);
  for (int k = 0; k < 20; ++k) {
    const Vector x = spread_configuration(rng, 3, 2, 1.0, 0.2);
    const Vector v = random_vector(rng, 6);
    Vector gp, gm, gz, tmp;
    lyap.energy_gradient({x, v}, gp, tmp);
    lyap.energy_gradient({x, Vector(-v)}, gm, tmp);
    lyap.energy_gradient({x, Vector::Zero(6)}, gz, tmp);
    CHECK(((gp - gz) + (gm - gz)).norm() < 1e-13);
    CHECK((gp - gz).norm() > 0.0);
  }
}

TEST_CASE("case-2 gradients match finite differences") {
  for (const auto& m : {coulomb_like(InteractionKind::Coulomb, 3, 3),
                        coulomb_like(InteractionKind::LogCoulomb, 3, 2)}) {
    const LyapunovModel lyap = case2_model(m, 0.5);
    RngStream rng(13, m->dim());
    for (int k = 0; k < 100; ++k) {
      const double scale = std::pow(10.0, rng.uniform(-0.5, 1.0));
      const PhaseState z{spread_configuration(rng, 3, m->dim(), scale, 0.3),
                         random_vector(rng, static_cast<Eigen::Index>(m->total_dim()), scale)};
      check_gradient(lyap, z);
    }
  }
}

TEST_CASE("Lyapunov functions are at least 1 on stratified scans") {
  const auto lj = lennard_jones();
  const auto co = coulomb_like(InteractionKind::Coulomb, 3, 3);
  const auto lc = coulomb_like(InteractionKind::LogCoulomb, 3, 2);
  const LyapunovModel models[] = {case1_model(lj, 0.7), case1_model(harmonic(1, 1), 0.7),
                                  case2_model(co, 0.7), case2_model(lc, 0.5)};
  for (const auto& lyap : models) {
    for (const auto& z : stratified_drift_scan(lyap.potential(), 10000))
      REQUIRE(lyap.value(z) >= 1.0);
  }
}

TEST_CASE("Lyapunov functions are comparable to the energy at high energy") {
  const auto lj = lennard_jones();
  const auto lc = coulomb_like(InteractionKind::LogCoulomb, 3, 2);
  for (const auto& lyap : {case1_model(lj, 0.7), case2_model(lc, 0.5)}) {
    const auto& m = lyap.potential();
    double lo = kInf, hi = 0.0;
    std::size_t used = 0;
    for (const auto& z : stratified_drift_scan(m, 4000)) {
      const double h = 0.5 * z.v.squaredNorm() + m.value(z.x);
      if (h < 10.0 || h > 1e4) continue;
      const double r = lyap.value(z) / std::pow(1.0 + z.v.squaredNorm() + m.value(z.x), 0.5 * lyap.theta());
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ++used;
    }
    CHECK(used > 100);
    CHECK(lo > 0.2);
    CHECK(hi < 5.0);
  }
}

TEST_CASE("constructors reject inconsistent inputs") {
  const auto m = lennard_jones();
  auto c = Case1Constants::from_primitives(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(LyapunovModel(m, c, 0.0), ParameterError);
  c.kappa_star *= 2.0;
  CHECK_THROWS_AS(LyapunovModel(m, c, 0.5), ParameterError);
  CHECK_THROWS_AS(LyapunovModel(m, Case2Params{}, 0.5), UnsupportedModelError);
  CHECK(default_theta(1.5) == 0.75);
}
