#include "levy/error.hpp"
#include "levy/generator.hpp"
#include "levy/quadrature.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace levy;
using namespace levy::test;

namespace {

// cos<xi, v + w> - cos<xi, v>, written to avoid cancellation for small w.
JumpSlice cosine_slice(const Vector& xi, const Vector& v) {
  JumpSlice s;
  const double phase = xi.dot(v);
  s.base = std::cos(phase);
  s.increment = [xi, phase](const Vector& w) {
    const double p = xi.dot(w);
    return -2.0 * std::sin(phase + 0.5 * p) * std::sin(0.5 * p);
  };
  s.tail = [](double) { return TailModel{0.0, 2.0, 1.0}; };
  return s;
}

Vector frequency(std::size_t d, double norm) {
  Vector xi = Vector::Zero(static_cast<Eigen::Index>(d));
  if (d == 1) {
    xi[0] = norm;
  } else {
    xi[0] = 0.6 * norm;
    xi[1] = 0.8 * norm;
  }
  return xi;
}

SystemSpec system_for(std::shared_ptr<const PotentialModel> m, double alpha, double gamma = 1.0) {
  SystemSpec s;
  s.n = m->particles();
  s.d = m->dim();
  s.gamma = gamma;
  s.potential = std::move(m);
  s.noise = NoiseSpec::uniform(s.n, alpha);
  return s;
}

}  // namespace

TEST_CASE("Levy constant") {
  CHECK(levy_constant(1, 1.0) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
  for (std::size_t d : {1u, 2u, 3u, 5u})
    for (double a : {0.1, 0.6, 1.0, 1.5, 1.99}) CHECK(levy_constant(d, a) > 0.0);
  CHECK_THROWS_AS(levy_constant(1, 2.0), UnsupportedModelError);
  CHECK_THROWS_AS(levy_constant(1, 0.0), ParameterError);
  CHECK_THROWS_AS(levy_constant(0, 1.0), ParameterError);
}

TEST_CASE("cosine oracle reproduces the characteristic exponent") {
  const QuadratureSpec q;
  for (std::size_t d : {1u, 2u, 3u})
    for (double alpha : {0.6, 1.0, 1.5})
      for (double norm : {0.5, 1.0, 2.0}) {
        CAPTURE(d);
        CAPTURE(alpha);
        CAPTURE(norm);
        const Vector xi = frequency(d, norm);
        const Vector v = Vector::Constant(static_cast<Eigen::Index>(d), 0.3);
        const JumpSlice s = cosine_slice(xi, v);
        const JumpResult r = jump_integral(s, d, alpha, q);
        const double exact = -std::pow(norm, alpha) * std::cos(xi.dot(v));
        CHECK(std::fabs(r.value - exact) < 1e-3);
        CHECK(std::fabs(r.value - exact) <= r.error);
        const JumpResult fine = jump_integral(s, d, alpha, q.refined());
        CHECK(std::fabs(fine.value - r.value) <= r.error);
      }
}

TEST_CASE("cosine at the origin in one dimension with unit index") {
  const Vector xi = Vector::Ones(1);
  const JumpResult r = jump_integral(cosine_slice(xi, Vector::Zero(1)), 1, 1.0, QuadratureSpec{});
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("linear functions of the velocity have zero jump part") {
  for (std::size_t d : {1u, 2u, 3u}) {
    Vector c(static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = 0.5 + k;
    JumpSlice s;
    s.base = 0.0;
    s.increment = [c](const Vector& w) { return c.dot(w); };
    s.tail = [c](double) { return TailModel{1.0, c.norm(), std::numeric_limits<double>::quiet_NaN()}; };
    const JumpResult r = jump_integral(s, d, 1.5, QuadratureSpec{});
    CHECK(std::fabs(r.inner) < 1e-12);
    CHECK(std::fabs(r.value) <= r.error + 1e-12);
  }
}

TEST_CASE("inner part of |v|^2 is the second moment of the small jumps") {
  for (double alpha : {0.6, 1.0, 1.5}) {
    JumpSlice s;
    s.base = 0.09;
    const double v = 0.3;
    s.increment = [v](const Vector& w) { return 2.0 * v * w[0] + w[0] * w[0]; };
    s.tail = [](double) { return TailModel{2.0, 2.0, std::numeric_limits<double>::quiet_NaN()}; };
    const JumpResult r = jump_integral(s, 1, alpha, QuadratureSpec{});
    const double closed = 2.0 * levy_constant(1, alpha) / (2.0 - alpha);
    CAPTURE(alpha);
    CHECK(r.inner == doctest::Approx(closed).epsilon(1e-6));
    // The far field of |v|^2 is not integrable for alpha < 2.
    CHECK(r.error == kInf);
  }
}

TEST_CASE("generator of linear test functions") {
  const auto m = harmonic(2, 2);
  const SystemSpec sys = system_for(m, 1.3, 0.7);
  RngStream rng(2, 2);
  const PhaseState z{random_vector(rng, 4), random_vector(rng, 4)};
  const Vector a = random_vector(rng, 4), b = random_vector(rng, 4);
  LambdaPhaseFunction fx([a](const PhaseState& s) { return a.dot(s.x); },
                         [a](const PhaseState&, Vector& gx, Vector& gv) {
                           gx = a;
                           gv = Vector::Zero(4);
                         });
  const auto rx = apply_generator(fx, z, sys, QuadratureSpec{});
  CHECK(rx.value == doctest::Approx(a.dot(z.v)).epsilon(1e-14));
  CHECK(rx.jump == 0.0);

  LambdaPhaseFunction fv(
      [b](const PhaseState& s) { return b.dot(s.v); },
      [b](const PhaseState&, Vector& gx, Vector& gv) {
        gx = Vector::Zero(4);
        gv = b;
      },
      {}, [b](const PhaseState&, std::size_t, double) { return TailModel{1.0, b.norm(), std::numeric_limits<double>::quiet_NaN()}; });
  const auto rv = apply_generator(fv, z, sys, QuadratureSpec{});
  const double want = -b.dot(0.7 * z.v + m->gradient(z.x));
  CHECK(std::fabs(rv.value - want) <= rv.error + 1e-12);
  CHECK(std::fabs(rv.jump) <= rv.jump_error + 1e-12);
}

TEST_CASE("generator is linear within the error bounds") {
  const auto m = lennard_jones();
  const SystemSpec sys = system_for(m, 1.5);
  const ConfigurationSampler s(*m);
  const LyapunovModel v1(m, estimate_case1_constants(*m, 1.0, s, 2000), 0.7);
  const LyapunovModel v2(m, v1.case1(), 0.4);
  LambdaPhaseFunction sum(
      [&](const PhaseState& z) { return v1.value(z) + v2.value(z); },
      [&](const PhaseState& z, Vector& gx, Vector& gv) {
        Vector ax, av;
        v1.gradient(z, gx, gv);
        v2.gradient(z, ax, av);
        gx += ax;
        gv += av;
      },
      {}, [](const PhaseState&, std::size_t, double) { return TailModel{0.7, 50.0, std::numeric_limits<double>::quiet_NaN()}; });
  RngStream rng(21, 0);
  for (int k = 0; k < 5; ++k) {
    const PhaseState z{spread_configuration(rng, 2, 3, 1.5, 0.9), random_vector(rng, 6)};
    const auto a = apply_generator(v1, z, sys, QuadratureSpec{});
    const auto b = apply_generator(v2, z, sys, QuadratureSpec{});
    const auto c = apply_generator(sum, z, sys, QuadratureSpec{});
    CHECK(std::fabs(c.value - a.value - b.value) <= a.error + b.error + c.error);
  }
}

TEST_CASE("generator of the Lyapunov function is negative at high energy") {
  const auto m = lennard_jones();
  const SystemSpec sys = system_for(m, 1.5);
  const LyapunovModel lyap(m, estimate_case1_constants(*m, 1.0, ConfigurationSampler(*m), 2000), 0.7);
  PhaseState z{Vector(6), Vector(6)};
  z.x << 40, 0, 0, -40, 0, 0;
  z.v << 0, 30, 0, 0, -30, 0;
  const auto g = apply_generator(lyap, z, sys, QuadratureSpec{});
  CHECK(g.value + g.error < 0.0);
  MESSAGE("generator at H = " << hamiltonian(sys, z) << ": " << g.value << " +- " << g.error);
}

TEST_CASE("drift rate of synthetic data") {
  CHECK(drift_rate({-5, -1, 3}, {10, 2, 1}, {0, 0, 0}, 4.0) == doctest::Approx(0.9));
  CHECK_THROWS_AS(drift_rate({}, {}, {}, 1.0), ParameterError);
}

TEST_CASE("drift certificate for the damped harmonic particle") {
  const auto m = harmonic(1, 1);
  const SystemSpec sys = system_for(m, 1.5);
  const LyapunovModel lyap(m, estimate_case1_constants(*m, 1.0, ConfigurationSampler(*m), 2000), 0.7);
  const auto scan = stratified_drift_scan(*m, 500);
  const DriftReport rep = verify_drift(lyap, sys, scan, QuadratureSpec{});
  CHECK(rep.certified);
  CHECK(rep.lambda > 0.0);
  CHECK(rep.violations.empty());
  CHECK(rep.C <= rep.C_cap);
  CHECK(rep.sweep.size() == 64);
  // The certificate can be rechecked from the report alone.
  for (const auto& r : rep.records) REQUIRE(r.generator + r.error <= -rep.lambda * r.lyapunov + rep.C + 1e-12 * rep.C);
}

TEST_CASE("compact scans still give a valid report") {
  const auto m = harmonic(1, 1);
  const SystemSpec sys = system_for(m, 1.5);
  const LyapunovModel lyap(m, estimate_case1_constants(*m, 1.0, ConfigurationSampler(*m), 2000), 0.7);
  std::vector<PhaseState> scan;
  for (int k = 0; k < 20; ++k) scan.push_back({Vector::Constant(1, 0.05 * k), Vector::Constant(1, 0.1 - 0.01 * k)});
  const DriftReport rep = verify_drift(lyap, sys, scan, QuadratureSpec{});
  for (const auto& r : rep.records) {
    const bool ok = r.generator + r.error <= -rep.lambda * r.lyapunov + rep.C + 1e-12 * rep.C;
    const bool listed = std::find(rep.violations.begin(), rep.violations.end(), r.index) != rep.violations.end();
    CHECK((ok || listed));
  }
  CHECK(rep.lambda > 0.0);
}

TEST_CASE("drift verification errors") {
  const auto m = lennard_jones();
  const SystemSpec sys = system_for(m, 1.5);
  const LyapunovModel lyap(m, estimate_case1_constants(*m, 1.0, ConfigurationSampler(*m), 500), 0.7);
  CHECK_THROWS_AS(verify_drift(lyap, sys, {}, QuadratureSpec{}), ParameterError);
  std::vector<PhaseState> bad = {{Vector::Zero(6), Vector::Zero(6)}};
  try {
    verify_drift(lyap, sys, bad, QuadratureSpec{});
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("scan state 0") != std::string::npos);
  }
}

TEST_CASE("quadrature specification validation") {
  QuadratureSpec q;
  q.eps = 0.0;
  CHECK_THROWS_AS(q.validate(), ParameterError);
  QuadratureSpec r;
  const auto f = r.refined();
  CHECK(f.max_angular_points == 2 * r.max_angular_points);
  CHECK(f.max_circle_points == 2 * r.max_circle_points);
}
