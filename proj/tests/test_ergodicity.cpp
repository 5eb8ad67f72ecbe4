#include "levy/ergodicity.hpp"
#include "levy/error.hpp"
#include "levy/lyapunov.hpp"
#include "levy/sampling.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace levy;
using namespace levy::test;

namespace {

SystemSpec make_system(std::shared_ptr<const PotentialModel> m, double alpha, double gamma = 1.0,
                       bool quiet = false) {
  SystemSpec s;
  s.n = m->particles();
  s.d = m->dim();
  s.gamma = gamma;
  s.potential = std::move(m);
  s.noise = NoiseSpec(std::vector<double>(s.n, alpha), quiet);
  s.scheme = Scheme::ExactOUSplitting;
  s.h = 1e-2;
  return s;
}

LyapunovModel harmonic_lyapunov(double theta = 0.7) {
  auto m = harmonic();
  const auto c = estimate_case1_constants(*m, 1.0, ConfigurationSampler(*m), 2000);
  return LyapunovModel(m, c, theta);
}

PhaseState state1(double x, double v) { return {Vector::Constant(1, x), Vector::Constant(1, v)}; }

double one(const PhaseState&) { return 1.0; }
double energy1(const PhaseState& z) { return 0.5 * z.v.squaredNorm() + 1.0 + z.x.squaredNorm(); }

std::vector<PhaseState> cloud(RngStream& rng, std::size_t n, double shift) {
  std::vector<PhaseState> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(state1(shift + rng.normal(), rng.normal()));
  return out;
}

}  // namespace

TEST_CASE("empirical moment of a frozen ensemble") {
  const auto lyap = harmonic_lyapunov();
  const auto m = harmonic();
  SimulationOptions o;
  o.horizon = 1.0;
  o.snapshots = {0.0, 0.5, 1.0};
  o.trajectories = 3;
  // Zero noise from the rest point is a fixed point of every scheme.
  const auto b = simulate(make_system(m, 1.5, 1.0, true), state1(0, 0), o);
  const auto c = empirical_moment(b, lyap, o.snapshots);
  for (double v : c.values) CHECK(v == doctest::Approx(lyap.value(state1(0, 0))).epsilon(1e-14));
  for (double s : c.stderrs) CHECK(s < 1e-12);
  CHECK_THROWS_AS(empirical_moment(b, lyap, {0.25}), ParameterError);
}

TEST_CASE("empirical moment of a single state") {
  const auto lyap = harmonic_lyapunov();
  SimulationOptions o;
  o.horizon = 0.1;
  o.snapshots = {0.0, 0.1};
  const auto b = simulate(make_system(harmonic(), 1.5), state1(0.3, -2.0), o);
  const auto c = empirical_moment(b, lyap, {0.0});
  CHECK(c.values[0] == lyap.value(state1(0.3, -2.0)));
}

TEST_CASE("weighted distance of identical ensembles") {
  RngStream rng(1, 0);
  const auto a = cloud(rng, 200, 0.0);
  TvOptions all;
  all.coverage = 1.0;
  CHECK(weighted_tv_estimate(a, a, one, energy1, 1, all) == 0.0);
  // With the default window the top energies form a shared tail whose weight
  // is counted on both sides.
  const double tv = weighted_tv_estimate(a, a, one, energy1, 1);
  CHECK(tv == doctest::Approx(2.0 * 2.0 / 200.0));
}

TEST_CASE("mutually singular ensembles at unit weight") {
  RngStream rng(2, 0);
  auto a = cloud(rng, 100, 0.0);
  auto b = cloud(rng, 100, 40.0);
  CHECK(weighted_tv_estimate(a, b, one, energy1, 1) == doctest::Approx(2.0));
  TvOptions all;
  all.coverage = 1.0;
  CHECK(weighted_tv_estimate(a, b, one, energy1, 1, all) == doctest::Approx(2.0));
}

TEST_CASE("atoms each in their own cell match the exhaustive sum") {
  // Atoms on the lattice {0..3} x {0..3}; 4 bins per coordinate put each one
  // in its own cell.
  auto atom = [](int i, int j) { return state1(i, j); };
  const std::vector<std::pair<int, int>> sa = {{0, 0}, {0, 0}, {1, 2}, {3, 3}, {2, 1}};
  const std::vector<std::pair<int, int>> sb = {{0, 0}, {1, 2}, {1, 2}, {0, 3}};
  std::vector<PhaseState> a, b;
  for (auto [i, j] : sa) a.push_back(atom(i, j));
  for (auto [i, j] : sb) b.push_back(atom(i, j));
  auto weight = [](const PhaseState& z) { return 1.0 + z.x[0] * z.x[0] + 0.5 * z.v[0]; };
  std::map<std::pair<int, int>, double> p, q;
  for (auto s : sa) p[s] += 1.0 / sa.size();
  for (auto s : sb) q[s] += 1.0 / sb.size();
  double brute = 0.0;
  std::map<std::pair<int, int>, bool> seen;
  for (const auto* src : {&sa, &sb})
    for (auto s : *src) {
      if (seen[s]) continue;
      seen[s] = true;
      brute += std::fabs(p[s] - q[s]) * weight(atom(s.first, s.second));
    }
  TvOptions o;
  o.bins = 4;
  o.coverage = 1.0;
  CHECK(weighted_tv_estimate(a, b, weight, energy1, 1, o) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("weighted distance is symmetric, bounded and refines upward") {
  RngStream rng(3, 0);
  const auto a = cloud(rng, 500, 0.0);
  const auto b = cloud(rng, 300, 0.7);
  const auto lyap = harmonic_lyapunov();
  const double ab = weighted_tv_estimate(a, b, lyap), ba = weighted_tv_estimate(b, a, lyap);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
  double bound = 0.0;
  for (const auto& z : a) bound += lyap.value(z) / a.size();
  for (const auto& z : b) bound += lyap.value(z) / b.size();
  CHECK(ab > 0.0);
  CHECK(ab <= bound);

  TvOptions o;
  o.coverage = 1.0;
  double prev = 0.0;
  for (std::size_t bins : {1u, 2u, 4u, 8u, 16u}) {
    o.bins = bins;
    const double tv = weighted_tv_estimate(a, b, one, energy1, 1, o);
    CHECK(tv >= prev - 1e-14);
    prev = tv;
  }
  CHECK_THROWS_AS(weighted_tv_estimate({}, b, lyap), ParameterError);
}

TEST_CASE("exact exponentials are fitted exactly") {
  std::vector<double> t, v;
  for (int k = 0; k <= 5; ++k) {
    t.push_back(k);
    v.push_back(std::exp(-2.0 * k));
  }
  const DecayFit f = fit_decay_rate(t, v);
  CHECK(f.rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.first == 0);
  CHECK(f.last == 5);
  for (double rate : {0.05, 0.37, 3.0}) {
    for (int k = 0; k <= 5; ++k) v[k] = 7.0 * std::exp(-rate * t[k]);
    CHECK(fit_decay_rate(t, v).rate == doctest::Approx(rate).epsilon(0.01));
  }
}

TEST_CASE("constant series has zero rate") {
  const DecayFit f = fit_decay_rate({0, 1, 2, 3}, {2.5, 2.5, 2.5, 2.5});
  CHECK(f.rate == 0.0);
}

TEST_CASE("perturbed exponential") {
  RngStream rng(9, 0);
  std::vector<double> t, v;
  for (int k = 0; k <= 10; ++k) {
    t.push_back(0.5 * k);
    v.push_back(std::exp(-t.back()) * (1.0 + 0.01 * rng.normal()));
  }
  const DecayFit f = fit_decay_rate(t, v);
  CHECK(f.rate >= 0.9);
  CHECK(f.rate <= 1.1);
  CHECK(f.r2 > 0.99);
}

TEST_CASE("fit window and errors") {
  const std::vector<double> t = {0, 1, 2, 3, 4, 5};
  const std::vector<double> v = {8, 4, 2, 1, 0.9, 1.1};
  const DecayFit f = fit_decay_rate(t, v, 0.95);
  CHECK(f.last == 3);
  CHECK(f.rate == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(fit_decay_rate(t, v, 1.5), FitError);
  CHECK_THROWS_AS(fit_decay_rate({0, 1, 2, 3}, {1, 0.5, 0.0, 0.1}), FitError);
  CHECK_THROWS_AS(fit_decay_rate({0, 1, 2}, {1, 0.5, 0.25}), FitError);
  CHECK_THROWS_AS(fit_decay_rate({0, 2, 1, 3}, {1, 1, 1, 1}), ParameterError);
}

TEST_CASE("Brownian harmonic particle reaches the Gibbs law") {
  const double gamma = 1.0;
  const auto m = harmonic();
  const SystemSpec sys = make_system(m, 2.0, gamma);
  CHECK(stationary_inverse_temperature(sys) == gamma);
  SimulationOptions o;
  o.horizon = 30.0;
  for (int k = 0; k <= 60; ++k) o.snapshots.push_back(0.5 * k);
  o.trajectories = 400;
  o.seed = 11;
  const auto b = simulate(sys, state1(0.5, 0.0), o);
  const GibbsReport r = gibbs_oracle_check(b, sys, gamma, 10.0);
  for (const auto& s : r.statistics) {
    CAPTURE(s.name);
    CHECK(std::fabs(s.z_score) < 4.0);
  }
  // exp(-gamma (v^2 / 2 + 1 + x^2)) is Gaussian with variances 1/gamma and 1/(2 gamma).
  CHECK(r.at("v2").reference == doctest::Approx(1.0 / gamma).epsilon(1e-6));
  CHECK(r.at("potential").reference == doctest::Approx(1.0 + 0.5 / gamma).epsilon(1e-6));
  CHECK(r.at("xv_0").reference == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::fabs(r.at("xv_0").empirical) < 4.0 * r.at("xv_0").standard_error);
  CHECK_THROWS_AS(r.at("missing"), ParameterError);

  // The Lyapunov moment settles at its Gibbs expectation, here by a 2-d
  // tensor trapezoid rule over the Gaussian density.
  const auto lyap = harmonic_lyapunov();
  double num = 0.0, den = 0.0;
  const int grid = 600;
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      const double x = -6.0 + 12.0 * i / grid, v = -9.0 + 18.0 * j / grid;
      const double w = std::exp(-gamma * (0.5 * v * v + x * x));
      num += w * lyap.value(state1(x, v));
      den += w;
    }
  const double expected = num / den;
  const auto c = empirical_moment(b, lyap, {20.0, 25.0, 30.0});
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::fabs(c.values[k] - expected) < 4.0 * c.stderrs[k]);
}

TEST_CASE("Gibbs oracle rejects stable noise and large systems") {
  SimulationOptions o;
  o.horizon = 0.1;
  o.snapshots = {0.1};
  o.trajectories = 2;
  const SystemSpec stable = make_system(harmonic(), 1.5);
  const auto b = simulate(stable, state1(0, 0), o);
  CHECK_THROWS_AS(gibbs_oracle_check(b, stable, 1.0), UnsupportedModelError);
  const SystemSpec big = make_system(harmonic(3, 2), 2.0);
  const auto bb = simulate(big, {Vector::Zero(6), Vector::Zero(6)}, o);
  CHECK_THROWS_AS(gibbs_oracle_check(bb, big, 1.0), UnsupportedModelError);
}

TEST_CASE("two-start diagnostic decays for the confined particle") {
  const auto lyap = harmonic_lyapunov();
  const SystemSpec sys = make_system(harmonic(), 1.5);
  const std::vector<double> times = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
  std::vector<double> rates;
  for (std::size_t mcount : {400u, 800u, 1600u}) {
    TwoStartOptions o;
    o.trajectories = mcount;
    o.seed = 5;
    const auto r = two_start_diagnostic(sys, lyap, state1(0.0, 0.0), state1(30.0, 0.0), times, o);
    CAPTURE(mcount);
    CHECK(r.curve.fit.rate > 0.0);
    MESSAGE("M = " << mcount << " rate " << r.curve.fit.rate << " r2 " << r.curve.fit.r2 << " floor "
                   << r.noise_floor << " window " << r.curve.fit.last + 1);
    rates.push_back(r.curve.fit.rate);
  }
  for (double r : rates) CHECK(r == doctest::Approx(rates.back()).epsilon(0.3));
}
