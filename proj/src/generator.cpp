#include "levy/generator.hpp"

#include "levy/error.hpp"
#include "levy/parallel.hpp"
#include "levy/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace levy {

namespace {

constexpr double kEps = 2.220446049250313e-16;

}  // namespace

GeneratorValue apply_generator(const PhaseFunction& f, const PhaseState& z, const SystemSpec& sys,
                               const QuadratureSpec& q) {
  if (!in_state_space(sys, z)) throw DomainError("generator evaluated outside the state space");
  const std::size_t d = sys.d;
  Vector gx, gv;
  f.gradient(z, gx, gv);
  const Vector drift = sys.gamma * z.v + sys.potential->gradient(z.x);

  GeneratorValue out;
  const double a = gx.dot(z.v);
  const double b = gv.dot(drift);
  out.transport = a - b;
  // Transport and force terms can cancel to many digits near the singular set.
  const double rounding = 16.0 * kEps * (gx.norm() * z.v.norm() + gv.norm() * drift.norm());

  if (!sys.noise.deterministic()) {
    for (std::size_t i = 0; i < sys.n; ++i) {
      const JumpSlice s = f.slice(z, i, d);
      if (sys.noise.brownian(i)) {
        const double scale = 1.0 + particle(z.v, i, d).norm();
        const auto [val, err] = velocity_laplacian(s, d, scale);
        out.jump += val;
        out.jump_error += err;
      } else {
        const JumpResult r = jump_integral(s, d, sys.noise.alpha(i), q);
        out.jump += r.value;
        out.jump_error += r.error;
      }
    }
  }
  out.value = out.transport + out.jump;
  out.error = out.jump_error + rounding;
  return out;
}

double drift_rate(const std::vector<double>& g, const std::vector<double>& lyap,
                  const std::vector<double>& err, double C) {
  if (g.empty() || g.size() != lyap.size() || g.size() != err.size())
    fail_parameter("drift_rate needs equally sized, nonempty inputs");
  double lam = kInf;
  for (std::size_t k = 0; k < g.size(); ++k) lam = std::min(lam, (C - g[k] - err[k]) / lyap[k]);
  return lam;
}

void fit_drift(const std::vector<double>& g, const std::vector<double>& lyap,
               const std::vector<double>& err, const DriftOptions& options, DriftReport& report) {
  if (g.empty()) fail_parameter("drift fit needs at least one state");
  if (options.candidates < 2) fail_parameter("drift fit needs at least two candidates");
  double cap = options.C_cap;
  if (std::isnan(cap)) {
    double gmax = 0.0;
    for (double x : g) gmax = std::max(gmax, std::fabs(x));
    cap = gmax > 0.0 ? 10.0 * gmax : 1.0;
  }
  if (!(cap > 0.0)) fail_parameter("drift fit needs a positive C cap");
  report.C_cap = cap;
  report.sweep.clear();
  const double lo = cap * 1e-6;
  double best_lambda = -kInf, best_C = cap;
  for (std::size_t m = 0; m < options.candidates; ++m) {
    const double t = static_cast<double>(m) / static_cast<double>(options.candidates - 1);
    const double C = m + 1 == options.candidates ? cap : lo * std::pow(cap / lo, t);
    const double lam = drift_rate(g, lyap, err, C);
    report.sweep.emplace_back(C, lam);
    if (lam > best_lambda) {
      best_lambda = lam;
      best_C = C;
    }
  }
  report.lambda = best_lambda;
  report.C = best_C;
  // A state with g + err >= cap fails (lambda, C) for every lambda >= 0 and
  // every candidate C.
  report.violations.clear();
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!(g[k] + err[k] < cap)) report.violations.push_back(k);
  report.certified = std::isfinite(report.lambda) && report.lambda > 0.0 && report.violations.empty();
}

DriftReport verify_drift(const LyapunovModel& lyap, const SystemSpec& sys,
                         const std::vector<PhaseState>& scan, const QuadratureSpec& q,
                         const DriftOptions& options) {
  if (scan.empty()) fail_parameter("verify_drift needs a nonempty scan");
  sys.validate();
  q.validate();
  for (std::size_t k = 0; k < scan.size(); ++k) {
    if (!in_state_space(sys, scan[k])) {
      std::ostringstream os;
      os << "scan state " << k << " is outside the state space";
      throw DomainError(os.str());
    }
  }

  DriftReport report;
  report.scan = options.scan_description;
  report.records.resize(scan.size());
  parallel_for(scan.size(), options.threads, [&](std::size_t k) {
    DriftRecord& rec = report.records[k];
    rec.index = k;
    rec.state = scan[k];
    try {
      rec.lyapunov = lyap.value(scan[k]);
      const GeneratorValue gv = apply_generator(lyap, scan[k], sys, q);
      rec.generator = gv.value;
      rec.error = gv.error;
    } catch (const Error& e) {
      std::ostringstream os;
      os << "scan state " << k << ": " << e.what();
      throw EvaluationError(os.str());
    }
    rec.energy = hamiltonian(sys, scan[k]);
    rec.min_pair = min_pair_distance(scan[k].x, sys.d);
  });

  std::vector<double> g, v, err;
  for (const auto& r : report.records) {
    g.push_back(r.generator);
    v.push_back(r.lyapunov);
    err.push_back(r.error);
  }
  fit_drift(g, v, err, options, report);

  std::vector<std::size_t> order(scan.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.records[a].energy < report.records[b].energy;
  });
  const std::size_t top = std::max<std::size_t>(1, scan.size() / 10);
  double rate = kInf;
  for (std::size_t m = scan.size() - top; m < scan.size(); ++m) {
    const auto& r = report.records[order[m]];
    rate = std::min(rate, -(r.generator + r.error) / r.lyapunov);
  }
  report.high_energy_rate = rate;
  return report;
}

std::vector<PhaseState> stratified_drift_scan(const PotentialModel& model, std::size_t n,
                                              double pair_min, std::uint64_t seed) {
  if (n == 0) fail_parameter("scan size must be positive");
  SamplerOptions opts;
  opts.seed = seed;
  opts.pair_min = pair_min;
  return ConfigurationSampler(model, opts).phase_states(n);
}

}  // namespace levy
