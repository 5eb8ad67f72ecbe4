#include "levy/ergodicity.hpp"

#include "levy/error.hpp"
#include "levy/lyapunov.hpp"
#include "levy/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace levy {

namespace {

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double standard_errorof(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

}  // namespace

DecayCurve empirical_moment(const TrajectoryBatch& batch, const PhaseFunction& lyap,
                            const std::vector<double>& times) {
  if (batch.trajectories.empty()) fail_parameter("empty trajectory batch");
  DecayCurve curve;
  for (double t : times) {
    const std::size_t m = batch.time_index(t);
    std::vector<double> vals;
    vals.reserve(batch.size());
    for (const auto& tr : batch.trajectories) vals.push_back(lyap.value(tr.snapshots.at(m)));
    const double mu = mean_of(vals);
    curve.times.push_back(t);
    curve.values.push_back(mu);
    curve.stderrs.push_back(standard_errorof(vals, mu));
  }
  return curve;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                        double noise_floor) {
  if (times.size() != values.size()) fail_parameter("times and values differ in length");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) fail_parameter("times must be strictly increasing");
  std::size_t n = values.size();
  if (noise_floor > 0.0) {
    n = 0;
    while (n < values.size() && values[n] > noise_floor) ++n;
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      if (!(values[k] > 0.0)) {
        std::ostringstream os;
        os << "non-positive value " << values[k] << " at index " << k << " in the fit window";
        throw FitError(os.str());
      }
    }
  }
  if (n < 4) {
    std::ostringstream os;
    os << "fit window holds " << n << " points above the noise floor; need 4";
    throw FitError(os.str());
  }
  double mt = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mt += times[k];
    my += std::log(values[k]);
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = times[k] - mt;
    const double dy = std::log(values[k]) - my;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  const double slope = sty / stt;
  DecayFit fit;
  fit.rate = slope == 0.0 ? 0.0 : -slope;
  double res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = std::log(values[k]) - (my + slope * (times[k] - mt));
    res += e * e;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - res / syy, 0.0, 1.0) : 1.0;
  fit.first = 0;
  fit.last = n - 1;
  return fit;
}

DecayFit fit_decay_rate(const DecayCurve& curve, double noise_floor) {
  return fit_decay_rate(curve.times, curve.values, noise_floor);
}

double weighted_tv_estimate(const std::vector<PhaseState>& a, const std::vector<PhaseState>& b,
                            const StateFunction& weight, const StateFunction& energy,
                            std::size_t d, const TvOptions& options) {
  if (a.empty() || b.empty()) fail_parameter("weighted_tv_estimate needs nonempty ensembles");
  if (d == 0) fail_parameter("dimension must be positive");
  if (!(options.coverage > 0.0 && options.coverage <= 1.0))
    fail_parameter("coverage must lie in (0, 1]");
  const auto m = a.front().x.size();
  for (const auto* ens : {&a, &b})
    for (const auto& z : *ens)
      if (z.x.size() != m || z.v.size() != m) fail_parameter("ensembles live in different spaces");
  const std::size_t particles = static_cast<std::size_t>(m) / d;

  struct Point {
    double h;
    double w;
    std::vector<double> f;
  };
  auto features = [&](const PhaseState& z) {
    Point p{energy(z), weight(z), {}};
    if (2 * m <= 4) {
      for (Eigen::Index k = 0; k < m; ++k) p.f.push_back(z.x[k]);
      for (Eigen::Index k = 0; k < m; ++k) p.f.push_back(z.v[k]);
    } else {
      p.f.push_back(p.h);
      p.f.push_back(z.v.norm());
      if (particles > 1) p.f.push_back(min_pair_distance(z.x, d));
    }
    return p;
  };
  std::vector<Point> pa, pb;
  for (const auto& z : a) pa.push_back(features(z));
  for (const auto& z : b) pb.push_back(features(z));

  auto quantile = [&](const std::vector<Point>& ps) {
    std::vector<double> hs;
    for (const auto& p : ps) hs.push_back(p.h);
    std::sort(hs.begin(), hs.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(options.coverage * static_cast<double>(hs.size())));
    return hs[std::clamp<std::size_t>(rank, 1, hs.size()) - 1];
  };
  const double window = std::max(quantile(pa), quantile(pb));

  const std::size_t dims = pa.front().f.size();
  std::vector<double> lo(dims, kInf), hi(dims, -kInf);
  for (const auto* ps : {&pa, &pb})
    for (const auto& p : *ps)
      if (p.h <= window)
        for (std::size_t k = 0; k < dims; ++k) {
          lo[k] = std::min(lo[k], p.f[k]);
          hi[k] = std::max(hi[k], p.f[k]);
        }
  const double larger = static_cast<double>(std::max(a.size(), b.size()));
  const std::size_t bins =
      options.bins > 0
          ? options.bins
          : static_cast<std::size_t>(std::ceil(std::pow(larger, 1.0 / static_cast<double>(dims + 2))));

  struct Cell {
    double ca = 0.0, cb = 0.0, wsum = 0.0, count = 0.0;
  };
  std::map<std::vector<std::size_t>, Cell> cells;
  double tail_a = 0.0, tail_b = 0.0, tail_w = 0.0, tail_n = 0.0;
  auto add = [&](const Point& p, bool first) {
    if (!(p.h <= window)) {
      (first ? tail_a : tail_b) += 1.0;
      tail_w += p.w;
      tail_n += 1.0;
      return;
    }
    std::vector<std::size_t> key(dims);
    for (std::size_t k = 0; k < dims; ++k) {
      const double span = hi[k] - lo[k];
      std::size_t idx = 0;
      if (span > 0.0)
        idx = std::min(bins - 1, static_cast<std::size_t>((p.f[k] - lo[k]) / span *
                                                          static_cast<double>(bins)));
      key[k] = idx;
    }
    Cell& c = cells[key];
    (first ? c.ca : c.cb) += 1.0;
    c.wsum += p.w;
    c.count += 1.0;
  };
  for (const auto& p : pa) add(p, true);
  for (const auto& p : pb) add(p, false);

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double total = 0.0;
  for (const auto& [key, c] : cells) total += std::fabs(c.ca / na - c.cb / nb) * (c.wsum / c.count);
  if (tail_n > 0.0) total += (tail_a / na + tail_b / nb) * (tail_w / tail_n);
  return total;
}

double weighted_tv_estimate(const std::vector<PhaseState>& a, const std::vector<PhaseState>& b,
                            const LyapunovModel& lyap, const TvOptions& options) {
  const PotentialModel& pot = lyap.potential();
  return weighted_tv_estimate(
      a, b, [&](const PhaseState& z) { return lyap.value(z); },
      [&](const PhaseState& z) { return 0.5 * z.v.squaredNorm() + pot.value(z.x); }, pot.dim(),
      options);
}

TwoStartResult two_start_diagnostic(const SystemSpec& sys, const LyapunovModel& lyap,
                                    const PhaseState& a, const PhaseState& b,
                                    const std::vector<double>& times,
                                    const TwoStartOptions& options) {
  if (times.empty()) fail_parameter("two-start diagnostic needs curve times");
  SimulationOptions sim;
  sim.horizon = times.back();
  sim.snapshots = times;
  sim.trajectories = options.trajectories;
  sim.seed = options.seed;
  sim.threads = options.threads;
  const TrajectoryBatch ba = simulate(sys, a, sim);
  sim.stream_offset = options.trajectories;
  const TrajectoryBatch bb = simulate(sys, b, sim);

  TwoStartResult out;
  for (std::size_t m = 0; m < times.size(); ++m) {
    out.curve.times.push_back(times[m]);
    out.curve.values.push_back(weighted_tv_estimate(ba.ensemble(m), bb.ensemble(m), lyap, options.tv));
    out.curve.stderrs.push_back(0.0);
  }
  const std::vector<PhaseState> last = ba.ensemble(times.size() - 1);
  const auto half = static_cast<std::ptrdiff_t>(last.size() / 2);
  if (half > 0) {
    const std::vector<PhaseState> h1(last.begin(), last.begin() + half);
    const std::vector<PhaseState> h2(last.begin() + half, last.end());
    out.noise_floor = weighted_tv_estimate(h1, h2, lyap, options.tv);
  }
  out.decreasing = true;
  for (std::size_t m = 1; m < times.size(); ++m)
    if (!(out.curve.values[m] < out.curve.values[m - 1])) out.decreasing = false;
  out.curve.fit = fit_decay_rate(out.curve, out.noise_floor);
  return out;
}

const GibbsStatistic& GibbsReport::at(const std::string& name) const {
  for (const auto& s : statistics)
    if (s.name == name) return s;
  throw ParameterError("no statistic named '" + name + "'");
}

double stationary_inverse_temperature(const SystemSpec& sys) { return sys.gamma; }

namespace {

// Moments of exp(-beta U) on R^m (m <= 4) by composite Gauss-Legendre on a box
// grown until the boundary weight is negligible.
struct PositionMoments {
  double potential = 0.0;
  std::vector<double> mean;
  std::vector<double> second;
};

PositionMoments position_moments(const PotentialModel& pot, double beta) {
  const std::size_t m = pot.total_dim();
  static const std::size_t kPanels[] = {0, 96, 40, 14, 7};
  const std::size_t panels = kPanels[m];
  std::vector<double> gl_x, gl_w;
  gauss_legendre_unit(8, gl_x, gl_w);

  auto boundary_weight = [&](double L, double umin) {
    // Max of exp(-beta (U - umin)) over a coarse grid of the box faces.
    const std::size_t g = 9;
    double worst = 0.0;
    std::vector<std::size_t> idx(m, 0);
    const std::size_t total = static_cast<std::size_t>(std::pow(g, m));
    Vector x(static_cast<Eigen::Index>(m));
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t r = flat;
      bool face = false;
      for (std::size_t k = 0; k < m; ++k) {
        idx[k] = r % g;
        r /= g;
        face = face || idx[k] == 0 || idx[k] == g - 1;
        x[static_cast<Eigen::Index>(k)] = -L + 2.0 * L * static_cast<double>(idx[k]) / (g - 1.0);
      }
      if (!face) continue;
      const double u = pot.value(x);
      if (std::isfinite(u)) worst = std::max(worst, std::exp(-beta * (u - umin)));
    }
    return worst;
  };

  Vector origin = Vector::Zero(static_cast<Eigen::Index>(m));
  double umin = pot.value(origin);
  if (!std::isfinite(umin)) umin = 0.0;
  double L = 1.0;
  while (boundary_weight(L, umin) > 1e-18 && L < 1e6) L *= 1.5;

  const std::size_t per_dim = panels * 8;
  std::vector<double> nodes(per_dim), weights(per_dim);
  const double width = 2.0 * L / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < 8; ++q) {
      nodes[p * 8 + q] = -L + width * (static_cast<double>(p) + gl_x[q]);
      weights[p * 8 + q] = width * gl_w[q];
    }

  const std::size_t total = static_cast<std::size_t>(std::pow(per_dim, m));
  std::vector<double> us(total), ws(total);
  Vector x(static_cast<Eigen::Index>(m));
  double lowest = kInf;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    double w = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = r % per_dim;
      r /= per_dim;
      x[static_cast<Eigen::Index>(k)] = nodes[i];
      w *= weights[i];
    }
    us[flat] = pot.value(x);
    ws[flat] = w;
    if (std::isfinite(us[flat])) lowest = std::min(lowest, us[flat]);
  }
  PositionMoments out;
  out.mean.assign(m, 0.0);
  out.second.assign(m, 0.0);
  double z = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (!std::isfinite(us[flat])) continue;
    const double w = ws[flat] * std::exp(-beta * (us[flat] - lowest));
    if (w == 0.0) continue;
    z += w;
    out.potential += w * us[flat];
    std::size_t r = flat;
    for (std::size_t k = 0; k < m; ++k) {
      const double xi = nodes[r % per_dim];
      r /= per_dim;
      out.mean[k] += w * xi;
      out.second[k] += w * xi * xi;
    }
  }
  out.potential /= z;
  for (std::size_t k = 0; k < m; ++k) {
    out.mean[k] /= z;
    out.second[k] /= z;
  }
  return out;
}

}  // namespace

GibbsReport gibbs_oracle_check(const TrajectoryBatch& batch, const SystemSpec& sys,
                               double inverse_temperature, double burn_in) {
  sys.validate();
  if (sys.noise.deterministic()) throw UnsupportedModelError("Gibbs oracle needs Brownian noise");
  for (std::size_t i = 0; i < sys.n; ++i)
    if (!sys.noise.brownian(i))
      throw UnsupportedModelError("Gibbs oracle needs Brownian noise on every particle");
  const std::size_t m = sys.total_dim();
  if (m > 4) throw UnsupportedModelError("Gibbs oracle quadrature is limited to N d <= 4");
  if (!(inverse_temperature > 0.0)) fail_parameter("inverse temperature must be positive");
  if (batch.trajectories.size() < 2) fail_parameter("Gibbs oracle needs at least two trajectories");

  std::vector<std::size_t> used;
  for (std::size_t k = 0; k < batch.times.size(); ++k)
    if (batch.times[k] >= burn_in) used.push_back(k);
  if (used.empty()) fail_parameter("no snapshots after the burn-in time");

  const PotentialModel& pot = *sys.potential;
  const PositionMoments ref = position_moments(pot, inverse_temperature);

  std::vector<std::string> names;
  std::vector<double> refs;
  names.push_back("v2");
  refs.push_back(static_cast<double>(m) / inverse_temperature);
  names.push_back("potential");
  refs.push_back(ref.potential);
  for (std::size_t k = 0; k < m; ++k) {
    names.push_back("x_mean_" + std::to_string(k));
    refs.push_back(ref.mean[k]);
    names.push_back("x2_" + std::to_string(k));
    refs.push_back(ref.second[k]);
    names.push_back("xv_" + std::to_string(k));
    refs.push_back(0.0);
  }

  std::vector<std::vector<double>> per_traj(names.size());
  for (const auto& tr : batch.trajectories) {
    std::vector<double> acc(names.size(), 0.0);
    for (std::size_t k : used) {
      const PhaseState& z = tr.snapshots.at(k);
      std::size_t s = 0;
      acc[s++] += z.v.squaredNorm();
      acc[s++] += pot.value(z.x);
      for (std::size_t c = 0; c < m; ++c) {
        const auto e = static_cast<Eigen::Index>(c);
        acc[s++] += z.x[e];
        acc[s++] += z.x[e] * z.x[e];
        acc[s++] += z.x[e] * z.v[e];
      }
    }
    for (std::size_t s = 0; s < names.size(); ++s)
      per_traj[s].push_back(acc[s] / static_cast<double>(used.size()));
  }

  GibbsReport rep;
  rep.inverse_temperature = inverse_temperature;
  rep.burn_in = burn_in;
  rep.samples = used.size() * batch.trajectories.size();
  for (std::size_t s = 0; s < names.size(); ++s) {
    GibbsStatistic st;
    st.name = names[s];
    st.empirical = mean_of(per_traj[s]);
    st.standard_error = standard_errorof(per_traj[s], st.empirical);
    st.reference = refs[s];
    const double diff = st.empirical - st.reference;
    st.z_score = st.standard_error > 0.0 ? diff / st.standard_error : (diff == 0.0 ? 0.0 : kInf);
    st.relative_error = st.reference != 0.0 ? std::fabs(diff / st.reference) : std::fabs(diff);
    rep.statistics.push_back(st);
  }
  return rep;
}

}  // namespace levy
