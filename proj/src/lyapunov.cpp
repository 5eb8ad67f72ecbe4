#include "levy/lyapunov.hpp"

#include "levy/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace levy {

double smooth_cutoff(double u, double r0) {
  if (!(r0 > 0.0)) throw ParameterError("cutoff level r0 must be positive");
  const double s = (u - r0) / r0;
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double h = 1.0 / s - 1.0 / (1.0 - s);
  if (h > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(h));
}

double smooth_cutoff_slope(double u, double r0) {
  if (!(r0 > 0.0)) throw ParameterError("cutoff level r0 must be positive");
  const double s = (u - r0) / r0;
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double g = smooth_cutoff(u, r0);
  return g * (1.0 - g) * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / r0;
}

double default_theta(double min_alpha) { return 0.5 * min_alpha; }

Case1Constants Case1Constants::from_primitives(double r0, double R_U, double C_U,
                                               double C_U_beta, double C_star, double gamma,
                                               double kappa_fraction) {
  if (!(r0 > 0.0) || !(R_U > 0.0) || !(C_U > 0.0) || !(C_U_beta >= 0.0) || !(C_star >= 1.0))
    throw ParameterError("case-1 constants need r0, R_U, C_U > 0, C_U_beta >= 0, C* >= 1");
  if (!(gamma > 0.0)) throw ParameterError("friction must be positive");
  if (!(kappa_fraction > 0.0 && kappa_fraction < 1.0))
    throw ParameterError("kappa fraction must lie in (0, 1)");
  Case1Constants c;
  c.r0 = r0;
  c.R_U = R_U;
  c.C_U = C_U;
  c.C_U_beta = C_U_beta;
  c.C_star = C_star;
  c.gamma = gamma;
  c.kappa_fraction = kappa_fraction;
  c.theta0 = std::max({r0, C_U, R_U});
  c.beta0 = std::max(2.0 * r0, R_U);
  c.kappa_star = std::min({1.0 / std::sqrt(c.theta0), 1.0 / (2.0 * c.theta0 * gamma),
                           gamma / (4.0 * (5.0 + 3.0 * std::max(C_U, c.beta0 * C_U_beta)))});
  c.kappa = kappa_fraction * c.kappa_star;
  return c;
}

bool Case1Constants::derived_consistent() const {
  const Case1Constants f = from_primitives(r0, R_U, C_U, C_U_beta, C_star, gamma, kappa_fraction);
  return f.theta0 == theta0 && f.beta0 == beta0 && f.kappa_star == kappa_star && f.kappa == kappa;
}

std::pair<double, double> Case2Params::admissible_weights(double C_V, double C_VV, double gamma) {
  if (!(C_V > 0.0) || !(C_VV > 0.0) || !(gamma > 0.0))
    throw EstimationError("case-2 weights need positive C_V*, C_V** and friction");
  const double b = std::min({0.5 * std::min(C_V, gamma), C_V * C_V / (8.0 * gamma),
                             C_VV / (2.0 * C_VV + C_V)});
  const double a = b * C_V / (2.0 * C_VV);
  return {a, b};
}

namespace {

// Largest U seen on {|grad U| < 1} along a backtracking gradient descent from
// x0: the crossing into the set is located by bisection, then the descent
// continues for a while inside it. -inf if the set is never reached.
double flat_set_entry_level(const PotentialModel& model, Vector x) {
  double u = model.value(x);
  Vector g = model.gradient(x);
  double best = g.norm() < 1.0 ? u : -kInf;
  double step = 1.0 / std::max(1.0, g.norm());
  for (int it = 0, inside = 0; it < 4000 && inside < 50; ++it) {
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) break;
    Vector y;
    double uy = kInf;
    for (int bt = 0; bt < 60; ++bt) {
      y = x - step * g;
      uy = model.value(y);
      if (uy <= u - 0.5 * step * g2) break;
      step *= 0.5;
    }
    if (!(uy <= u - 0.5 * step * g2)) break;
    const Vector gy = model.gradient(y);
    if (g.norm() >= 1.0 && gy.norm() < 1.0) {
      Vector a = x, b = y;
      for (int bis = 0; bis < 50; ++bis) {
        const Vector mid = 0.5 * (a + b);
        if (model.gradient(mid).norm() < 1.0) b = mid; else a = mid;
      }
      best = std::max(best, model.value(b));
    }
    if (gy.norm() < 1.0) {
      best = std::max(best, uy);
      ++inside;
    }
    x = y;
    u = uy;
    g = gy;
    step *= 2.0;
  }
  return best;
}

}  // namespace

Case1Constants estimate_case1_constants(const PotentialModel& model, double gamma,
                                        const ConfigurationSampler& sampler, std::size_t n) {
  const std::vector<Vector> xs = sampler.configurations(n);
  if (xs.empty()) throw ParameterError("sampler produced no admissible configurations");
  const std::size_t m = xs.size();
  std::vector<double> u(m), g(m), h(m);
  for (std::size_t k = 0; k < m; ++k) {
    u[k] = model.value(xs[k]);
    g[k] = model.gradient(xs[k]).norm();
    h[k] = model.hessian(xs[k]).norm();
  }

  double flat_max = -kInf;
  for (std::size_t k = 0; k < m; ++k)
    if (g[k] < 1.0) flat_max = std::max(flat_max, u[k]);
  // Stratified samples rarely land in {|grad U| < 1}; descend into it.
  const std::size_t starts = std::min<std::size_t>(m, 256);
  for (std::size_t k = 0; k < starts; ++k)
    flat_max = std::max(flat_max, flat_set_entry_level(model, xs[k]));
  const double r0 = std::max(flat_max > 0.0 ? kSafetyFactor * flat_max : 0.0, 1e-3);

  std::vector<std::size_t> above;
  for (std::size_t k = 0; k < m; ++k)
    if (u[k] >= r0) above.push_back(k);
  if (above.empty())
    throw EstimationError("sampling cannot establish |grad U| >= 1 on any level: largest U with "
                          "|grad U| < 1 is " + std::to_string(flat_max) +
                          " and no sample lies above it");

  // Choose R_U among sampled levels to minimise theta0 = max(r0, C_U(R), R).
  std::sort(above.begin(), above.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
  std::vector<double> ratio_suffix(above.size());
  double run = 0.0;
  for (std::size_t t = 0; t < above.size(); ++t) {
    const std::size_t k = above[t];
    run = std::max(run, u[k] * (1.0 + h[k]) / (g[k] * g[k]));
    ratio_suffix[t] = run;
  }
  double best_theta0 = kInf, best_R = r0, best_C = 0.0;
  for (std::size_t t = above.size(); t-- > 0;) {
    // Level R = u[above[t]] covers above[0..t].
    const double R = u[above[t]];
    const double C = kSafetyFactor * ratio_suffix[t];
    const double th = std::max({r0, C, R});
    if (th < best_theta0 || (th == best_theta0 && R < best_R)) {
      best_theta0 = th;
      best_R = R;
      best_C = C;
    }
  }
  // Level r0 itself covers everything above it.
  {
    const double C = kSafetyFactor * ratio_suffix.back();
    const double th = std::max(r0, C);
    if (th <= best_theta0) {
      best_theta0 = th;
      best_R = r0;
      best_C = C;
    }
  }
  const double beta0 = std::max(2.0 * r0, best_R);
  double hess_sup = 0.0;
  double low_sup = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (u[k] <= beta0) hess_sup = std::max(hess_sup, h[k]);
    if (u[k] < r0) low_sup = std::max(low_sup, std::fabs(u[k]));
  }
  return Case1Constants::from_primitives(r0, best_R, best_C, kSafetyFactor * hess_sup,
                                         1.0 + kSafetyFactor * low_sup, gamma);
}

namespace {

// w_i = -(a/N) sum_{j != i} n(x_i - x_j) + b x_i, the velocity gradient of the
// perturbation; min over v of the energy is U - |w|^2 / 2.
Vector perturbation_velocity_field(const PotentialModel& model, const Vector& x, double a,
                                   double b) {
  const std::size_t n = model.particles();
  const std::size_t d = model.dim();
  Vector w = b * x;
  if (n > 1 && a != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const Vector u = particle(x, i, d) - particle(x, j, d);
        particle(w, i, d) -= (a / static_cast<double>(n)) * u / u.norm();
      }
    }
  }
  return w;
}

double reduced_energy(const PotentialModel& model, const Vector& x, double a, double b) {
  const double u = model.value(x);
  if (!std::isfinite(u)) return kInf;
  return u - 0.5 * perturbation_velocity_field(model, x, a, b).squaredNorm();
}

// Coordinate search; f returns +inf outside the admissible set.
double compass_minimise(const std::function<double(const Vector&)>& f, Vector x) {
  double fx = f(x);
  double step = std::max(0.1, 0.1 * x.norm());
  for (int it = 0; it < 400 && step > 1e-9; ++it) {
    bool moved = false;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      for (double sgn : {1.0, -1.0}) {
        Vector y = x;
        y[k] += sgn * step;
        const double fy = f(y);
        if (fy < fx) {
          fx = fy;
          x = std::move(y);
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return fx;
}

}  // namespace

Case2Params derive_case2_params(const AssumptionReport& report, double gamma,
                                const PotentialModel& model, const ConfigurationSampler& sampler,
                                std::size_t n) {
  if (!model.has_mean_field_decomposition())
    throw UnsupportedModelError(
        "case-2 energy needs the decomposition U = sum V + (1/N) sum K (the potential U can be "
        "written in mean-field form)");
  auto get = [&](const char* key) {
    auto it = report.constants.find(key);
    if (it == report.constants.end())
      throw EstimationError(std::string("assumption report lacks constant ") + key);
    return it->second;
  };
  Case2Params p;
  p.C_V = get("C_V*");
  p.C_VV = get("C_V**");
  p.gamma = gamma;
  if (!(p.C_V > 0.0) || !(p.C_VV > 0.0))
    throw EstimationError("extracted constants C_V*, C_V** must be positive");
  std::tie(p.a, p.b) = Case2Params::admissible_weights(p.C_V, p.C_VV, gamma);

  const std::vector<Vector> xs = sampler.configurations(n);
  if (xs.empty()) throw ParameterError("sampler produced no admissible configurations");
  std::vector<double> f(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) f[k] = reduced_energy(model, xs[k], p.a, p.b);
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  double inf = f[idx[0]];
  for (std::size_t t = 0; t < std::min<std::size_t>(4, idx.size()); ++t)
    inf = std::min(inf, compass_minimise(
                            [&](const Vector& x) { return reduced_energy(model, x, p.a, p.b); },
                            xs[idx[t]]));
  p.C_star = 1.0 + kSafetyFactor * std::max(0.0, -inf);

  const double m_v = get("M_V");
  p.r1 = std::max(1.5 * std::sqrt(m_v / p.C_V), 1e-3);
  p.r2 = 0.5 * get("R_K");

  auto shared = std::make_shared<const PotentialModel>(model);
  LyapunovModel lyap(shared, p, 1.0);
  // Sampled extremes of the ratio, refined by local search in phase space.
  const std::vector<PhaseState> zs = sampler.phase_states(n);
  const auto m = static_cast<Eigen::Index>(model.total_dim());
  auto ratio = [&](const Vector& w) {
    const PhaseState z{w.head(m), w.tail(m)};
    if (!std::isfinite(model.value(z.x))) return std::numeric_limits<double>::quiet_NaN();
    return lyap.energy(z) / lyap.case2_sandwich_denominator(z);
  };
  std::vector<Vector> ws;
  std::vector<double> rs;
  for (const PhaseState& z : zs) {
    Vector w(2 * m);
    w << z.x, z.v;
    rs.push_back(ratio(w));
    ws.push_back(std::move(w));
  }
  std::vector<std::size_t> order(ws.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rs[a] < rs[b]; });
  double lo = rs[order.front()], hi = rs[order.back()];
  const std::size_t refine = std::min<std::size_t>(8, order.size());
  for (std::size_t t = 0; t < refine; ++t) {
    lo = std::min(lo, compass_minimise(
                          [&](const Vector& w) {
                            const double r = ratio(w);
                            return std::isnan(r) ? kInf : r;
                          },
                          ws[order[t]]));
    hi = std::max(hi, -compass_minimise(
                          [&](const Vector& w) {
                            const double r = ratio(w);
                            return std::isnan(r) ? kInf : -r;
                          },
                          ws[order[order.size() - 1 - t]]));
  }
  if (!(lo > 0.0)) throw EstimationError("case-2 sandwich lower constant is not positive");
  p.c1 = lo / kSafetyFactor;
  p.c2 = hi * kSafetyFactor;
  return p;
}

LyapunovModel::LyapunovModel(std::shared_ptr<const PotentialModel> model, Case1Constants c,
                             double theta)
    : model_(std::move(model)), params_(c), theta_(theta) {
  if (!(theta_ > 0.0)) throw ParameterError("theta must be positive");
  if (!c.derived_consistent()) throw ParameterError("case-1 derived constants are inconsistent");
}

LyapunovModel::LyapunovModel(std::shared_ptr<const PotentialModel> model, Case2Params p,
                             double theta)
    : model_(std::move(model)), params_(p), theta_(theta) {
  if (!(theta_ > 0.0)) throw ParameterError("theta must be positive");
  if (!model_->has_mean_field_decomposition())
    throw UnsupportedModelError("case-2 energy needs a mean-field decomposable potential");
}

LyapunovModel::Local LyapunovModel::local_case1(const Vector& x) const {
  const Case1Constants& c = case1();
  Local l;
  l.u = model_->value(x);
  if (!std::isfinite(l.u)) throw DomainError("state outside the domain of U");
  l.g = model_->gradient(x);
  l.g2 = l.g.squaredNorm();
  l.cut = smooth_cutoff(l.u, c.r0);
  l.cut_slope = smooth_cutoff_slope(l.u, c.r0);
  if (l.cut > 0.0 && !(l.g2 > 0.0))
    throw EvaluationError("vanishing gradient above the cutoff level r0");
  return l;
}

Vector LyapunovModel::mean_field_unit_sum(const Vector& x, std::size_t i) const {
  const std::size_t n = model_->particles();
  const std::size_t d = model_->dim();
  Vector s = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const Vector u = particle(x, i, d) - particle(x, j, d);
    const double r = u.norm();
    if (!(r > 0.0)) throw DomainError("coincident particles");
    s += u / r;
  }
  return s;
}

double LyapunovModel::energy(const PhaseState& z) const {
  if (is_case1()) {
    const Case1Constants& c = case1();
    const Local l = local_case1(z.x);
    double psi = 0.0;
    if (l.cut > 0.0) psi = c.kappa * l.cut * l.u * z.v.dot(l.g) / l.g2;
    return c.C_star + 0.5 * z.v.squaredNorm() + l.u + psi;
  }
  const Case2Params& p = case2();
  const double u = model_->value(z.x);
  if (!std::isfinite(u)) throw DomainError("state outside the domain of U");
  const std::size_t n = model_->particles();
  const std::size_t d = model_->dim();
  double cross = 0.0;
  if (n > 1 && p.a != 0.0)
    for (std::size_t i = 0; i < n; ++i)
      cross += particle(z.v, i, d).dot(mean_field_unit_sum(z.x, i));
  return p.C_star + 0.5 * z.v.squaredNorm() + u - (p.a / static_cast<double>(n)) * cross +
         p.b * z.x.dot(z.v);
}

Vector LyapunovModel::energy_velocity_gradient(const PhaseState& z, std::size_t i) const {
  const std::size_t d = model_->dim();
  Vector gv = particle(z.v, i, d);
  if (is_case1()) {
    const Local l = local_case1(z.x);
    if (l.cut > 0.0) gv += (case1().kappa * l.cut * l.u / l.g2) * particle(l.g, i, d);
    return gv;
  }
  const Case2Params& p = case2();
  const double n = static_cast<double>(model_->particles());
  if (p.a != 0.0 && model_->particles() > 1) gv -= (p.a / n) * mean_field_unit_sum(z.x, i);
  gv += p.b * particle(z.x, i, d);
  return gv;
}

void LyapunovModel::energy_gradient(const PhaseState& z, Vector& gx, Vector& gv) const {
  const std::size_t n = model_->particles();
  const std::size_t d = model_->dim();
  if (is_case1()) {
    const Case1Constants& c = case1();
    const Local l = local_case1(z.x);
    gx = l.g;
    gv = z.v;
    if (l.cut > 0.0 || l.cut_slope > 0.0) {
      const Matrix h = model_->hessian(z.x);
      const double vg = z.v.dot(l.g);
      const Vector hv = h * z.v;
      const Vector hg = h * l.g;
      gx += (c.kappa * l.cut_slope * l.u * vg / l.g2) * l.g;
      gx += (c.kappa * l.cut / l.g2) *
            (vg * l.g + l.u * (hv - (2.0 * vg / l.g2) * hg));
      gv += (c.kappa * l.cut * l.u / l.g2) * l.g;
    }
    return;
  }
  const Case2Params& p = case2();
  const double nn = static_cast<double>(n);
  gx = model_->gradient(z.x) + p.b * z.v;
  gv = z.v + p.b * z.x;
  if (n > 1 && p.a != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      particle(gv, i, d) -= (p.a / nn) * mean_field_unit_sum(z.x, i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const Vector u = particle(z.x, i, d) - particle(z.x, j, d);
        const double r = u.norm();
        const Vector e = u / r;
        const Vector dv = particle(z.v, i, d) - particle(z.v, j, d);
        particle(gx, i, d) -= (p.a / nn) * (dv - e * e.dot(dv)) / r;
      }
    }
  }
}

double LyapunovModel::value(const PhaseState& z) const {
  const double e = energy(z);
  if (!(e > 0.0)) throw EvaluationError("perturbed energy is not positive at this state");
  return std::pow(e, 0.5 * theta_);
}

void LyapunovModel::gradient(const PhaseState& z, Vector& gx, Vector& gv) const {
  const double e = energy(z);
  if (!(e > 0.0)) throw EvaluationError("perturbed energy is not positive at this state");
  energy_gradient(z, gx, gv);
  const double f = 0.5 * theta_ * std::pow(e, 0.5 * theta_ - 1.0);
  gx *= f;
  gv *= f;
}

JumpSlice LyapunovModel::slice(const PhaseState& z, std::size_t i, std::size_t) const {
  const double e = energy(z);
  if (!(e > 0.0)) throw EvaluationError("perturbed energy is not positive at this state");
  const Vector g = energy_velocity_gradient(z, i);
  const double half_theta = 0.5 * theta_;
  JumpSlice s;
  s.base = std::pow(e, half_theta);
  const double base = s.base;
  // The energy is quadratic in each velocity with unit Hessian, so the
  // increment of the energy is exact: <g, w> + |w|^2 / 2.
  s.increment = [g, e, base, half_theta](const Vector& w) {
    const double delta = g.dot(w) + 0.5 * w.squaredNorm();
    const double q = delta / e;
    if (!(q > -1.0)) throw EvaluationError("jump leaves the region where the energy is positive");
    return base * std::expm1(half_theta * std::log1p(q));
  };
  const double gn = g.norm();
  s.tail = [gn, half_theta, this](double radius) {
    return TailModel{theta_, std::pow(gn / radius + 0.5, half_theta)};
  };
  return s;
}

std::pair<double, double> LyapunovModel::case1_sandwich(const PhaseState& z) const {
  const Case1Constants& c = case1();
  const double u = model_->value(z.x);
  const double v2 = z.v.squaredNorm();
  const double k = (u >= c.r0) ? c.kappa * c.kappa * c.theta0 : 0.0;
  return {c.C_star + 0.25 * v2 + (1.0 - k) * u, c.C_star + 0.75 * v2 + (1.0 + k) * u};
}

double LyapunovModel::case2_sandwich_denominator(const PhaseState& z) const {
  const Case2Params& p = case2();
  const std::size_t n = model_->particles();
  const std::size_t d = model_->dim();
  double s = 1.0 + z.v.squaredNorm();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector xi = particle(z.x, i, d);
    if (xi.norm() >= p.r1) s += mean_field_single(*model_, xi);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double r = (particle(z.x, i, d) - particle(z.x, j, d)).norm();
      if (r <= p.r2) s += model_->pair_jet(r).k / static_cast<double>(n);
    }
  }
  return s;
}

}  // namespace levy
