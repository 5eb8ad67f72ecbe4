#include "levy/quadrature.hpp"

#include "levy/error.hpp"
#include "levy/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <sstream>

namespace levy {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct AngularRule {
  std::size_t d = 1;
  std::vector<double> dirs;  // row-major, one direction per row
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

// Polar node count of the d = 3 product rule; grows by sqrt(2) per level.
std::size_t polar_nodes(int level) {
  return static_cast<std::size_t>(std::lround(4.0 * std::pow(2.0, 0.5 * level)));
}

std::size_t angular_points(std::size_t d, int level) {
  if (d == 1) return 1;
  if (d == 2) return std::size_t{8} << level;
  if (d == 3) return 2 * polar_nodes(level) * polar_nodes(level);
  return std::size_t{64} << level;
}

AngularRule build_rule(std::size_t d, int level) {
  AngularRule rule;
  rule.d = d;
  const double half_area = 0.5 * sphere_area(d);
  if (d == 1) {
    rule.dirs = {1.0};
    rule.weights = {1.0};
  } else if (d == 2) {
    const std::size_t m = angular_points(2, level);
    for (std::size_t k = 0; k < m; ++k) {
      const double phi = kPi * static_cast<double>(k) / static_cast<double>(m);
      rule.dirs.push_back(std::cos(phi));
      rule.dirs.push_back(std::sin(phi));
      rule.weights.push_back(kPi / static_cast<double>(m));
    }
  } else if (d == 3) {
    const std::size_t n = polar_nodes(level);
    const std::size_t nphi = 2 * n;
    std::vector<double> mu, wmu;
    gauss_legendre_unit(n, mu, wmu);
    for (std::size_t a = 0; a < n; ++a) {
      const double st = std::sqrt(std::max(0.0, 1.0 - mu[a] * mu[a]));
      for (std::size_t b = 0; b < nphi; ++b) {
        const double phi = 2.0 * kPi * (static_cast<double>(b) + 0.5) / static_cast<double>(nphi);
        rule.dirs.push_back(st * std::cos(phi));
        rule.dirs.push_back(st * std::sin(phi));
        rule.dirs.push_back(mu[a]);
        rule.weights.push_back(wmu[a] * 2.0 * kPi / static_cast<double>(nphi));
      }
    }
  } else {
    // Higher dimensions: fixed pseudo-random directions with equal weights.
    const std::size_t m = angular_points(d, level);
    RngStream rng(0x243F6A8885A308D3ull, static_cast<std::uint64_t>(d * 1000 + static_cast<std::size_t>(level)));
    for (std::size_t k = 0; k < m; ++k) {
      double n2 = 0.0;
      std::vector<double> u(d);
      do {
        n2 = 0.0;
        for (auto& c : u) {
          c = rng.normal();
          n2 += c * c;
        }
      } while (n2 == 0.0);
      const double inv = 1.0 / std::sqrt(n2);
      for (double c : u) rule.dirs.push_back(c * inv);
      rule.weights.push_back(half_area / static_cast<double>(m));
    }
  }
  return rule;
}

std::shared_ptr<const AngularRule> cached_rule(std::size_t d, int level) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const AngularRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{d, level}];
  if (!slot) slot = std::make_shared<const AngularRule>(build_rule(d, level));
  return slot;
}

struct AngularValue {
  double value = 0.0;
  double error = 0.0;
  bool resolved = true;
};

class Integrand {
 public:
  Integrand(const JumpSlice& slice, std::size_t d, double alpha, const QuadratureSpec& q)
      : slice_(slice), d_(d), alpha_(alpha), q_(q), c_(levy_constant(d, alpha)), w_(d), wm_(d) {}

  AngularValue angular(double r) {
    if (d_ == 1) {
      double l1 = 0.0;
      return {sweep(*cached_rule(1, 0), r, l1), 0.0, true};
    }
    int level = q_.angular_level;
    double l1 = 0.0;
    double prev = sweep(*cached_rule(d_, level), r, l1);
    double last_diff = std::fabs(prev);
    const double floor = 64.0 * 2.220446049250313e-16 * std::fabs(slice_.base) * sphere_area(d_);
    for (++level;; ++level) {
      const std::size_t cap = d_ == 2 ? q_.max_circle_points : q_.max_angular_points;
      if (angular_points(d_, level) > cap) return {prev, last_diff, false};
      const double cur = sweep(*cached_rule(d_, level), r, l1);
      const double diff = std::fabs(cur - prev);
      const double tol = std::max(q_.angular_rel_tol * l1,
                                  floor + 64.0 * 2.220446049250313e-16 * l1);
      if (diff <= tol) return {cur, diff, true};
      prev = cur;
      last_diff = diff;
    }
  }

  double density(double r) const { return c_ * std::pow(r, -alpha_); }
  double constant() const { return c_; }
  std::size_t evaluations() const { return evals_; }

 private:
  double sweep(const AngularRule& rule, double r, double& l1) {
    double acc = 0.0;
    l1 = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      for (std::size_t j = 0; j < d_; ++j) {
        const double c = r * rule.dirs[k * d_ + j];
        w_[static_cast<Eigen::Index>(j)] = c;
        wm_[static_cast<Eigen::Index>(j)] = -c;
      }
      const double fp = slice_.increment(w_);
      const double fm = slice_.increment(wm_);
      evals_ += 2;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        std::ostringstream os;
        os << "non-finite integrand at radius " << r << ", direction index " << k;
        throw EvaluationError(os.str());
      }
      acc += rule.weights[k] * (fp + fm);
      l1 += rule.weights[k] * (std::fabs(fp) + std::fabs(fm));
    }
    return acc;
  }

  const JumpSlice& slice_;
  std::size_t d_;
  double alpha_;
  const QuadratureSpec& q_;
  double c_;
  Vector w_;
  Vector wm_;
  std::size_t evals_ = 0;
};

struct Panel {
  double a = 0.0;  // in log r
  double b = 0.0;
  double value = 0.0;
  double radial_error = 0.0;
  double angular_error = 0.0;
  bool resolved = true;
};

Panel evaluate_panel(Integrand& f, double a, double b) {
  Panel p;
  p.a = a;
  p.b = b;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double k15 = 0.0, g7 = 0.0, ang = 0.0;
  for (int k = 0; k < 8; ++k) {
    const int npts = (k == 7) ? 1 : 2;
    for (int side = 0; side < npts; ++side) {
      const double s = side == 0 ? mid + half * kXgk[k] : mid - half * kXgk[k];
      const double r = std::exp(s);
      const AngularValue av = f.angular(r);
      const double dens = f.density(r);
      const double val = dens * av.value;
      k15 += kWgk[k] * val;
      if (k % 2 == 1) g7 += kWg[k / 2] * val;
      ang += kWgk[k] * dens * av.error;
      if (!av.resolved) p.resolved = false;
    }
  }
  p.value = half * k15;
  p.radial_error = std::fabs(half * (k15 - g7));
  p.angular_error = half * ang;
  return p;
}

}  // namespace

double sphere_area(std::size_t d) {
  const double h = 0.5 * static_cast<double>(d);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

double levy_constant(std::size_t d, double alpha) {
  if (d == 0) throw ParameterError("dimension must be at least 1");
  if (alpha == 2.0)
    throw UnsupportedModelError("Brownian particles have no jump measure (alpha = 2)");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ParameterError("stability index must lie in (0, 2)");
  const double dd = static_cast<double>(d);
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (dd + alpha)) /
         (std::pow(kPi, 0.5 * dd) * std::tgamma(1.0 - 0.5 * alpha));
}

void gauss_legendre_unit(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureSpec QuadratureSpec::refined() const {
  QuadratureSpec r = *this;
  r.panels_per_decade *= 2;
  r.max_panels *= 2;
  r.angular_level += 1;
  r.max_angular_points *= 2;
  r.max_circle_points *= 2;
  r.abs_tol *= 0.25;
  r.rel_tol *= 0.25;
  r.angular_rel_tol *= 0.25;
  return r;
}

void QuadratureSpec::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("quadrature eps must lie in (0, 1)");
  if (!(r_max > eps)) throw ParameterError("quadrature r_max must exceed eps");
  if (panels_per_decade < 1) throw ParameterError("panels_per_decade must be >= 1");
  if (max_panels < 4) throw ParameterError("max_panels must be >= 4");
  if (!(abs_tol > 0.0) || !(rel_tol >= 0.0) || !(angular_rel_tol >= 0.0))
    throw ParameterError("quadrature tolerances must be positive");
  if (angular_level < 0) throw ParameterError("angular_level must be >= 0");
}

JumpResult jump_integral(const JumpSlice& slice, std::size_t d, double alpha,
                         const QuadratureSpec& q) {
  q.validate();
  if (!slice.increment) throw ParameterError("jump slice has no increment function");
  Integrand f(slice, d, alpha, q);
  const double c = f.constant();
  JumpResult res;

  // Small ball: A(r) = a2 r^2 + O(r^4), so the integral over r < eps is
  // c a2 eps^(2-alpha) / (2-alpha).
  const AngularValue at_eps = f.angular(q.eps);
  const AngularValue at_half = f.angular(0.5 * q.eps);
  const double a2 = at_eps.value / (q.eps * q.eps);
  const double a2_half = at_half.value / (0.25 * q.eps * q.eps);
  const double ball_w = c * std::pow(q.eps, 2.0 - alpha) / (2.0 - alpha);
  const double ball = ball_w * a2;
  const double ball_err =
      ball_w * (std::fabs(a2 - a2_half) * 4.0 / 3.0 + at_eps.error / (q.eps * q.eps));

  // Initial panels, inner [eps, 1] and outer [1, r_max], scanned outward.
  const double s0 = std::log(q.eps);
  const double s1 = std::log(std::min(1.0, q.r_max));
  const double s2 = std::log(q.r_max);
  std::vector<std::pair<double, double>> spans;
  auto add_spans = [&](double a, double b) {
    if (!(b > a)) return;
    const double decades = (b - a) / std::log(10.0);
    const int m = std::max(1, static_cast<int>(std::ceil(decades * q.panels_per_decade)));
    for (int k = 0; k < m; ++k)
      spans.emplace_back(a + (b - a) * k / m, a + (b - a) * (k + 1) / m);
  };
  add_spans(s0, s1);
  add_spans(s1, s2);

  std::vector<Panel> panels;
  double cutoff_s = s2;
  bool truncated = false;
  for (const auto& [a0, b0] : spans) {
    // Depth-first over bisections of an unresolved span, so the cutoff lands
    // within 1/8 of a panel of the first radius the angular rule cannot follow.
    std::vector<std::pair<std::pair<double, double>, int>> stack = {{{a0, b0}, 0}};
    while (!stack.empty() && !truncated) {
      const auto [span, depth] = stack.back();
      stack.pop_back();
      Panel p = evaluate_panel(f, span.first, span.second);
      if (p.resolved || d == 1) {
        panels.push_back(p);
      } else if (depth < 3) {
        const double m = 0.5 * (span.first + span.second);
        stack.push_back({{m, span.second}, depth + 1});
        stack.push_back({{span.first, m}, depth + 1});
      } else {
        cutoff_s = span.first;
        truncated = true;
      }
    }
    if (truncated) break;
  }

  auto cmp = [&](std::size_t x, std::size_t y) {
    return panels[x].radial_error < panels[y].radial_error;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
  for (std::size_t k = 0; k < panels.size(); ++k) heap.push(k);
  std::vector<bool> live(panels.size(), true);

  auto totals = [&](double& value, double& err) {
    value = 0.0;
    err = 0.0;
    for (std::size_t k = 0; k < panels.size(); ++k) {
      if (!live[k]) continue;
      value += panels[k].value;
      err += panels[k].radial_error + panels[k].angular_error;
    }
  };
  double total = 0.0, total_err = 0.0;
  totals(total, total_err);
  std::size_t live_count = panels.size();
  while (!heap.empty() && live_count < q.max_panels) {
    const double tol = std::max(q.abs_tol, q.rel_tol * std::fabs(total + ball));
    if (total_err <= tol) break;
    const std::size_t top = heap.top();
    const Panel p = panels[top];
    if (p.radial_error <= 0.25 * tol / static_cast<double>(live_count) || p.b - p.a < 1e-10) break;
    heap.pop();
    live[top] = false;
    const double m = 0.5 * (p.a + p.b);
    for (const auto& [a, b] : {std::pair{p.a, m}, std::pair{m, p.b}}) {
      panels.push_back(evaluate_panel(f, a, b));
      live.push_back(true);
      heap.push(panels.size() - 1);
    }
    total += panels[panels.size() - 2].value + panels.back().value - p.value;
    total_err += panels[panels.size() - 2].radial_error + panels[panels.size() - 2].angular_error +
                 panels.back().radial_error + panels.back().angular_error - p.radial_error -
                 p.angular_error;
    ++live_count;
  }

  double inner = ball, inner_err = ball_err, outer = 0.0, outer_err = 0.0;
  for (std::size_t k = 0; k < panels.size(); ++k) {
    if (!live[k]) continue;
    const double e = panels[k].radial_error + panels[k].angular_error;
    if (panels[k].b <= s1 + 1e-12) {
      inner += panels[k].value;
      inner_err += e;
    } else {
      outer += panels[k].value;
      outer_err += e;
    }
  }

  // Tail beyond the last resolved radius.
  const double R = std::exp(cutoff_s);
  const double area = sphere_area(d);
  const double tail_mass = c * area * std::pow(R, -alpha) / alpha;
  TailModel tm;
  bool have_tail = false;
  if (slice.tail) {
    tm = slice.tail(R);
    have_tail = true;
  } else if (q.tail) {
    tm = *q.tail;
    have_tail = true;
  }
  double tail_value = 0.0, tail_err = kInf;
  if (have_tail) {
    if (std::isfinite(tm.value_bound)) {
      tail_value = -slice.base * tail_mass;
      tail_err = tm.value_bound * tail_mass;
    } else if (tm.exponent < alpha) {
      tail_err = tm.coefficient * c * area * std::pow(R, tm.exponent - alpha) / (alpha - tm.exponent);
    }
  }
  if (R <= 1.0) {
    inner += tail_value;
    inner_err += tail_err;
  } else {
    outer += tail_value;
    outer_err += tail_err;
  }

  const double roundoff = 64.0 * 2.220446049250313e-16 * (std::fabs(inner) + std::fabs(outer));
  res.inner = inner;
  res.inner_error = inner_err;
  res.outer = outer;
  res.outer_error = outer_err;
  res.value = inner + outer;
  res.error = inner_err + outer_err + roundoff;
  res.cutoff_radius = R;
  res.evaluations = f.evaluations();
  return res;
}

JumpResult jump_integral(const PhaseFunction& f, const PhaseState& z, std::size_t i, std::size_t d,
                         double alpha, const QuadratureSpec& q) {
  return jump_integral(f.slice(z, i, d), d, alpha, q);
}

std::pair<double, double> velocity_laplacian(const JumpSlice& slice, std::size_t d,
                                             double scale) {
  if (!(scale > 0.0)) throw ParameterError("laplacian step scale must be positive");
  auto second = [&](double h) {
    double s = 0.0;
    Vector w = Vector::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      w.setZero();
      w[static_cast<Eigen::Index>(k)] = h;
      const double fp = slice.increment(w);
      w[static_cast<Eigen::Index>(k)] = -h;
      const double fm = slice.increment(w);
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw EvaluationError("non-finite value in the velocity Laplacian stencil");
      s += (fp + fm) / (h * h);
    }
    return s;
  };
  const double h = 1e-3 * scale;
  const double coarse = second(h);
  const double fine = second(0.5 * h);
  const double value = (4.0 * fine - coarse) / 3.0;
  return {value, std::fabs(fine - coarse) + 1e-12 * std::fabs(value)};
}

}  // namespace levy
