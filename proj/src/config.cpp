#include "levy/config.hpp"

#include "levy/error.hpp"
#include "levy/assumptions.hpp"
#include "levy/lyapunov.hpp"

#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace levy {

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"system", "lyapunov", "quadrature", "simulation", "diagnostics", "control", "output"}},
      {"system", {"particles", "dim", "gamma", "offset", "confinement", "interaction", "noise", "guards"}},
      {"system.confinement", {"c0", "exponent"}},
      {"system.interaction", {"kind", "c1", "c2", "strength", "power", "normalization"}},
      {"system.noise", {"alpha", "deterministic"}},
      {"system.guards", {"min_pair_distance", "drift_step", "max_halvings", "max_rejections"}},
      {"lyapunov", {"case", "theta", "samples", "overrides"}},
      {"quadrature",
       {"eps", "r_max", "panels_per_decade", "max_panels", "abs_tol", "rel_tol", "angular_level",
        "max_angular_points", "max_circle_points", "angular_rel_tol"}},
      {"simulation",
       {"scheme", "h", "horizon", "trajectories", "snapshots", "seed", "x0", "v0", "format"}},
      {"diagnostics",
       {"scan_states", "pair_min", "scan_seed", "C_cap", "x0_alt", "v0_alt", "tv_times", "tv_bins",
        "burn_in"}},
      {"control", {"horizon", "x0", "v0", "xT", "vT", "grid", "delta_plan", "max_detours"}},
      {"output", {"dir"}},
  };
  return keys;
}

void check_keys(const toml::table& tbl, const std::string& path) {
  const auto& keys = allowed_keys();
  const auto it = keys.find(path);
  for (const auto& [k, node] : tbl) {
    const std::string key(k.str());
    const std::string full = path.empty() ? key : path + "." + key;
    if (path == "lyapunov.overrides") {
      if (!node.is_number()) throw ParameterError(full + ": expected a number");
      continue;
    }
    if (it == keys.end() || !it->second.count(key)) throw ParameterError("unknown key '" + full + "'");
    if (const auto* sub = node.as_table()) check_keys(*sub, full);
  }
}

[[noreturn]] void type_error(const std::string& field, const char* expected) {
  throw ParameterError(field + ": expected " + expected);
}

const toml::node* find(const toml::table& root, const std::string& path) {
  const toml::node* node = &root;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    const auto* tbl = node->as_table();
    if (!tbl) return nullptr;
    node = tbl->get(part);
    if (!node) return nullptr;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return node;
}

void read(const toml::table& root, const std::string& path, double& out) {
  if (const auto* n = find(root, path)) {
    if (auto v = n->value<double>()) out = *v;
    else type_error(path, "a number");
  }
}

void read(const toml::table& root, const std::string& path, std::size_t& out) {
  if (const auto* n = find(root, path)) {
    const auto v = n->as_integer();
    if (!v || v->get() < 0) type_error(path, "a non-negative integer");
    out = static_cast<std::size_t>(v->get());
  }
}

void read(const toml::table& root, const std::string& path, std::uint64_t& out, bool) {
  if (const auto* n = find(root, path)) {
    const auto v = n->as_integer();
    if (!v || v->get() < 0) type_error(path, "a non-negative integer");
    out = static_cast<std::uint64_t>(v->get());
  }
}

void read(const toml::table& root, const std::string& path, int& out) {
  if (const auto* n = find(root, path)) {
    const auto v = n->as_integer();
    if (!v) type_error(path, "an integer");
    out = static_cast<int>(v->get());
  }
}

void read(const toml::table& root, const std::string& path, std::string& out) {
  if (const auto* n = find(root, path)) {
    if (auto v = n->value<std::string>()) out = *v;
    else type_error(path, "a string");
  }
}

void read(const toml::table& root, const std::string& path, bool& out) {
  if (const auto* n = find(root, path)) {
    if (auto v = n->value<bool>()) out = *v;
    else type_error(path, "a boolean");
  }
}

void read(const toml::table& root, const std::string& path, std::vector<double>& out) {
  if (const auto* n = find(root, path)) {
    const auto* arr = n->as_array();
    if (!arr) type_error(path, "an array of numbers");
    out.clear();
    for (const auto& e : *arr) {
      auto v = e.value<double>();
      if (!v) type_error(path, "an array of numbers");
      out.push_back(*v);
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ": " << e.description() << " at line " << e.source().begin.line;
    throw ParameterError(os.str());
  }
  check_keys(root, "");

  RunConfig c;
  read(root, "system.particles", c.n);
  read(root, "system.dim", c.d);
  read(root, "system.gamma", c.gamma);
  read(root, "system.offset", c.offset);
  read(root, "system.confinement.c0", c.c0);
  read(root, "system.confinement.exponent", c.confinement_exponent);
  read(root, "system.interaction.kind", c.interaction);
  read(root, "system.interaction.normalization", c.normalization);
  read(root, "system.interaction.c1", c.c1);
  read(root, "system.interaction.c2", c.c2);
  read(root, "system.interaction.strength", c.strength);
  read(root, "system.interaction.power", c.power);
  if (const auto* n = find(root, "system.noise.alpha")) {
    if (n->is_array()) {
      read(root, "system.noise.alpha", c.alpha);
    } else if (auto v = n->value<double>()) {
      c.alpha.assign(c.n, *v);
    } else {
      type_error("system.noise.alpha", "a number or an array of numbers");
    }
  }
  read(root, "system.noise.deterministic", c.deterministic_noise);
  read(root, "system.guards.min_pair_distance", c.guards.min_pair_distance);
  read(root, "system.guards.drift_step", c.guards.drift_step);
  read(root, "system.guards.max_halvings", c.guards.max_halvings);
  read(root, "system.guards.max_rejections", c.guards.max_rejections);

  read(root, "lyapunov.case", c.lyapunov.which);
  if (find(root, "lyapunov.theta")) {
    double t = 0.0;
    read(root, "lyapunov.theta", t);
    c.lyapunov.theta = t;
  }
  read(root, "lyapunov.samples", c.lyapunov.samples);
  if (const auto* n = find(root, "lyapunov.overrides")) {
    const auto* tbl = n->as_table();
    if (!tbl) type_error("lyapunov.overrides", "a table");
    for (const auto& [k, v] : *tbl) c.lyapunov.overrides[std::string(k.str())] = *v.value<double>();
  }

  auto& q = c.quadrature;
  read(root, "quadrature.eps", q.eps);
  read(root, "quadrature.r_max", q.r_max);
  read(root, "quadrature.panels_per_decade", q.panels_per_decade);
  read(root, "quadrature.max_panels", q.max_panels);
  read(root, "quadrature.abs_tol", q.abs_tol);
  read(root, "quadrature.rel_tol", q.rel_tol);
  read(root, "quadrature.angular_level", q.angular_level);
  read(root, "quadrature.max_angular_points", q.max_angular_points);
  read(root, "quadrature.max_circle_points", q.max_circle_points);
  read(root, "quadrature.angular_rel_tol", q.angular_rel_tol);

  auto& s = c.simulation;
  read(root, "simulation.scheme", s.scheme);
  read(root, "simulation.h", s.h);
  read(root, "simulation.horizon", s.horizon);
  read(root, "simulation.trajectories", s.trajectories);
  read(root, "simulation.snapshots", s.snapshots);
  read(root, "simulation.seed", s.seed, true);
  read(root, "simulation.x0", s.x0);
  read(root, "simulation.v0", s.v0);
  read(root, "simulation.format", s.format);

  auto& g = c.diagnostics;
  read(root, "diagnostics.scan_states", g.scan_states);
  read(root, "diagnostics.pair_min", g.pair_min);
  read(root, "diagnostics.scan_seed", g.scan_seed, true);
  read(root, "diagnostics.C_cap", g.C_cap);
  read(root, "diagnostics.x0_alt", g.x0_alt);
  read(root, "diagnostics.v0_alt", g.v0_alt);
  read(root, "diagnostics.tv_times", g.tv_times);
  read(root, "diagnostics.tv_bins", g.tv_bins);
  read(root, "diagnostics.burn_in", g.burn_in);

  auto& k = c.control;
  read(root, "control.horizon", k.horizon);
  read(root, "control.x0", k.x0);
  read(root, "control.v0", k.v0);
  read(root, "control.xT", k.xT);
  read(root, "control.vT", k.vT);
  read(root, "control.grid", k.grid);
  read(root, "control.delta_plan", k.delta_plan);
  read(root, "control.max_detours", k.max_detours);

  std::string dir = c.output_dir.string();
  read(root, "output.dir", dir);
  c.output_dir = dir;
  if (c.alpha.empty()) c.alpha.assign(c.n, 2.0);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream probe(path);
  if (!probe) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << probe.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::vector<ConfigViolation> validate_config(const RunConfig& c) {
  std::vector<ConfigViolation> out;
  auto add = [&](std::string field, std::string rule, std::string assumption) {
    out.push_back({std::move(field), std::move(rule), std::move(assumption)});
  };
  if (c.n == 0) add("system.particles", "at least one particle", "N-particle system");
  if (c.d == 0) add("system.dim", "dimension at least 1", "particles live in R^d");
  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma))
    add("system.gamma", "gamma > 0", "friction positivity (damping force -gamma v)");
  if (c.alpha.size() != c.n)
    add("system.noise.alpha", "one stability index per particle", "mutually independent per-particle noises");
  for (double a : c.alpha)
    if (!(a > 0.0 && a <= 2.0))
      add("system.noise.alpha", "every alpha_i in (0, 2]", "symmetric alpha-stable noise");

  bool kinds_ok = true;
  try {
    parse_interaction_kind(c.interaction);
  } catch (const ParameterError&) {
    kinds_ok = false;
    add("system.interaction.kind", "unknown potential kind '" + c.interaction + "'",
        "radial pair interaction of a supported kind");
  }
  try {
    parse_normalization(c.normalization);
  } catch (const ParameterError&) {
    kinds_ok = false;
    add("system.interaction.normalization", "unknown normalization '" + c.normalization + "'",
        "pair sum or mean-field normalization");
  }
  std::shared_ptr<const PotentialModel> pot;
  if (kinds_ok && c.n > 0 && c.d > 0) {
    try {
      pot = build_potential(c);
    } catch (const ParameterError& e) {
      add("system.interaction", e.what(), "potential well defined and bounded below");
    }
  }
  if (!(c.confinement_exponent >= 2.0))
    add("system.confinement.exponent", "exponent >= 2", "confining one-particle potential");

  double amin = kInf;
  for (double a : c.alpha) amin = std::min(amin, a);
  if (c.lyapunov.theta) {
    const double th = *c.lyapunov.theta;
    if (!(th > 0.0)) add("lyapunov.theta", "theta > 0", "H_nu (only finite θ-moment condition)");
    if (!(th < amin))
      add("lyapunov.theta", "theta < min alpha_i",
          "H_nu (only finite θ-moment condition): the theta-moment of the far jumps diverges at theta = alpha");
  }
  static const std::set<std::string> case1_keys = {"r0", "R_U", "C_U", "C_U_beta0", "C_star",
                                                   "kappa_fraction"};
  static const std::set<std::string> case2_keys = {"a", "b", "C_star", "r1", "r2", "c1", "c2"};
  for (const auto& [key, value] : c.lyapunov.overrides) {
    const auto& keys = c.lyapunov.which == 2 ? case2_keys : case1_keys;
    if (!keys.count(key))
      add("lyapunov.overrides." + key, "not a constant of the selected case", "manual constants");
    else if (!std::isfinite(value))
      add("lyapunov.overrides." + key, "finite value", "manual constants");
  }
  if (c.lyapunov.which != 1 && c.lyapunov.which != 2)
    add("lyapunov.case", "case is 1 or 2", "one of the two Lyapunov constructions");
  if (c.lyapunov.which == 2 && pot && !pot->has_mean_field_decomposition())
    add("lyapunov.case",
        "case 2 needs U = sum_i V(x_i) + (1/N) sum_{i != j} K(x_i - x_j) with a repulsive radial K",
        "potential U can be written as a confinement plus mean-field pair kernel");

  try {
    c.quadrature.validate();
  } catch (const ParameterError& e) {
    add("quadrature", e.what(), "convergent jump-integral quadrature");
  }

  const auto& s = c.simulation;
  try {
    parse_scheme(s.scheme);
  } catch (const ParameterError&) {
    add("simulation.scheme", "unknown scheme '" + s.scheme + "'", "supported integrator");
  }
  if (!(s.h > 0.0) || !std::isfinite(s.h)) add("simulation.h", "h > 0", "positive time step");
  if (!(s.horizon > 0.0)) add("simulation.horizon", "horizon > 0", "positive time horizon");
  if (s.trajectories == 0) add("simulation.trajectories", "at least one trajectory", "ensemble size");
  for (std::size_t k = 0; k < s.snapshots.size(); ++k) {
    if (!(s.snapshots[k] >= 0.0 && s.snapshots[k] <= s.horizon))
      add("simulation.snapshots", "snapshot times in [0, horizon]", "snapshots inside the run");
    if (k > 0 && !(s.snapshots[k] > s.snapshots[k - 1]))
      add("simulation.snapshots", "strictly increasing snapshot times", "time-ordered snapshots");
  }
  if (s.format != "csv" && s.format != "binary")
    add("simulation.format", "format is csv or binary", "trajectory output format");
  if (!(c.guards.min_pair_distance >= 0.0) || !(c.guards.drift_step > 0.0))
    add("system.guards", "guard thresholds positive", "domain guards");

  const std::size_t m = c.n * c.d;
  auto check_state = [&](const std::string& field, const std::vector<double>& x, bool position) {
    if (x.empty()) return;
    if (x.size() != m) {
      add(field, "needs N * d = " + std::to_string(m) + " entries", "state in the phase space");
      return;
    }
    if (position && pot) {
      const Vector xv = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(m));
      if (!std::isfinite(pot->value(xv)))
        add(field, "position must lie in the domain of U", "state in D(U)");
    }
  };
  check_state("simulation.x0", s.x0, true);
  check_state("simulation.v0", s.v0, false);
  check_state("diagnostics.x0_alt", c.diagnostics.x0_alt, true);
  check_state("diagnostics.v0_alt", c.diagnostics.v0_alt, false);
  check_state("control.x0", c.control.x0, true);
  check_state("control.v0", c.control.v0, false);
  check_state("control.xT", c.control.xT, true);
  check_state("control.vT", c.control.vT, false);
  if (!(c.control.horizon > 0.0)) add("control.horizon", "horizon > 0", "positive control horizon");
  for (std::size_t k = 1; k < c.diagnostics.tv_times.size(); ++k)
    if (!(c.diagnostics.tv_times[k] > c.diagnostics.tv_times[k - 1]))
      add("diagnostics.tv_times", "strictly increasing times", "time-ordered curve");
  if (!(c.diagnostics.pair_min > 0.0)) add("diagnostics.pair_min", "pair_min > 0", "scan inside D(U)");
  if (c.diagnostics.scan_states == 0) add("diagnostics.scan_states", "at least one scan state", "nonempty scan");
  return out;
}

std::shared_ptr<const PotentialModel> build_potential(const RunConfig& c) {
  Confinement conf;
  conf.c0 = c.c0;
  conf.exponent = c.confinement_exponent;
  Interaction inter;
  inter.kind = parse_interaction_kind(c.interaction);
  inter.c1 = c.c1;
  inter.c2 = c.c2;
  inter.strength = c.strength;
  inter.power = c.power;
  return std::make_shared<const PotentialModel>(c.n, c.d, conf, inter,
                                                parse_normalization(c.normalization), c.offset);
}

NoiseSpec build_noise(const RunConfig& c) { return NoiseSpec(c.alpha, c.deterministic_noise); }

SystemSpec build_system(const RunConfig& c) {
  SystemSpec sys;
  sys.n = c.n;
  sys.d = c.d;
  sys.gamma = c.gamma;
  sys.potential = build_potential(c);
  sys.noise = build_noise(c);
  sys.scheme = parse_scheme(c.simulation.scheme);
  sys.h = c.simulation.h;
  sys.guards = c.guards;
  sys.validate();
  return sys;
}

double effective_theta(const RunConfig& c) {
  if (c.lyapunov.theta) return *c.lyapunov.theta;
  double amin = kInf;
  for (double a : c.alpha) amin = std::min(amin, a);
  return default_theta(amin);
}

PhaseState build_state(const RunConfig& c, const std::vector<double>& x,
                       const std::vector<double>& v) {
  const auto m = static_cast<Eigen::Index>(c.n * c.d);
  PhaseState z{Vector::Zero(m), Vector::Zero(m)};
  if (!x.empty()) z.x = Eigen::Map<const Vector>(x.data(), m);
  if (!v.empty()) z.v = Eigen::Map<const Vector>(v.data(), m);
  return z;
}

SamplerOptions sampler_options(const RunConfig& cfg) {
  SamplerOptions o;
  o.seed = cfg.diagnostics.scan_seed;
  return o;
}

namespace {

double override_or(const RunConfig& cfg, const std::string& key, double value) {
  const auto it = cfg.lyapunov.overrides.find(key);
  return it == cfg.lyapunov.overrides.end() ? value : it->second;
}

}  // namespace

LyapunovModel build_lyapunov(const RunConfig& cfg, const SystemSpec& sys) {
  const auto pot = sys.potential;
  const ConfigurationSampler sampler(*pot, sampler_options(cfg));
  const double theta = effective_theta(cfg);
  if (cfg.lyapunov.which == 1) {
    const Case1Constants est = estimate_case1_constants(*pot, cfg.gamma, sampler, cfg.lyapunov.samples);
    const Case1Constants c = Case1Constants::from_primitives(
        override_or(cfg, "r0", est.r0), override_or(cfg, "R_U", est.R_U),
        override_or(cfg, "C_U", est.C_U), override_or(cfg, "C_U_beta0", est.C_U_beta),
        override_or(cfg, "C_star", est.C_star), cfg.gamma,
        override_or(cfg, "kappa_fraction", est.kappa_fraction));
    return LyapunovModel(pot, c, theta);
  }
  const AssumptionReport rep = check_HV_HK(*pot, sampler, cfg.lyapunov.samples);
  Case2Params p = derive_case2_params(rep, cfg.gamma, *pot, sampler, cfg.lyapunov.samples);
  p.a = override_or(cfg, "a", p.a);
  p.b = override_or(cfg, "b", p.b);
  p.C_star = override_or(cfg, "C_star", p.C_star);
  p.r1 = override_or(cfg, "r1", p.r1);
  p.r2 = override_or(cfg, "r2", p.r2);
  p.c1 = override_or(cfg, "c1", p.c1);
  p.c2 = override_or(cfg, "c2", p.c2);
  return LyapunovModel(pot, p, theta);
}

}  // namespace levy
