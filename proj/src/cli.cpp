#include "levy/cli.hpp"

#include "levy/assumptions.hpp"
#include "levy/config.hpp"
#include "levy/control.hpp"
#include "levy/dynamics.hpp"
#include "levy/ergodicity.hpp"
#include "levy/error.hpp"
#include "levy/generator.hpp"
#include "levy/io.hpp"
#include "levy/lyapunov.hpp"
#include "levy/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <ostream>
#include <sstream>

namespace levy {

namespace {

class Summary {
 public:
  explicit Summary(std::string command) : command_(std::move(command)) {}
  Summary& add(const std::string& key, const std::string& value) {
    fields_.emplace_back(key, value);
    return *this;
  }
  Summary& add(const std::string& key, double value) { return add(key, format_double(value)); }
  Summary& add_count(const std::string& key, std::size_t value) {
    return add(key, std::to_string(value));
  }
  void print(std::ostream& out) const {
    out << command_;
    for (const auto& [k, v] : fields_) {
      out << ' ' << k << '=';
      if (v.find_first_of(" \"=") == std::string::npos && !v.empty()) {
        out << v;
      } else {
        out << '"';
        for (char c : v) {
          if (c == '"' || c == '\\') out << '\\';
          out << c;
        }
        out << '"';
      }
    }
    out << '\n';
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> fields_;
};

struct Context {
  RunConfig cfg;
  SystemSpec sys;
  std::size_t threads = 1;
  std::filesystem::path out;
};

LyapunovModel build_lyapunov(const Context& ctx, nlohmann::json* constants = nullptr) {
  LyapunovModel lyap = build_lyapunov(ctx.cfg, ctx.sys);
  if (constants) *constants = lyap.is_case1() ? to_json(lyap.case1()) : to_json(lyap.case2());
  return lyap;
}

int cmd_check_assumptions(const Context& ctx, Summary& sum) {
  const auto& pot = *ctx.sys.potential;
  const ConfigurationSampler sampler(pot, sampler_options(ctx.cfg));
  nlohmann::json doc;
  doc["reports"] = nlohmann::json::array();
  bool pass = true;
  std::vector<AssumptionReport> reports;
  if (ctx.cfg.lyapunov.which == 1)
    reports.push_back(check_HU(pot, sampler, ctx.cfg.lyapunov.samples));
  else
    reports.push_back(check_HV_HK(pot, sampler, ctx.cfg.lyapunov.samples));
  reports.push_back(check_Hnu(ctx.sys.noise, effective_theta(ctx.cfg)));
  std::string failed;
  for (const auto& r : reports) {
    doc["reports"].push_back(to_json(r));
    if (!r.pass) {
      pass = false;
      failed += (failed.empty() ? "" : ",") + to_string(r.kind);
    }
  }
  const auto path = ctx.out / "assumptions.json";
  write_file_atomic(path, dump_report(doc, "assumptions"));
  sum.add("status", pass ? "ok" : "fail");
  for (const auto& r : reports) sum.add(to_string(r.kind), r.pass ? "pass" : "fail");
  if (!pass) sum.add("failed", failed);
  sum.add("report", path.string());
  return pass ? kExitOk : kExitFailed;
}

int cmd_estimate_constants(const Context& ctx, Summary& sum) {
  nlohmann::json constants;
  const LyapunovModel lyap = build_lyapunov(ctx, &constants);
  const ConfigurationSampler sampler(*ctx.sys.potential, sampler_options(ctx.cfg));
  const std::vector<PhaseState> states = sampler.phase_states(ctx.cfg.lyapunov.samples);
  double vmin = kInf;
  for (const auto& z : states) vmin = std::min(vmin, lyap.value(z));
  nlohmann::json doc;
  doc["constants"] = constants;
  doc["theta"] = json_number(lyap.theta());
  doc["sampled_states"] = states.size();
  doc["sampled_min_lyapunov"] = json_number(vmin);
  const auto path = ctx.out / "constants.json";
  write_file_atomic(path, dump_report(doc, "constants"));
  const bool ok = vmin >= 1.0;
  sum.add("status", ok ? "ok" : "fail").add("case", std::to_string(ctx.cfg.lyapunov.which));
  sum.add("theta", lyap.theta()).add("min_lyapunov", vmin).add("report", path.string());
  return ok ? kExitOk : kExitFailed;
}

int cmd_verify_drift(const Context& ctx, Summary& sum) {
  nlohmann::json constants;
  const LyapunovModel lyap = build_lyapunov(ctx, &constants);
  const auto& dg = ctx.cfg.diagnostics;
  const auto scan = stratified_drift_scan(*ctx.sys.potential, dg.scan_states, dg.pair_min, dg.scan_seed);
  DriftOptions opts;
  opts.threads = ctx.threads;
  opts.C_cap = dg.C_cap;
  std::ostringstream desc;
  desc << scan.size() << " stratified states, pair distances down to " << format_double(dg.pair_min)
       << " pair length scales, seed " << dg.scan_seed;
  opts.scan_description = desc.str();
  const DriftReport rep = verify_drift(lyap, ctx.sys, scan, ctx.cfg.quadrature, opts);
  nlohmann::json doc = to_json(rep);
  doc["lyapunov"] = {{"theta", json_number(lyap.theta())}, {"constants", constants}};
  const auto path = ctx.out / "drift_report.json";
  write_file_atomic(path, dump_report(doc, "drift"));
  sum.add("status", rep.certified ? "ok" : "fail").add("lambda", rep.lambda).add("C", rep.C);
  sum.add_count("states", rep.records.size()).add_count("violations", rep.violations.size());
  sum.add("report", path.string());
  return rep.certified ? kExitOk : kExitFailed;
}

int cmd_simulate(const Context& ctx, Summary& sum) {
  const auto& s = ctx.cfg.simulation;
  SimulationOptions opts;
  opts.horizon = s.horizon;
  opts.snapshots = s.snapshots.empty() ? std::vector<double>{0.0, s.horizon} : s.snapshots;
  opts.trajectories = s.trajectories;
  opts.seed = s.seed;
  opts.threads = ctx.threads;
  const PhaseState z0 = build_state(ctx.cfg, s.x0, s.v0);
  const TrajectoryBatch batch = simulate(ctx.sys, z0, opts);
  std::ostringstream data;
  std::filesystem::path path;
  if (s.format == "binary") {
    write_binary(batch, data);
    path = ctx.out / "trajectories.bin";
  } else {
    write_csv(batch, data);
    path = ctx.out / "trajectories.csv";
  }
  write_file_atomic(path, data.str());
  nlohmann::json doc;
  doc["seed"] = batch.seed;
  doc["trajectories"] = batch.size();
  doc["scheme"] = to_string(ctx.sys.scheme);
  doc["h"] = json_number(ctx.sys.h);
  doc["horizon"] = json_number(s.horizon);
  doc["snapshots"] = nlohmann::json::array();
  for (double t : batch.times) doc["snapshots"].push_back(json_number(t));
  doc["statistics"] = to_json(batch.totals());
  doc["data"] = path.filename().string();
  const auto summary_path = ctx.out / "simulate.json";
  write_file_atomic(summary_path, dump_report(doc, "simulation"));
  const StepStats st = batch.totals();
  sum.add("status", "ok").add_count("trajectories", batch.size()).add_count("rejected", st.rejected);
  sum.add("data", path.string()).add("report", summary_path.string());
  return kExitOk;
}

int cmd_control(const Context& ctx, Summary& sum) {
  const auto& k = ctx.cfg.control;
  const PhaseState z0 = build_state(ctx.cfg, k.x0, k.v0);
  const PhaseState zT = build_state(ctx.cfg, k.xT, k.vT);
  ControlOptions opts;
  opts.grid = k.grid;
  opts.delta_plan = k.delta_plan;
  opts.max_detours = k.max_detours;
  const ControlPath cp = synthesize_control(z0, zT, k.horizon, ctx.sys, opts);
  const PhaseState end = integrate_controlled(z0, cp, ctx.sys);
  const double miss = std::sqrt((end.x - zT.x).squaredNorm() + (end.v - zT.v).squaredNorm());

  std::string csv = "time";
  const auto m = static_cast<Eigen::Index>(ctx.sys.total_dim());
  for (Eigen::Index c = 0; c < m; ++c) csv += ",x" + std::to_string(c);
  for (Eigen::Index c = 0; c < m; ++c) csv += ",u" + std::to_string(c);
  csv += '\n';
  for (std::size_t r = 0; r < cp.times.size(); ++r) {
    csv += format_double(cp.times[r]);
    for (Eigen::Index c = 0; c < m; ++c) csv += "," + format_double(cp.positions[r][c]);
    for (Eigen::Index c = 0; c < m; ++c) csv += "," + format_double(cp.controls[r][c]);
    csv += '\n';
  }
  const auto csv_path = ctx.out / "control.csv";
  write_file_atomic(csv_path, csv);
  nlohmann::json doc = to_json(cp);
  doc["endpoint"] = to_json(end);
  doc["target"] = to_json(zT);
  doc["endpoint_error"] = json_number(miss);
  const auto path = ctx.out / "control.json";
  write_file_atomic(path, dump_report(doc, "control"));
  sum.add("status", "ok").add("endpoint_error", miss).add("min_pair", cp.min_pair);
  sum.add_count("detours", cp.detours).add("report", path.string());
  return kExitOk;
}

int cmd_diagnose(const Context& ctx, Summary& sum) {
  const RunConfig& cfg = ctx.cfg;
  const auto& s = cfg.simulation;
  bool brownian = !ctx.sys.noise.deterministic();
  for (std::size_t i = 0; i < ctx.sys.n; ++i) brownian = brownian && ctx.sys.noise.brownian(i);
  nlohmann::json doc;
  std::string csv = "time,value,stderr\n";
  bool ok = true;
  if (brownian && ctx.sys.total_dim() <= 4) {
    SimulationOptions opts;
    opts.horizon = s.horizon;
    opts.snapshots = s.snapshots;
    if (opts.snapshots.empty())
      for (int k = 0; k <= 100; ++k) opts.snapshots.push_back(s.horizon * k / 100.0);
    opts.trajectories = s.trajectories;
    opts.seed = s.seed;
    opts.threads = ctx.threads;
    const TrajectoryBatch batch = simulate(ctx.sys, build_state(cfg, s.x0, s.v0), opts);
    const double beta = stationary_inverse_temperature(ctx.sys);
    const GibbsReport rep = gibbs_oracle_check(batch, ctx.sys, beta, cfg.diagnostics.burn_in);
    doc["gibbs"] = to_json(rep);
    double worst = 0.0;
    for (const auto& st : rep.statistics) worst = std::max(worst, std::fabs(st.z_score));
    const LyapunovModel lyap = build_lyapunov(ctx);
    const DecayCurve curve = empirical_moment(batch, lyap, batch.times);
    doc["moment_curve"] = to_json(curve);
    for (std::size_t k = 0; k < curve.times.size(); ++k)
      csv += format_double(curve.times[k]) + "," + format_double(curve.values[k]) + "," +
             format_double(curve.stderrs[k]) + "\n";
    ok = worst <= 5.0;
    sum.add("status", ok ? "ok" : "fail").add("mode", "gibbs").add("v2", rep.at("v2").empirical);
    sum.add("v2_reference", rep.at("v2").reference).add("max_abs_z", worst);
  } else {
    const LyapunovModel lyap = build_lyapunov(ctx);
    const auto& dg = cfg.diagnostics;
    std::vector<double> times = dg.tv_times;
    if (times.empty()) times = {1.0, 2.0, 4.0, 8.0, 16.0};
    TwoStartOptions opts;
    opts.trajectories = s.trajectories;
    opts.seed = s.seed;
    opts.threads = ctx.threads;
    opts.tv.bins = dg.tv_bins;
    const TwoStartResult res = two_start_diagnostic(ctx.sys, lyap, build_state(cfg, s.x0, s.v0),
                                                    build_state(cfg, dg.x0_alt, dg.v0_alt), times, opts);
    doc["distance_curve"] = to_json(res.curve);
    doc["noise_floor"] = json_number(res.noise_floor);
    doc["decreasing"] = res.decreasing;
    for (std::size_t k = 0; k < res.curve.times.size(); ++k)
      csv += format_double(res.curve.times[k]) + "," + format_double(res.curve.values[k]) + ",0\n";
    ok = res.curve.fit.rate > 0.0;
    sum.add("status", ok ? "ok" : "fail").add("mode", "two_start").add("rate", res.curve.fit.rate);
    sum.add("r2", res.curve.fit.r2).add("decreasing", res.decreasing ? "true" : "false");
  }
  const auto csv_path = ctx.out / "curve.csv";
  write_file_atomic(csv_path, csv);
  const auto path = ctx.out / "diagnose.json";
  write_file_atomic(path, dump_report(doc, "diagnostics"));
  sum.add("report", path.string());
  return ok ? kExitOk : kExitFailed;
}

bool parse_env_unsigned(const char* name, std::uint64_t& out) {
  const char* env = std::getenv(name);
  if (!env || !*env) return false;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) return false;
    out = v;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinetic Langevin dynamics with stable noise: assumption checks, Lyapunov "
               "constants, drift certificates, simulation, control and ergodicity diagnostics",
               "levy"};
  app.require_subcommand(1);
  std::string config;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string output;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"check-assumptions", "Sampled checks of the potential and moment assumptions"},
      {"estimate-constants", "Estimate the Lyapunov constants"},
      {"verify-drift", "Certify the drift inequality on a stratified scan"},
      {"simulate", "Simulate an ensemble of trajectories"},
      {"control", "Synthesize and integrate a steering control"},
      {"diagnose", "Ergodicity diagnostics"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sc = app.add_subcommand(name, desc);
    sc->add_option("config", config, "TOML run configuration")->required();
    sc->add_option("--seed", seed, "Simulation seed (overrides LEVY_SEED and the config)");
    sc->add_option("--threads", threads, "Worker threads (overrides LEVY_THREADS)");
    sc->add_option("--output", output, "Output directory (overrides the config)");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "levy: " << e.what() << "\n" << app.help();
    Summary("levy").add("status", "usage").print(out);
    return kExitUsage;
  }
  CLI::App* chosen = app.get_subcommands().front();
  const std::string cmd = chosen->get_name();
  Summary sum(cmd);

  Context ctx;
  try {
    ctx.cfg = load_config(config);
  } catch (const IoError& e) {
    err << "levy: " << e.what() << "\n";
    sum.add("status", "no-input").add("message", e.what()).print(out);
    return kExitNoInput;
  } catch (const ParameterError& e) {
    err << "levy: " << e.what() << "\n";
    sum.add("status", "invalid").add_count("violations", 1).add("first", e.what()).print(out);
    return kExitInvalid;
  }

  const auto violations = validate_config(ctx.cfg);
  if (!violations.empty()) {
    for (const auto& v : violations)
      err << "levy: invalid " << v.field << ": " << v.rule << " [" << v.assumption << "]\n";
    const auto& f = violations.front();
    sum.add("status", "invalid").add_count("violations", violations.size());
    sum.add("first", f.field + ": " + f.rule + " [" + f.assumption + "]").print(out);
    return kExitInvalid;
  }

  std::uint64_t env_value = 0;
  if (parse_env_unsigned("LEVY_SEED", env_value)) ctx.cfg.simulation.seed = env_value;
  if (chosen->count("--seed") > 0) ctx.cfg.simulation.seed = seed;
  ctx.threads = default_threads();
  if (chosen->count("--threads") > 0) {
    if (threads == 0) {
      err << "levy: --threads must be positive\n";
      Summary(cmd).add("status", "usage").print(out);
      return kExitUsage;
    }
    ctx.threads = threads;
  }
  if (chosen->count("--output") > 0) ctx.cfg.output_dir = output;
  ctx.out = ctx.cfg.output_dir;

  try {
    ctx.sys = build_system(ctx.cfg);
    int code = kExitOk;
    if (cmd == "check-assumptions") code = cmd_check_assumptions(ctx, sum);
    else if (cmd == "estimate-constants") code = cmd_estimate_constants(ctx, sum);
    else if (cmd == "verify-drift") code = cmd_verify_drift(ctx, sum);
    else if (cmd == "simulate") code = cmd_simulate(ctx, sum);
    else if (cmd == "control") code = cmd_control(ctx, sum);
    else code = cmd_diagnose(ctx, sum);
    sum.print(out);
    return code;
  } catch (const ParameterError& e) {
    err << "levy: " << e.what() << "\n";
    Summary(cmd).add("status", "invalid").add_count("violations", 1).add("first", e.what()).print(out);
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "levy: " << e.what() << "\n";
    Summary(cmd).add("status", "error").add("message", e.what()).print(out);
    return kExitFailed;
  }
}

}  // namespace levy
