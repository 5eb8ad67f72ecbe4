#include "levy/io.hpp"

#include "levy/assumptions.hpp"
#include "levy/control.hpp"
#include "levy/dynamics.hpp"
#include "levy/ergodicity.hpp"
#include "levy/error.hpp"
#include "levy/generator.hpp"
#include "levy/lyapunov.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace levy {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

nlohmann::json to_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(json_number(v[k]));
  return arr;
}

nlohmann::json to_json(const PhaseState& z) { return {{"x", to_json(z.x)}, {"v", to_json(z.v)}}; }

nlohmann::json to_json(const AssumptionReport& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["sampled_sup"] = json_number(r.sampled_sup);
  j["margins"] = nlohmann::json::object();
  for (const auto& [k, v] : r.margins) j["margins"][k] = json_number(v);
  j["constants"] = nlohmann::json::object();
  for (const auto& [k, v] : r.constants) j["constants"][k] = json_number(v);
  j["witnesses"] = nlohmann::json::array();
  for (const auto& w : r.witnesses) j["witnesses"].push_back(to_json(w));
  j["message"] = r.message;
  return j;
}

nlohmann::json to_json(const Case1Constants& c) {
  return {{"case", 1},
          {"r0", json_number(c.r0)},
          {"R_U", json_number(c.R_U)},
          {"C_U", json_number(c.C_U)},
          {"C_U_beta0", json_number(c.C_U_beta)},
          {"C_star", json_number(c.C_star)},
          {"gamma", json_number(c.gamma)},
          {"kappa_fraction", json_number(c.kappa_fraction)},
          {"theta0", json_number(c.theta0)},
          {"beta0", json_number(c.beta0)},
          {"kappa_star", json_number(c.kappa_star)},
          {"kappa", json_number(c.kappa)}};
}

nlohmann::json to_json(const Case2Params& p) {
  return {{"case", 2},
          {"C_V", json_number(p.C_V)},
          {"C_VV", json_number(p.C_VV)},
          {"gamma", json_number(p.gamma)},
          {"a", json_number(p.a)},
          {"b", json_number(p.b)},
          {"C_star", json_number(p.C_star)},
          {"r1", json_number(p.r1)},
          {"r2", json_number(p.r2)},
          {"c1", json_number(p.c1)},
          {"c2", json_number(p.c2)}};
}

nlohmann::json to_json(const DriftReport& r) {
  nlohmann::json j;
  j["certificate"] = {{"lambda", json_number(r.lambda)},
                    {"C", json_number(r.C)},
                    {"C_cap", json_number(r.C_cap)},
                    {"certified", r.certified},
                    {"high_energy_rate", json_number(r.high_energy_rate)}};
  j["scan"] = {{"description", r.scan}, {"states", r.records.size()}};
  j["sweep"] = nlohmann::json::array();
  for (const auto& [C, lam] : r.sweep) j["sweep"].push_back({json_number(C), json_number(lam)});
  j["states"] = nlohmann::json::array();
  for (const auto& rec : r.records) {
    j["states"].push_back({{"index", rec.index},
                           {"state", to_json(rec.state)},
                           {"lyapunov", json_number(rec.lyapunov)},
                           {"generator", json_number(rec.generator)},
                           {"error", json_number(rec.error)},
                           {"energy", json_number(rec.energy)},
                           {"min_pair", json_number(rec.min_pair)}});
  }
  j["violations"] = r.violations;
  return j;
}

nlohmann::json to_json(const StepStats& s) {
  return {{"accepted", s.accepted},
          {"rejected", s.rejected},
          {"reductions", s.reductions},
          {"max_consecutive_rejections", s.max_consecutive_rejections},
          {"min_step", json_number(s.min_step)}};
}

nlohmann::json to_json(const DecayCurve& c) {
  nlohmann::json j;
  j["times"] = nlohmann::json::array();
  j["values"] = nlohmann::json::array();
  j["stderr"] = nlohmann::json::array();
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    j["times"].push_back(json_number(c.times[k]));
    j["values"].push_back(json_number(c.values[k]));
    j["stderr"].push_back(json_number(k < c.stderrs.size() ? c.stderrs[k] : 0.0));
  }
  j["fit"] = {{"rate", json_number(c.fit.rate)},
              {"r2", json_number(c.fit.r2)},
              {"window", {c.fit.first, c.fit.last}}};
  return j;
}

nlohmann::json to_json(const GibbsReport& r) {
  nlohmann::json j;
  j["inverse_temperature"] = json_number(r.inverse_temperature);
  j["burn_in"] = json_number(r.burn_in);
  j["samples"] = r.samples;
  j["statistics"] = nlohmann::json::array();
  for (const auto& s : r.statistics)
    j["statistics"].push_back({{"name", s.name},
                               {"empirical", json_number(s.empirical)},
                               {"stderr", json_number(s.standard_error)},
                               {"reference", json_number(s.reference)},
                               {"z_score", json_number(s.z_score)},
                               {"relative_error", json_number(s.relative_error)}});
  return j;
}

nlohmann::json to_json(const ControlPath& cp) {
  nlohmann::json knots = nlohmann::json::array();
  for (std::size_t k = 0; k < cp.plan.knot_times().size(); ++k)
    knots.push_back({{"time", json_number(cp.plan.knot_times()[k])},
                     {"position", to_json(cp.plan.knot_positions()[k])}});
  return {{"horizon", json_number(cp.horizon)},
          {"delta_plan", json_number(cp.delta_plan)},
          {"min_pair", json_number(cp.min_pair)},
          {"detours", cp.detours},
          {"grid", cp.times.empty() ? 0 : cp.times.size() - 1},
          {"knots", knots}};
}

std::string dump_report(nlohmann::json doc, const std::string& kind) {
  nlohmann::json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = kind;
  for (auto it = doc.begin(); it != doc.end(); ++it) out[it.key()] = it.value();
  return out.dump(2) + "\n";
}

}  // namespace levy
