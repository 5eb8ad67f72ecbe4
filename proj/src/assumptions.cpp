#include "levy/assumptions.hpp"

#include "levy/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levy {

std::string to_string(AssumptionKind kind) {
  switch (kind) {
    case AssumptionKind::HU:
      return "HU";
    case AssumptionKind::HV:
      return "HV";
    case AssumptionKind::HK:
      return "HK";
    case AssumptionKind::HVHK:
      return "HV+HK";
    case AssumptionKind::Hnu:
      return "Hnu";
  }
  return "unknown";
}

namespace {

double inflate(double s) { return s > 0.0 ? kSafetyFactor * s : s / kSafetyFactor; }

// Indices sorted by ascending margin, truncated.
std::vector<std::size_t> worst(const std::vector<double>& margin, std::size_t keep) {
  std::vector<std::size_t> idx(margin.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return margin[a] < margin[b]; });
  if (idx.size() > keep) idx.resize(keep);
  return idx;
}

struct Tracker {
  std::string name;
  double min_margin = kInf;
  std::vector<std::pair<double, Vector>> bad;

  void add(double margin, const Vector& at) {
    min_margin = std::min(min_margin, margin);
    if (!(margin >= 0.0)) {
      bad.emplace_back(margin, at);
    }
  }
};

void finish(AssumptionReport& rep, std::vector<Tracker>& trackers) {
  rep.pass = true;
  for (auto& t : trackers) {
    rep.margins[t.name] = t.min_margin;
    if (!t.bad.empty()) rep.pass = false;
    std::stable_sort(t.bad.begin(), t.bad.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < t.bad.size() && k < 5; ++k) rep.witnesses.push_back(t.bad[k].second);
  }
}

}  // namespace

AssumptionReport check_HU(const PotentialModel& model, const ConfigurationSampler& sampler,
                          std::size_t n) {
  if (n == 0) throw ParameterError("sample count must be positive");
  const std::vector<Vector> xs = sampler.configurations(2 * n);
  if (xs.empty()) throw ParameterError("sampler produced no admissible configurations");
  const std::size_t coarse = std::min(n, xs.size());

  std::vector<double> ratio(xs.size());
  double u_inf = kInf;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double u = model.value(xs[k]);
    const Vector g = model.gradient(xs[k]);
    const double h = model.hessian(xs[k]).norm();
    ratio[k] = u * (1.0 + h) / (1.0 + g.squaredNorm());
    u_inf = std::min(u_inf, u);
  }
  double sup_coarse = -kInf;
  for (std::size_t k = 0; k < coarse; ++k) sup_coarse = std::max(sup_coarse, ratio[k]);
  const double c_u = inflate(sup_coarse);

  AssumptionReport rep;
  rep.kind = AssumptionKind::HU;
  rep.samples = xs.size();
  rep.sampled_sup = *std::max_element(ratio.begin(), ratio.end());
  rep.constants["C_U"] = c_u;
  rep.constants["U_inf_sampled"] = u_inf;

  std::vector<double> margin(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) margin[k] = c_u - ratio[k];
  rep.margins["ratio"] = *std::min_element(margin.begin(), margin.end());
  rep.pass = std::isfinite(rep.sampled_sup) && rep.margins["ratio"] >= 0.0;
  if (rep.pass) {
    for (std::size_t k : worst(margin, 3)) rep.witnesses.push_back(xs[k]);
  } else {
    for (std::size_t k : worst(margin, 10))
      if (!(margin[k] >= 0.0)) rep.witnesses.push_back(xs[k]);
    rep.message = "sampled supremum grows under refinement";
  }
  return rep;
}

double mean_field_single(const PotentialModel& model, const Vector& u) {
  return model.confinement_value(u) + model.offset() / static_cast<double>(model.particles());
}

Vector mean_field_single_gradient(const PotentialModel& model, const Vector& u) {
  return model.confinement_gradient(u);
}

HomogeneityTerms homogeneity_terms(const PotentialModel& model, const Vector& x) {
  const std::size_t n = model.particles();
  const std::size_t d = model.dim();
  HomogeneityTerms t;
  std::vector<Vector> unit(n * n), grad(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vector u = particle(x, i, d) - particle(x, j, d);
      const double r = u.norm();
      unit[i * n + j] = u / r;
      grad[i * n + j] = (model.pair_jet(r).k1 / r) * u;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      t.rhs_sum += unit[i * n + j].dot(grad[i * n + j]);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        t.lhs += unit[i * n + j].dot(grad[i * n + k]);
      }
    }
  }
  return t;
}

AssumptionReport check_HV_HK(const PotentialModel& model, const ConfigurationSampler& sampler,
                             std::size_t n) {
  if (!model.has_mean_field_decomposition())
    throw UnsupportedModelError(
        "model has no decomposition U = sum V(x_i) + (1/N) sum K(x_i - x_j) with radial K; "
        "use mean_field normalization with a power-law, Coulomb, log or no interaction");
  if (n == 0) throw ParameterError("sample count must be positive");
  const std::size_t d = model.dim();
  const std::uint64_t seed = sampler.options().seed;
  const std::size_t total = 2 * n;
  const std::size_t levels = 32;

  AssumptionReport rep;
  rep.kind = AssumptionKind::HVHK;

  // One-particle samples with radii log-stratified in [1e-3, 1e3], plus the origin.
  std::vector<Vector> us(total);
  for (std::size_t k = 0; k < total; ++k) {
    RngStream rng(seed ^ 0x5851F42D4C957F2Dull, k);
    const double jitter = rng.uniform();
    const double f = (static_cast<double>(k % levels) + jitter) / static_cast<double>(levels);
    const double r = k == 0 ? 0.0 : 1e-3 * std::pow(1e6, f);
    us[k] = r * random_direction(d, rng);
  }
  std::vector<double> vv(total), gdot(total), gnorm(total), rr(total);
  for (std::size_t k = 0; k < total; ++k) {
    vv[k] = mean_field_single(model, us[k]);
    const Vector g = mean_field_single_gradient(model, us[k]);
    gdot[k] = g.dot(us[k]);
    gnorm[k] = g.norm();
    rr[k] = us[k].norm();
  }

  // Growth constant from the far field of the coarse half.
  double far_r = 10.0;
  double r_top = 0.0;
  for (std::size_t k = 0; k < n; ++k) r_top = std::max(r_top, rr[k]);
  if (r_top < 4.0 * far_r) far_r = 0.25 * r_top;
  double growth = kInf;
  for (std::size_t k = 0; k < n; ++k) {
    if (rr[k] < far_r) continue;
    growth = std::min(growth, vv[k] / (rr[k] * rr[k]));
    if (vv[k] > 0.0) growth = std::min(growth, gdot[k] / vv[k]);
  }
  const double c_v = growth / kSafetyFactor;
  double m_v = 0.0;
  double c_vv = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    m_v = std::max({m_v, c_v * rr[k] * rr[k] - vv[k], c_v * vv[k] - gdot[k]});
    if (vv[k] > 0.0) c_vv = std::max(c_vv, gnorm[k] / vv[k]);
  }
  m_v *= kSafetyFactor;
  c_vv *= kSafetyFactor;
  double m_vs = 0.0;
  for (std::size_t k = 0; k < n; ++k) m_vs = std::max(m_vs, gnorm[k] - c_vv * vv[k]);
  m_vs *= kSafetyFactor;

  std::vector<Tracker> trackers;
  for (const char* name : {"V_lower", "V_upper", "gradV", "K_nonneg", "K_dissipation", "homogeneity",
                           "constants_positive"})
    trackers.push_back(Tracker{name, kInf, {}});
  trackers[6].add((c_v > 0.0 && std::isfinite(c_v) && c_vv > 0.0) ? 1.0 : -1.0, us[0]);
  for (std::size_t k = 0; k < total; ++k) {
    trackers[0].add(vv[k] - (c_v * rr[k] * rr[k] - m_v), us[k]);
    trackers[1].add(m_v + gdot[k] - c_v * vv[k], us[k]);
    trackers[2].add(c_vv * vv[k] + m_vs - gnorm[k], us[k]);
  }

  // Pair kernel near the origin.
  const double r_k = 1.0;
  double c_k = kInf;
  std::vector<double> radii(total);
  std::vector<RadialJet> jets(total);
  for (std::size_t k = 0; k < total; ++k) {
    RngStream rng(seed ^ 0x14057B7EF767814Full, k);
    const double f = (static_cast<double>(k % levels) + rng.uniform()) / static_cast<double>(levels);
    radii[k] = r_k * std::pow(1e-4, 1.0 - f);
    jets[k] = model.pair_jet(radii[k]);
  }
  const bool has_pairs = model.interaction().kind != InteractionKind::None;
  if (has_pairs) {
    for (std::size_t k = 0; k < n; ++k)
      if (jets[k].k > 0.0) c_k = std::min(c_k, -jets[k].k1 / jets[k].k);
    c_k /= kSafetyFactor;
    if (!std::isfinite(c_k)) c_k = 1.0;
  } else {
    c_k = 1.0;
  }
  for (std::size_t k = 0; k < total; ++k) {
    Vector at = Vector::Zero(static_cast<Eigen::Index>(d));
    at[0] = radii[k];
    trackers[3].add(jets[k].k, at);
    trackers[4].add(-c_k * jets[k].k - jets[k].k1, at);
  }
  trackers[6].add(c_k > 0.0 ? 1.0 : -1.0, us[0]);

  // Far-field gradient bound at R_K.
  double c_k_far = 0.0;
  if (has_pairs) {
    for (std::size_t k = 0; k < 64; ++k) {
      const double r = r_k * std::pow(1e3, static_cast<double>(k) / 63.0);
      c_k_far = std::max(c_k_far, std::fabs(model.pair_jet(r).k1));
    }
    c_k_far *= kSafetyFactor;
  }

  // Homogeneity over N-particle configurations.
  double c_kk = 1.0;
  if (has_pairs && model.particles() > 1) {
    const std::vector<Vector> xs = sampler.configurations(total);
    const std::size_t coarse = std::min(n, xs.size());
    std::vector<HomogeneityTerms> terms(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) terms[k] = homogeneity_terms(model, xs[k]);
    double lo = kInf;
    for (std::size_t k = 0; k < coarse; ++k)
      if (terms[k].rhs_sum < 0.0) lo = std::min(lo, terms[k].lhs / terms[k].rhs_sum);
    c_kk = std::isfinite(lo) ? lo / kSafetyFactor : 1.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double scale = std::max(std::fabs(terms[k].lhs), std::fabs(terms[k].rhs_sum));
      const double m = c_kk * terms[k].rhs_sum - terms[k].lhs;
      trackers[5].add(scale > 0.0 ? m / scale : m, xs[k]);
    }
    trackers[6].add(c_kk > 0.0 ? 1.0 : -1.0, xs.empty() ? us[0] : xs[0]);
  } else {
    trackers[5].add(0.0, us[0]);
  }

  rep.constants = {{"C_V*", c_v},   {"M_V", m_v},      {"C_V**", c_vv},
                   {"M_V*", m_vs},  {"R_K", r_k},      {"C_K*", c_k},
                   {"C_K**", c_kk}, {"C_K,R_K", c_k_far}};
  rep.samples = total;
  rep.sampled_sup = c_kk;
  finish(rep, trackers);
  if (!rep.pass) rep.message = "sampled margins violated";
  return rep;
}

AssumptionReport check_Hnu(const NoiseSpec& noise, double theta) {
  AssumptionReport rep;
  rep.kind = AssumptionKind::Hnu;
  rep.samples = noise.size();
  const double amin = noise.min_alpha();
  rep.constants["theta"] = theta;
  rep.constants["min_alpha"] = amin;
  rep.margins["moment"] = amin - theta;
  rep.sampled_sup = theta;
  rep.pass = theta > 0.0 && theta < amin;
  if (!rep.pass) {
    rep.message = "theta must satisfy 0 < theta < min alpha_i (only finite θ-moment condition)";
    rep.witnesses.push_back(Vector::Constant(1, theta));
  }
  return rep;
}

}  // namespace levy
