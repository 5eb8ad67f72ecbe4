#include "levy/noise.hpp"

#include "levy/error.hpp"
#include "levy/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levy {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw ParameterError("stability index must lie in (0, 2], got " + std::to_string(alpha));
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw ParameterError("time increment must be positive and finite");
}

// Symmetric stable with cf exp(-|xi|^alpha), alpha in (0, 2).
double standard_symmetric_stable(double alpha, RngStream& rng) {
  const double v = kPi * (rng.uniform() - 0.5);
  if (alpha == 1.0) return std::tan(v);
  const double w = rng.exponential();
  const double a = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
  const double b = std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return a * b;
}

}  // namespace

NoiseSpec::NoiseSpec(std::vector<double> per_particle_alpha, bool deterministic)
    : alpha_(std::move(per_particle_alpha)), deterministic_(deterministic) {
  if (alpha_.empty()) throw ParameterError("noise specification needs at least one particle");
  for (double a : alpha_) check_alpha(a);
}

NoiseSpec NoiseSpec::uniform(std::size_t n, double alpha) {
  return NoiseSpec(std::vector<double>(n, alpha));
}

double NoiseSpec::min_alpha() const { return *std::min_element(alpha_.begin(), alpha_.end()); }

double sample_stable_1d(double alpha, double t, RngStream& rng) {
  check_alpha(alpha);
  check_time(t);
  if (alpha == 2.0) return std::sqrt(2.0 * t) * rng.normal();
  return std::pow(t, 1.0 / alpha) * standard_symmetric_stable(alpha, rng);
}

double sample_subordinator_increment(double alpha_half, double t, RngStream& rng) {
  if (!(alpha_half > 0.0 && alpha_half < 1.0))
    throw ParameterError("subordinator index must lie in (0, 1)");
  check_time(t);
  // Kanter's representation, evaluated in log space.
  const double a = alpha_half;
  const double u = kPi * rng.uniform();
  const double e = rng.exponential();
  const double log_a = (a / (1.0 - a)) * std::log(std::sin(a * u)) +
                       std::log(std::sin((1.0 - a) * u)) -
                       (1.0 / (1.0 - a)) * std::log(std::sin(u));
  const double log_s = ((1.0 - a) / a) * (log_a - std::log(e)) + std::log(t) / a;
  return std::max(std::exp(log_s), std::numeric_limits<double>::denorm_min());
}

Vector sample_isotropic_stable(std::size_t d, double alpha, double t, RngStream& rng) {
  if (d == 0) throw ParameterError("dimension must be at least 1");
  check_alpha(alpha);
  check_time(t);
  Vector out(static_cast<Eigen::Index>(d));
  double scale;
  if (alpha == 2.0) {
    scale = std::sqrt(2.0 * t);
  } else {
    scale = std::sqrt(2.0 * sample_subordinator_increment(alpha / 2.0, t, rng));
  }
  for (std::size_t j = 0; j < d; ++j) out[static_cast<Eigen::Index>(j)] = scale * rng.normal();
  return out;
}

void sample_noise_increment(const NoiseSpec& spec, std::size_t d, double t, RngStream& rng,
                            Vector& out) {
  out.setZero(static_cast<Eigen::Index>(spec.size() * d));
  if (spec.deterministic()) return;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double a = spec.alpha(i);
    if (d == 1) {
      out[static_cast<Eigen::Index>(i)] = sample_stable_1d(a, t, rng);
    } else {
      particle(out, i, d) = sample_isotropic_stable(d, a, t, rng);
    }
  }
}

std::complex<double> empirical_char_function(const std::vector<Vector>& samples,
                                             const Vector& xi) {
  if (samples.empty()) throw ParameterError("empirical characteristic function of no samples");
  const std::size_t d = static_cast<std::size_t>(xi.size());
  std::vector<double> rows(samples.size() * d);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (static_cast<std::size_t>(samples[k].size()) != d)
      throw ParameterError("sample dimension does not match frequency dimension");
    std::copy(samples[k].data(), samples[k].data() + d, rows.begin() + static_cast<long>(k * d));
  }
  const auto& kt = kernels::active();
  std::vector<double> phase(samples.size());
  kt.project_rows(rows.data(), samples.size(), d, xi.data(), phase.data());
  double c = 0.0, s = 0.0;
  kt.sum_cos_sin(phase.data(), phase.size(), &c, &s);
  const double n = static_cast<double>(samples.size());
  return {c / n, s / n};
}

std::complex<double> empirical_char_function(const std::vector<double>& samples, double xi) {
  if (samples.empty()) throw ParameterError("empirical characteristic function of no samples");
  std::vector<double> phase(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) phase[k] = xi * samples[k];
  double c = 0.0, s = 0.0;
  kernels::active().sum_cos_sin(phase.data(), phase.size(), &c, &s);
  const double n = static_cast<double>(samples.size());
  return {c / n, s / n};
}

}  // namespace levy
