#include "levy/sampling.hpp"

#include "levy/error.hpp"

#include <cmath>

namespace levy {

namespace {

double log_level(double lo, double hi, std::size_t levels, std::size_t stratum, double jitter) {
  if (levels <= 1 || hi <= lo) return lo;
  const double f = (static_cast<double>(stratum) + jitter) / static_cast<double>(levels);
  return lo * std::pow(hi / lo, f);
}

}  // namespace

Vector random_direction(std::size_t d, RngStream& rng) {
  Vector u(static_cast<Eigen::Index>(d));
  double n2 = 0.0;
  do {
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = rng.normal();
    n2 = u.squaredNorm();
  } while (n2 == 0.0);
  return u / std::sqrt(n2);
}

ConfigurationSampler::ConfigurationSampler(const PotentialModel& model, SamplerOptions options)
    : model_(&model), options_(options) {
  if (!(options_.scale_min > 0.0 && options_.scale_max >= options_.scale_min))
    throw ParameterError("sampler needs 0 < scale_min <= scale_max");
  if (!(options_.pair_min > 0.0 && options_.pair_max >= options_.pair_min))
    throw ParameterError("sampler needs 0 < pair_min <= pair_max");
  if (options_.scale_levels == 0 || options_.pair_levels == 0 || options_.speed_levels == 0)
    throw ParameterError("sampler strata counts must be positive");
}

Vector ConfigurationSampler::configuration(std::size_t k) const {
  const std::size_t n = model_->particles();
  const std::size_t d = model_->dim();
  RngStream rng(options_.seed, 2 * static_cast<std::uint64_t>(k));
  const std::size_t ls = options_.scale_levels;
  const double scale =
      log_level(options_.scale_min, options_.scale_max, ls, k % ls, rng.uniform());
  Vector x(static_cast<Eigen::Index>(n * d));
  for (std::size_t i = 0; i < n; ++i)
    particle(x, i, d) = scale * rng.uniform() * random_direction(d, rng);

  const bool pin_pair = n > 1 && model_->singular() && ((k / ls) % 2 == 1);
  if (pin_pair) {
    const std::size_t lp = options_.pair_levels;
    const std::size_t stratum = (k / (2 * ls)) % lp;
    const double len = model_->pair_length_scale();
    const double r = len * log_level(options_.pair_min, options_.pair_max, lp, stratum,
                                     rng.uniform());
    const std::size_t i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n;
    std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - 1)) % (n - 1);
    if (j >= i) ++j;
    const Vector dir = random_direction(d, rng);
    const Vector base = particle(x, i, d);
    particle(x, j, d) = base + r * dir;
  }
  return x;
}

PhaseState ConfigurationSampler::phase_state(std::size_t k) const {
  PhaseState z;
  z.x = configuration(k);
  RngStream rng(options_.seed, 2 * static_cast<std::uint64_t>(k) + 1);
  const std::size_t lv = options_.speed_levels;
  // Velocity strata are decorrelated from position strata by a coprime stride.
  const std::size_t stratum = (k * 7 + k / options_.scale_levels) % lv;
  z.v = Vector::Zero(z.x.size());
  if (stratum > 0) {
    const double speed =
        log_level(options_.speed_min, options_.speed_max, lv - 1, stratum - 1, rng.uniform());
    for (Eigen::Index j = 0; j < z.v.size(); ++j) z.v[j] = rng.normal();
    const double nv = z.v.norm();
    if (nv > 0.0) z.v *= speed / nv;
  }
  return z;
}

std::vector<Vector> ConfigurationSampler::configurations(std::size_t n) const {
  std::vector<Vector> out;
  out.reserve(n);
  const std::size_t limit = 20 * n + 100;
  for (std::size_t k = 0; out.size() < n && k < limit; ++k) {
    Vector x = configuration(k);
    if (!model_->in_domain(x)) continue;
    if (!model_->gradient(x).allFinite()) continue;
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<PhaseState> ConfigurationSampler::phase_states(std::size_t n) const {
  std::vector<PhaseState> out;
  out.reserve(n);
  const std::size_t limit = 20 * n + 100;
  for (std::size_t k = 0; out.size() < n && k < limit; ++k) {
    PhaseState z = phase_state(k);
    if (!model_->in_domain(z.x)) continue;
    if (!model_->gradient(z.x).allFinite()) continue;
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace levy
