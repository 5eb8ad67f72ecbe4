#include "levy/system.hpp"

#include "levy/error.hpp"

#include <cmath>
#include <sstream>

namespace levy {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::TamedEuler:
      return "tamed_euler";
    case Scheme::AdaptiveEuler:
      return "adaptive_euler";
    case Scheme::ExactOUSplitting:
      return "exact_ou_splitting";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "tamed_euler") return Scheme::TamedEuler;
  if (name == "adaptive_euler") return Scheme::AdaptiveEuler;
  if (name == "exact_ou_splitting" || name == "ou_splitting") return Scheme::ExactOUSplitting;
  fail_parameter("unknown scheme '" + name + "'");
}

void SystemSpec::validate() const {
  std::ostringstream os;
  if (n == 0 || d == 0) fail_parameter("system needs n >= 1 and d >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    os << "friction gamma must be positive, got " << gamma;
    fail_parameter(os.str());
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    os << "step h must be positive, got " << h;
    fail_parameter(os.str());
  }
  if (!potential) fail_parameter("system has no potential");
  if (potential->particles() != n || potential->dim() != d)
    fail_parameter("potential dimensions do not match the system");
  if (noise.size() != n) {
    os << "noise lists " << noise.size() << " indices for " << n << " particles";
    fail_parameter(os.str());
  }
  if (!(guards.min_pair_distance >= 0.0) || !(guards.drift_step > 0.0))
    fail_parameter("guard thresholds must be positive");
}

bool in_state_space(const SystemSpec& sys, const PhaseState& z) {
  const auto m = static_cast<Eigen::Index>(sys.total_dim());
  if (z.x.size() != m || z.v.size() != m) return false;
  if (!z.v.allFinite() || !z.x.allFinite()) return false;
  return std::isfinite(sys.potential->value(z.x));
}

double hamiltonian(const SystemSpec& sys, const PhaseState& z) {
  return 0.5 * z.v.squaredNorm() + sys.potential->value(z.x);
}

}  // namespace levy
