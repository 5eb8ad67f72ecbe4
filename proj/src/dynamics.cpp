#include "levy/dynamics.hpp"

#include "levy/error.hpp"
#include "levy/io.hpp"
#include "levy/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <cstring>
#include <sstream>

namespace levy {

namespace {

bool admissible(const SystemSpec& sys, const Vector& x) {
  if (!x.allFinite() || !std::isfinite(sys.potential->value(x))) return false;
  if (sys.n > 1 && sys.potential->interacting() &&
      min_pair_distance(x, sys.d) < sys.guards.min_pair_distance)
    return false;
  return true;
}

// Proposal from (x, v); no domain check on the input.
std::optional<PhaseState> propose(const PhaseState& z, const SystemSpec& sys, const Vector& dL,
                                  double h) {
  const PotentialModel& pot = *sys.potential;
  PhaseState out;
  switch (sys.scheme) {
    case Scheme::TamedEuler: {
      const Vector G = sys.gamma * z.v + pot.gradient(z.x);
      out.x = z.x + h * z.v;
      out.v = z.v - (h / (1.0 + h * G.norm())) * G + dL;
      break;
    }
    case Scheme::AdaptiveEuler: {
      Vector x = z.x, v = z.v;
      double left = h;
      std::size_t halvings = 0;
      while (left > 0.0) {
        const Vector G = sys.gamma * v + pot.gradient(x);
        double hs = left;
        const double gn = G.norm();
        while (gn * hs > sys.guards.drift_step && halvings < sys.guards.max_halvings) {
          hs *= 0.5;
          ++halvings;
        }
        const Vector xn = x + hs * v;
        v -= hs * G;
        x = xn;
        left -= hs;
        if (left < 1e-15 * h) left = 0.0;
        if (!admissible(sys, x)) return std::nullopt;
      }
      out.x = std::move(x);
      out.v = v + dL;
      break;
    }
    case Scheme::ExactOUSplitting: {
      const double decay = std::exp(-sys.gamma * h);
      const double drift_time = -std::expm1(-sys.gamma * h) / sys.gamma;
      const Vector kicked = z.v - h * pot.gradient(z.x);
      out.x = z.x + drift_time * kicked;
      out.v = decay * kicked + dL;
      break;
    }
  }
  if (!admissible(sys, out.x) || !out.v.allFinite()) return std::nullopt;
  return out;
}

}  // namespace

std::optional<PhaseState> step(const PhaseState& z, const SystemSpec& sys, const Vector& dL,
                               double h) {
  if (!in_state_space(sys, z)) throw DomainError("step called outside the state space");
  if (!(h > 0.0)) fail_parameter("step size must be positive");
  if (dL.size() != z.v.size()) fail_parameter("noise increment has the wrong size");
  return propose(z, sys, dL, h);
}

std::size_t TrajectoryBatch::time_index(double t) const {
  for (std::size_t m = 0; m < times.size(); ++m)
    if (std::fabs(times[m] - t) <= 1e-12 * std::max(1.0, std::fabs(t))) return m;
  std::ostringstream os;
  os << "no snapshot at time " << t;
  throw ParameterError(os.str());
}

std::vector<PhaseState> TrajectoryBatch::ensemble(std::size_t m) const {
  if (m >= times.size()) fail_parameter("snapshot index out of range");
  std::vector<PhaseState> out;
  out.reserve(trajectories.size());
  for (const auto& tr : trajectories) out.push_back(tr.snapshots[m]);
  return out;
}

StepStats TrajectoryBatch::totals() const {
  StepStats s;
  s.min_step = kInf;
  for (const auto& tr : trajectories) {
    s.accepted += tr.stats.accepted;
    s.rejected += tr.stats.rejected;
    s.reductions += tr.stats.reductions;
    s.max_consecutive_rejections =
        std::max(s.max_consecutive_rejections, tr.stats.max_consecutive_rejections);
    s.min_step = std::min(s.min_step, tr.stats.min_step);
  }
  if (trajectories.empty()) s.min_step = 0.0;
  return s;
}

TrajectoryBatch simulate(const SystemSpec& sys, const PhaseState& z0,
                         const SimulationOptions& options) {
  sys.validate();
  if (!in_state_space(sys, z0)) throw DomainError("initial state is outside the state space");
  if (!(options.horizon > 0.0)) fail_parameter("horizon must be positive");
  if (options.trajectories == 0) fail_parameter("need at least one trajectory");
  for (std::size_t m = 0; m < options.snapshots.size(); ++m) {
    const double t = options.snapshots[m];
    if (!(t >= 0.0) || t > options.horizon) fail_parameter("snapshot time outside [0, horizon]");
    if (m > 0 && !(t > options.snapshots[m - 1]))
      fail_parameter("snapshot times must be strictly increasing");
  }

  TrajectoryBatch batch;
  batch.seed = options.seed;
  batch.times = options.snapshots;
  batch.trajectories.resize(options.trajectories);
  const std::size_t dim = sys.total_dim();

  parallel_for(options.trajectories, options.threads, [&](std::size_t m) {
    Trajectory& tr = batch.trajectories[m];
    tr.stream_id = options.stream_offset + m;
    RngStream rng(options.seed, tr.stream_id);
    PhaseState z = z0;
    Vector dL = Vector::Zero(static_cast<Eigen::Index>(dim));
    double t = 0.0;
    double h = sys.h;
    std::size_t consecutive = 0;
    tr.stats.min_step = sys.h;
    std::size_t next = 0;
    auto record_due = [&] {
      while (next < batch.times.size() && batch.times[next] <= t + 1e-12 * std::max(1.0, t)) {
        tr.snapshots.push_back(z);
        ++next;
      }
    };
    record_due();
    while (t < options.horizon && options.horizon - t > 1e-12 * std::max(1.0, options.horizon)) {
      double target = options.horizon;
      if (next < batch.times.size()) target = std::min(target, batch.times[next]);
      const double hs = std::min(h, target - t);
      if (sys.noise.deterministic())
        dL.setZero();
      else
        sample_noise_increment(sys.noise, sys.d, hs, rng, dL);
      auto proposal = propose(z, sys, dL, hs);
      if (!proposal) {
        ++tr.stats.rejected;
        ++tr.stats.reductions;
        ++consecutive;
        tr.stats.max_consecutive_rejections =
            std::max<std::uint64_t>(tr.stats.max_consecutive_rejections, consecutive);
        if (consecutive > sys.guards.max_rejections) {
          std::ostringstream os;
          os << "trajectory " << m << " stuck at t = " << t << " after " << consecutive
             << " consecutive rejections (step " << hs << ", min pair distance "
             << min_pair_distance(z.x, sys.d) << ")";
          throw StuckStateError(os.str(), m, t);
        }
        h = 0.5 * hs;
        tr.stats.min_step = std::min(tr.stats.min_step, h);
        continue;
      }
      z = std::move(*proposal);
      t = (hs == target - t) ? target : t + hs;
      ++tr.stats.accepted;
      consecutive = 0;
      h = std::min(sys.h, 2.0 * h);
      record_due();
    }
    record_due();
  });
  return batch;
}

void write_csv(const TrajectoryBatch& batch, std::ostream& out) {
  if (batch.trajectories.empty()) return;
  const auto dim = batch.trajectories.front().snapshots.empty()
                       ? Eigen::Index{0}
                       : batch.trajectories.front().snapshots.front().x.size();
  out << "trajectory,time";
  for (Eigen::Index k = 0; k < dim; ++k) out << ",x" << k;
  for (Eigen::Index k = 0; k < dim; ++k) out << ",v" << k;
  out << '\n';
  std::string line;
  for (const auto& tr : batch.trajectories) {
    for (std::size_t m = 0; m < tr.snapshots.size(); ++m) {
      line = std::to_string(tr.stream_id);
      line += ',';
      line += format_double(batch.times[m]);
      const PhaseState& z = tr.snapshots[m];
      for (Eigen::Index k = 0; k < dim; ++k) {
        line += ',';
        line += format_double(z.x[k]);
      }
      for (Eigen::Index k = 0; k < dim; ++k) {
        line += ',';
        line += format_double(z.v[k]);
      }
      line += '\n';
      out << line;
    }
  }
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  std::uint64_t bits = 0;
  static_assert(sizeof(T) == 8);
  std::memcpy(&bits, &value, 8);
  for (std::size_t k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(bits >> (8 * k));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

}  // namespace

void write_binary(const TrajectoryBatch& batch, std::ostream& out) {
  std::uint64_t rows = 0;
  std::uint64_t dim = 0;
  for (const auto& tr : batch.trajectories) {
    rows += tr.snapshots.size();
    if (!tr.snapshots.empty()) dim = static_cast<std::uint64_t>(tr.snapshots.front().x.size());
  }
  out.write("LEVYTRJ1", 8);
  put_le(out, rows);
  put_le(out, dim);
  for (const auto& tr : batch.trajectories)
    for (std::size_t m = 0; m < tr.snapshots.size(); ++m) put_le(out, tr.stream_id);
  for (const auto& tr : batch.trajectories)
    for (std::size_t m = 0; m < tr.snapshots.size(); ++m) put_le(out, batch.times[m]);
  for (int part = 0; part < 2; ++part)
    for (std::uint64_t k = 0; k < dim; ++k)
      for (const auto& tr : batch.trajectories)
        for (const auto& z : tr.snapshots)
          put_le(out, part == 0 ? z.x[static_cast<Eigen::Index>(k)] : z.v[static_cast<Eigen::Index>(k)]);
}

}  // namespace levy
