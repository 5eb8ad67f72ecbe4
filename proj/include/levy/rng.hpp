#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levy {

/// Counter-based generator (Philox4x32-10) keyed by (seed, stream id).
/// Draw k of a stream depends only on (seed, stream, k), so streams can be
/// split and advanced independently of thread scheduling.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  /// Unit-rate exponential.
  double exponential();

  /// Child stream whose id is a hash of (stream id, sub id).
  RngStream split(std::uint64_t sub_id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t counter() const { return drawn_; }

  /// Skip ahead to word position n.
  void seek(std::uint64_t n);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t drawn_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

std::uint64_t mix64(std::uint64_t z);

}  // namespace levy
