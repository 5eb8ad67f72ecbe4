#include "levy/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace levy;

TEST_CASE("philox block function matches the published known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      A2{0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("identical seed and stream reproduce the sequence bit for bit") {
  RngStream a(42, 7), b(42, 7);
  for (int k = 0; k < 1000; ++k) {
    REQUIRE(a() == b());
    REQUIRE(a.normal() == b.normal());
  }
}

TEST_CASE("seek reproduces the word at any position") {
  RngStream a(3, 1);
  std::vector<std::uint64_t> words;
  for (int k = 0; k < 64; ++k) words.push_back(a());
  RngStream b(3, 1);
  b.seek(37);
  CHECK(b.counter() == 37);
  CHECK(b() == words[37]);
  b.seek(2);
  CHECK(b() == words[2]);
}

TEST_CASE("distinct streams are uncorrelated") {
  const int n = 100000;
  RngStream a(9, 0), b(9, 1), c(10, 0);
  double sab = 0.0, sac = 0.0;
  for (int k = 0; k < n; ++k) {
    const double ua = a.uniform() - 0.5;
    sab += ua * (b.uniform() - 0.5);
    sac += ua * (c.uniform() - 0.5);
  }
  // Correlation of independent uniforms has standard deviation 1/sqrt(n).
  const double scale = 12.0 / n;
  CHECK(std::fabs(sab * scale) < 5.0 / std::sqrt(n));
  CHECK(std::fabs(sac * scale) < 5.0 / std::sqrt(n));
}

TEST_CASE("uniform draws stay in the open unit interval with the right moments") {
  RngStream r(1, 2);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(s2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("normal and exponential draws have unit scale") {
  RngStream r(5, 5);
  const int n = 200000;
  double m = 0.0, v = 0.0, e = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = r.normal();
    m += z;
    v += z * z;
    e += r.exponential();
  }
  CHECK(std::fabs(m / n) < 0.015);
  CHECK(v / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(e / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("split streams are deterministic and differ from the parent") {
  RngStream p(11, 4);
  RngStream c1 = p.split(1), c2 = p.split(1), c3 = p.split(2);
  CHECK(c1.stream_id() == c2.stream_id());
  CHECK(c1.stream_id() != c3.stream_id());
  CHECK(c1.stream_id() != p.stream_id());
  CHECK(c1() == c2());
}
