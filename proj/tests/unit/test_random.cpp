#include <doctest.h>

#include <set>

#include "slfv/random.hpp"

using slfv::Philox4x32;
using slfv::RandomStream;

TEST_CASE("philox known-answer vectors") {
  // Random123 kat_vectors, philox4x32_10
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    seen.insert(x);
    seen.insert(c());
    seen.insert(d());
  }
  CHECK(seen.size() == 3000);
  CHECK(a.blocks_used() == 500);
}

TEST_CASE("derived draws stay in range") {
  RandomStream rng(1, 0);
  double sum = 0.0;
  std::size_t hits = 0;
  std::array<int, 7> bins{};
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = rng.uniform_pos();
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
    sum += rng.exponential(2.0);
    hits += rng.bernoulli(0.3);
    const auto k = rng.below(7);
    REQUIRE(k < 7);
    ++bins[k];
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(double(hits) / n == doctest::Approx(0.3).epsilon(0.01));
  for (int b : bins) CHECK(double(b) / n == doctest::Approx(1.0 / 7).epsilon(0.03));
  CHECK(rng.below(1) == 0);
}
