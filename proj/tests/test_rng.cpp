#include <cmath>
#include <vector>

#include "doctest.h"
#include "interlace/rng.hpp"

using namespace interlace;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
  auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
  CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u});
  CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8), e(43, 7);
  std::vector<std::uint32_t> va, vb, vc, ve;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next_u32());
    vb.push_back(b.next_u32());
    vc.push_back(c.next_u32());
    ve.push_back(e.next_u32());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != ve);
  CHECK(RngStream(1, 2).child(3).next_u64() == RngStream(1, 2).child(3).next_u64());
  CHECK(RngStream(1, 2).child(3).next_u64() != RngStream(1, 2).child(4).next_u64());
}

TEST_CASE("small_below is uniform over 6 values") {
  RngStream rng(5, 0);
  std::vector<long> counts(6, 0);
  const long n = 600000;
  for (long i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.small_below(6))];
  const double p = 1.0 / 6, se = std::sqrt(n * p * (1 - p));
  for (auto c : counts) CHECK(std::abs(c - n * p) < 4 * se);
}

TEST_CASE("uniform01 and uniform_below ranges") {
  RngStream rng(9, 9);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    REQUIRE(rng.uniform_below(13) < 13);
  }
  CHECK(std::abs(sum / 100000 - 0.5) < 4 * std::sqrt(1.0 / 12 / 100000));
}
