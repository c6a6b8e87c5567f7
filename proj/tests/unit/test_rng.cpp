#include "drm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace drm;

using Block = std::array<std::uint32_t, 4>;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                      {0xffffffff, 0xffffffff}) ==
        Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      {0xa4093822, 0x299f31d0}) ==
        Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8), e(43, 7);
  bool differs_index = false, differs_seed = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    differs_index |= x != c.next_u32();
    differs_seed |= x != e.next_u32();
  }
  CHECK(differs_index);
  CHECK(differs_seed);
  CHECK(a.seed() == 42);
  CHECK(a.index() == 7);
}

TEST_CASE("uniforms lie strictly inside (0, 1)") {
  RngStream s(1, 0);
  double sum = 0.0;
  std::set<double> seen;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
    seen.insert(u);
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(seen.size() == static_cast<std::size_t>(n));
}

TEST_CASE("normal moments") {
  RngStream s(2024, 3);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 4 / std::sqrt(double(n)));
  CHECK(std::abs(m2 - 1.0) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(m3) < 4 * std::sqrt(15.0 / n));
  CHECK(std::abs(m4 - 3.0) < 4 * std::sqrt(96.0 / n));
}
