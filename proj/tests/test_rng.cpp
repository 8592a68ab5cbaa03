// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "symneg/rng.hpp"

using namespace symneg;

TEST_CASE("streams are deterministic and order-independent") {
  PhiloxRng a(42, 7);
  PhiloxRng b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // drawing from one stream never perturbs another
  PhiloxRng s0(42, 0);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 16; ++i) first.push_back(s0.next_u64());
  PhiloxRng s1(42, 1);
  for (int i = 0; i < 1000; ++i) (void)s1.next_u64();
  PhiloxRng s0_again(42, 0);
  for (int i = 0; i < 16; ++i) CHECK(s0_again.next_u64() == first[i]);
}

TEST_CASE("different seeds and streams decorrelate") {
  PhiloxRng a(1, 0), b(2, 0), c(1, 1);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t xa = a.next_u64();
    if (xa == b.next_u64()) ++same_ab;
    if (xa == c.next_u64()) ++same_ac;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("uniform and gaussian moments") {
  PhiloxRng rng(2024, 0);
  const int n = 200000;
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  mean /= n;
  CHECK(std::abs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));

  double gsum = 0.0, gsq = 0.0, g4 = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.next_gaussian();
    gsum += g;
    gsq += g * g;
    g4 += g * g * g * g;
  }
  gsum /= n;
  gsq /= n;
  g4 /= n;
  CHECK(std::abs(gsum) < 5.0 / std::sqrt(double(n)));
  CHECK(gsq == doctest::Approx(1.0).epsilon(0.02));
  CHECK(g4 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("complex gaussian variance split") {
  PhiloxRng rng(5, 3);
  const int n = 100000;
  double re2 = 0.0, im2 = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    auto z = rng.next_complex_gaussian(0.25);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    cross += z.real() * z.imag();
  }
  CHECK(re2 / n == doctest::Approx(0.125).epsilon(0.03));
  CHECK(im2 / n == doctest::Approx(0.125).epsilon(0.03));
  CHECK(std::abs(cross / n) < 0.005);
}
