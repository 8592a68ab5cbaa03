// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>

namespace symneg {

/// Roots of c3 x^3 + c2 x^2 + c1 x + c0 with real coefficients.
/// Degenerate leading coefficients reduce the degree; count reflects the
/// effective degree. Complex roots come in conjugate pairs.
struct CubicRoots {
  int count = 0;
  std::array<std::complex<double>, 3> root{};
  bool has_complex_pair = false;
};

CubicRoots solve_cubic(double c3, double c2, double c1, double c0);

}  // namespace symneg
