// SPDX-License-Identifier: Apache-2.0
#include "symneg/cubic.hpp"

#include <cmath>
#include <numbers>

namespace symneg {

namespace {

using cd = std::complex<double>;

cd horner(double c3, double c2, double c1, double c0, cd x) {
  return ((cd(c3) * x + c2) * x + c1) * x + c0;
}

cd horner_d(double c3, double c2, double c1, cd x) {
  return (cd(3.0 * c3) * x + 2.0 * c2) * x + c1;
}

void polish(double c3, double c2, double c1, double c0, cd& x) {
  for (int it = 0; it < 3; ++it) {
    cd f = horner(c3, c2, c1, c0, x);
    cd df = horner_d(c3, c2, c1, x);
    if (std::abs(df) == 0.0) return;
    cd step = f / df;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return;
    x -= step;
  }
}

CubicRoots solve_quadratic(double a, double b, double c) {
  CubicRoots out;
  if (a == 0.0) {
    if (b == 0.0) return out;  // constant: no roots
    out.count = 1;
    out.root[0] = -c / b;
    return out;
  }
  double disc = b * b - 4.0 * a * c;
  out.count = 2;
  if (disc >= 0.0) {
    double q = -0.5 * (b + std::copysign(std::sqrt(disc), b == 0.0 ? 1.0 : b));
    if (q != 0.0) {
      out.root[0] = q / a;
      out.root[1] = c / q;
    } else {
      out.root[0] = 0.0;
      out.root[1] = 0.0;
    }
  } else {
    double re = -b / (2.0 * a);
    double im = std::sqrt(-disc) / (2.0 * a);
    out.root[0] = {re, std::abs(im)};
    out.root[1] = {re, -std::abs(im)};
    out.has_complex_pair = true;
  }
  return out;
}

}  // namespace

CubicRoots solve_cubic(double c3, double c2, double c1, double c0) {
  if (c3 == 0.0) return solve_quadratic(c2, c1, c0);

  double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  // strong leading-coefficient disparity: Cardano would lose the finite
  // roots to cancellation, so deflate instead — one root escapes toward -a,
  // the other two are the roots of the trailing quadratic (then polished)
  {
    CubicRoots q = solve_quadratic(c2, c1, c0);
    if (q.count == 2) {
      double qscale = std::max({std::abs(q.root[0]), std::abs(q.root[1]), 1e-300});
      if (std::abs(a) > 1e3 * qscale) {
        CubicRoots out = q;
        out.count = 3;
        out.root[2] = -a - (q.root[0] + q.root[1]);  // root-sum identity
        for (int i = 0; i < 3; ++i) polish(c3, c2, c1, c0, out.root[i]);
        if (out.has_complex_pair) {
          cd mean = 0.5 * (out.root[0] + std::conj(out.root[1]));
          out.root[0] = mean;
          out.root[1] = std::conj(mean);
        }
        return out;
      }
    }
  }

  CubicRoots out;
  out.count = 3;
  double p = b - a * a / 3.0;
  double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc >= 0.0) {
    // one real root and a conjugate pair (pair degenerates to real at disc=0)
    double s = std::sqrt(disc);
    double w = -0.5 * q - std::copysign(s, q);  // larger-magnitude cube
    double u = std::cbrt(w);
    double v = u != 0.0 ? -p / (3.0 * u) : std::cbrt(-0.5 * q + std::copysign(s, q));
    double t0 = u + v;
    double im = 0.5 * std::numbers::sqrt3 * (u - v);
    out.root[0] = {-0.5 * t0 - a / 3.0, std::abs(im)};
    out.root[1] = {-0.5 * t0 - a / 3.0, -std::abs(im)};
    out.root[2] = t0 - a / 3.0;
    out.has_complex_pair = disc > 0.0;
  } else {
    double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * m);
    arg = std::clamp(arg, -1.0, 1.0);
    double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      out.root[k] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - a / 3.0;
  }
  for (int i = 0; i < 3; ++i) polish(c3, c2, c1, c0, out.root[i]);
  if (out.has_complex_pair) {
    // keep the pair exactly conjugate after polishing
    cd mean = 0.5 * (out.root[0] + std::conj(out.root[1]));
    out.root[0] = mean;
    out.root[1] = std::conj(mean);
  }
  return out;
}

}  // namespace symneg
