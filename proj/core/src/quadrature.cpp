// SPDX-License-Identifier: Apache-2.0
#include "symneg/quadrature.hpp"

#include <array>
#include <cmath>

namespace symneg {

namespace {

// QUADPACK 15-point Kronrod nodes and weights; the 7-point Gauss rule sits
// on the odd-index nodes.
constexpr std::array<double, 8> kKronrodNode = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr std::array<double, 8> kKronrodWeight = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussWeight = {0.129484966168870, 0.279705391489277,
                                                0.381830050505119, 0.417959183673469};

struct RuleResult {
  double kronrod;
  double error;
};

RuleResult gk15(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double kron = kKronrodWeight[7] * fc;
  double gauss = kGaussWeight[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double x = h * kKronrodNode[i];
    double fsum = f(c - x) + f(c + x);
    kron += kKronrodWeight[i] * fsum;
    if (i % 2 == 1) gauss += kGaussWeight[i / 2] * fsum;
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                int depth) {
  RuleResult r = gk15(f, a, b);
  if (r.error <= tol || depth <= 0) return r.kronrod;
  double c = 0.5 * (a + b);
  return adaptive(f, a, c, 0.5 * tol, depth - 1) + adaptive(f, c, b, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, abs_tol, max_depth);
  return adaptive(f, a, b, abs_tol, max_depth);
}

double integrate_with_edge_substitution(const std::function<double(double)>& f, double a, double b,
                                        double abs_tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_with_edge_substitution(f, b, a, abs_tol);
  double m = 0.5 * (a + b);
  auto left = [&](double t) { return 2.0 * t * f(a + t * t); };
  auto right = [&](double t) { return 2.0 * t * f(b - t * t); };
  double s = std::sqrt(m - a);
  return integrate(left, 0.0, s, 0.5 * abs_tol) + integrate(right, 0.0, s, 0.5 * abs_tol);
}

}  // namespace symneg
