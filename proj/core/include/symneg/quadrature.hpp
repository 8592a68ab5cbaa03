// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

namespace symneg {

/// Adaptive Gauss-Kronrod (G7, K15) integration to an absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 48);

/// Same, but with the substitution x = edge +- t^2 applied at both interval
/// ends. Tames the inverse-square-root and inverse-cube-root integrable
/// singularities that spectral densities develop at support edges and at
/// critical points.
double integrate_with_edge_substitution(const std::function<double(double)>& f, double a, double b,
                                        double abs_tol = 1e-10);

}  // namespace symneg
