// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "symneg/cubic.hpp"
#include "symneg/symmetry.hpp"

namespace symneg {

enum class SpectralComponent { kP1, kP2, kTotal };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// An analytic spectral density xi -> P(xi), integrable to negativity.
/// normalization is the expected continuum mass: the sub-block dimension for
/// P2 components, min(dim, partner dim) for P1 components (the rank of a
/// rectangular coupled pair; the remainder sits in an exact delta at zero).
struct SpectralModel {
  std::string label;
  SpectralComponent component = SpectralComponent::kTotal;
  std::vector<Interval> support;
  std::function<double(double)> density;
  double normalization = 0.0;
  double expected_first_moment = 0.0;
  bool regime_ok = true;           // advisory regime-ratio check
  std::vector<Interval> flagged;   // branch-tracking disagreements

  double integral(double abs_tol = 1e-8) const;
  double first_moment(double abs_tol = 1e-8) const;
  /// -integral of xi P(xi) over xi < 0
  double negativity(double abs_tol = 1e-8) const;
};

/// Semicircle law of the charge-diagonal (q1, qbar1) sub-block: centered at
/// 1/L_{q_A} with radius 2 sqrt(alpha_{q1 qbar1} / L_{q_A}).
SpectralModel semicircle_p2(int q1, const SectorGeometry& geom);

/// Charge-off-diagonal component for the (q1, q2), q2 != qbar1 pair;
/// mirror-symmetric in xi with support
///   |sqrt(a) - sqrt(abar)| < |xi| sqrt(L_{q_A}) < sqrt(a) + sqrt(abar).
SpectralModel semicircle_p1(int q1, int q2, const SectorGeometry& geom);

/// Z_R projected density: an (R-1)-weighted zero-centered semicircle plus a
/// 1/R^(N_A-1)-centered one, both of radius 2 R^(-(N-1)/2).
SpectralModel zr_semicircle_density(const SectorGeometry& geom);

struct ZrNegativity {
  double n1 = 0.0;        // residual contribution, always present
  double n2 = 0.0;        // centered-semicircle contribution; zero when R^(N_A-N_B-1) <= 1/4
  double logneg2 = 0.0;   // piecewise closed form, log2 units
};

ZrNegativity zr_closed_negativity(const SectorGeometry& geom);

enum class CubicKind { kG2General, kG1General, kZrG1, kZrG2 };

struct CubicCoefficients {
  double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;
  CubicKind provenance = CubicKind::kG2General;
};

CubicCoefficients sd_cubic_g2(int q1, const SectorGeometry& geom, double xi);
CubicCoefficients sd_cubic_g1(int q1, int q2, const SectorGeometry& geom, double xi);
enum class ZrCubic { kG1, kG2 };
CubicCoefficients sd_cubic_zr(const SectorGeometry& geom, double xi, ZrCubic which);

/// Resolvent value at xi + i0+: the member of the conjugate root pair with
/// negative imaginary part, or the real root closest to the 1/xi branch when
/// all roots are real (zero density there).
std::complex<double> resolvent_from_cubic(const CubicCoefficients& coeffs);

/// Spectral density from a cubic Schwinger-Dyson equation. The density is
/// weight/pi * |Im G| with the branch rule above, evaluated exactly at any
/// xi (no epsilon limit). The grid is used to bracket the support (edges are
/// then refined by bisection) and to run a continuation pass from |xi| ->
/// infinity that cross-checks the branch selection; disagreeing grid
/// intervals are flagged.
SpectralModel density_from_cubic(const std::function<CubicCoefficients(double)>& coeffs,
                                 const std::vector<double>& grid, double weight,
                                 const std::string& label,
                                 SpectralComponent component = SpectralComponent::kTotal);

/// Per-sector cubic-solved densities.
SpectralModel cubic_density_p2(int q1, const SectorGeometry& geom, int grid_points = 4001);
SpectralModel cubic_density_p1(int q1, int q2, const SectorGeometry& geom, int grid_points = 4001);
/// Z_R single-component densities with the full component weight
/// ((R^2-R) R^(N_A-2) for G1, R^(N_A-1) for G2).
SpectralModel zr_cubic_density(const SectorGeometry& geom, ZrCubic which, int grid_points = 4001);

struct CriticalityFlags {
  bool g2_critical = false;  // L_{A1,q1} = L_{A2,qbar1} L_{q_B}
  bool g1_critical = false;  // L_{A1,q1} L_{A2,q2} = L_{A1,qbar2} L_{A2,qbar1}
                             // and L_{A1,q1} = L_{A2,q2} L_{q_B}
};

CriticalityFlags criticality_flags(int q1, int q2, const SectorGeometry& geom);

struct MaxEntClosedForms {
  double n1 = 0.0;        // sqrt(L_{A1,q1} L_{A1,qbar2}) L_{A2,q2} L_{A2,qbar1} / (2 L_{q_A})
  double n2 = 0.0;        // L_{A1,q1} L_{A2,qbar1}^2 / (2 L_{q_A})
  double zr_total = 0.0;  // (1/2) R^(N_A2); NaN for U(1)
  bool regime_ok = true;
};

MaxEntClosedForms max_ent_closed_forms(int q1, int q2, const SectorGeometry& geom);

/// Plateau value of the charge-diagonal negativity contribution deep in the
/// replica-symmetry-breaking regime.
double rsb_plateau_n2(int q1, const SectorGeometry& geom);

/// Im G of either component deep in the Z_R maximal-entanglement regime
/// (gamma small), evaluated at real z.
double zr_maxent_im_g(const SectorGeometry& geom, double z);

/// Spectrum of rho_A^{T2} without charge projection, Z_R closed form:
/// a single semicircle centered at R^(-N_A) with radius 2 R^(-N/2).
SpectralModel unprojected_zr_density(const SectorGeometry& geom);

struct FixedPointResult {
  SpectralModel total;
  std::vector<double> grid;
  std::vector<double> total_density;
  // per charge-imbalance dq = q1 - q2 component densities on the grid
  std::vector<std::pair<int, std::vector<double>>> dq_components;
  bool converged = true;
  int worst_iterations = 0;
  std::vector<double> residual_history;  // of the worst grid point
};

struct FixedPointOptions {
  double tol = 1e-10;
  int max_iter = 20000;
  double damping = 0.5;      // mixing toward the new iterate
  double epsilon_rel = 1e-6; // imaginary offset relative to the spectral scale
};

/// Coupled Schwinger-Dyson solver for the unprojected spectrum (any Abelian
/// spec). Iterates Sigma <-> G at z = xi + i*eps with damping; throws
/// nothing on non-convergence, reporting it in the result instead.
FixedPointResult unprojected_fixed_point(const SectorGeometry& geom,
                                         const std::vector<double>& grid,
                                         const FixedPointOptions& opts = {});

/// Symmetric grid of n points covering [-span, span].
std::vector<double> symmetric_grid(double span, int n);

/// Generous support bracket for the projected spectrum of a geometry.
double support_bracket(const SectorGeometry& geom);

}  // namespace symneg
