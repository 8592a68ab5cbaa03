// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "symneg/symmetry.hpp"

namespace symneg {

/// A point of the U(1) thermodynamic-limit phase diagram. Site counts may be
/// non-integer (only ratios enter the classification; absolute counts enter
/// the Stirling prefactors).
struct ThermoPoint {
  double n_a1 = 0.0;
  double n_a2 = 0.0;
  double n_b = 0.0;
  double nu_a = 0.5;  // filling of A
  double nu = 0.5;    // total filling

  ThermoPoint() = default;
  ThermoPoint(double n_a1, double n_a2, double n_b, double nu_a, double nu);

  double n_a() const { return n_a1 + n_a2; }
  double n_total() const { return n_a() + n_b; }
  double r1() const { return n_a1 / n_a(); }
  double r_a() const { return n_a() / n_total(); }
  double nu_b() const { return (nu * n_total() - nu_a * n_a()) / n_b; }
};

/// ln L in the thermodynamic limit: N f(nu) - (1/2) ln(2 pi N nu (1-nu)).
double thermo_dim(double n_sites, double nu);

struct RsbNegativityU1 {
  double n1 = 0.0;                 // general-nu_A prefactored form
  double n1_half_filling_form = 0.0;  // nu_A = 1/2 prefactor variant
  double n2 = 0.0;                 // zero when the shared exponent is negative
  double exponent = 0.0;           // (1/2)[N_A f(nu_A) - N_B f(nu_B)]
  bool n2_active = false;
  bool variants_agree = true;      // false when the two N1 variants differ > 5%
  bool regime_ok = true;           // false at or beyond criticality
};

RsbNegativityU1 rsb_negativity_u1(const ThermoPoint& p);

struct MaxEntLognegU1 {
  double logneg = 0.0;      // nats
  double nu1_saddle = 0.0;  // saddle filling of the larger A subsystem
};

MaxEntLognegU1 maxent_logneg_u1(const ThermoPoint& p);

enum class PhaseLabel { kSuppressed, kReplicaSymmetryBreaking, kMaximalEntanglement, kCriticalRegion };

const char* to_string(PhaseLabel label);

struct PhaseDiagnostics {
  double f_balance = 0.0;     // per-site r_A f(nu_A) - (1-r_A) f(nu_B)
  bool root_side1 = false;    // criticality root in the A1-sector scan
  bool root_side2 = false;
  double critical_nu1 = 0.0;  // bisected root when one exists (side 1 first)
  bool empty_range = false;
};

struct PhaseResult {
  PhaseLabel label = PhaseLabel::kReplicaSymmetryBreaking;
  PhaseDiagnostics diag;
};

/// Phase classifier. Suppressed when N_A f(nu_A) < N_B f(nu_B); critical when
/// the sector-balance equation has a root in the allowed nu_1 window (sign
/// scan at 512 points plus bisection to 1e-10); otherwise maximal
/// entanglement or replica symmetry breaking by the sign of the balance.
/// Points within dead_band of the dashed line are mapped to the critical
/// label rather than misclassified.
PhaseResult classify_phase(const ThermoPoint& p, double dead_band = 1e-9);

struct PhaseDiagramCell {
  double r1 = 0.0;
  double nb_over_na = 0.0;
  PhaseLabel label = PhaseLabel::kReplicaSymmetryBreaking;
  double dashed_value = 0.0;     // N_B/N_A of the suppression line at this r1
  double red_curve_value = 0.0;  // non-symmetric reference line |2 r1 - 1|
};

struct PhaseDiagramGrid {
  int n_r1 = 0;
  int n_y = 0;
  std::vector<PhaseDiagramCell> cells;  // row-major over (r1, y)
};

PhaseDiagramGrid phase_scan(int n_r1, int n_y, double y_min, double y_max, double nu_a, double nu);

struct MutualInfo {
  double nats = 0.0;
  int regime = 0;        // 1, 2, 3 in the order of the case list
  bool boundary = false;
};

/// Z_R mutual information between A1 and A2: {ln R, (N_A-N_B-1) ln R,
/// N_A2 ln R} according to the regime.
MutualInfo mutual_information_zr(const SymmetrySpec& spec, int n_a1, int n_a2, int n_b);

/// U(1) thermodynamic-limit mutual information with Stirling prefactors.
MutualInfo mutual_information_u1(const ThermoPoint& p);

/// Finite-size phase label derived from log-dimension comparisons at integer
/// charges; used to cross-check classify_phase against sector bookkeeping.
/// q_a < 0 selects the largest-Born-weight sector.
PhaseLabel classify_finite(const SymmetrySpec& spec, int n_a1, int n_a2, int n_b, int total_charge,
                           int q_a = -1);

}  // namespace symneg
