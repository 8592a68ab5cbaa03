// SPDX-License-Identifier: Apache-2.0
#include "symneg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace symneg {

namespace {
constexpr double kPi = std::numbers::pi;
}

ThermoPoint::ThermoPoint(double n_a1_, double n_a2_, double n_b_, double nu_a_, double nu_)
    : n_a1(n_a1_), n_a2(n_a2_), n_b(n_b_), nu_a(nu_a_), nu(nu_) {
  if (n_a1 <= 0.0 || n_a2 <= 0.0 || n_b <= 0.0)
    throw std::invalid_argument("ThermoPoint: positive subsystem sizes required");
  if (nu_a <= 0.0 || nu_a >= 1.0) throw std::invalid_argument("ThermoPoint: nu_A outside (0,1)");
  double nb = nu_b();
  if (nb < -1e-12 || nb > 1.0 + 1e-12)
    throw std::invalid_argument("ThermoPoint: implied nu_B outside [0,1]");
}

double thermo_dim(double n_sites, double nu) {
  if (nu <= 0.0 || nu >= 1.0) throw std::domain_error("thermo_dim: boundary filling");
  return n_sites * shannon_f(nu) - 0.5 * std::log(2.0 * kPi * n_sites * nu * (1.0 - nu));
}

RsbNegativityU1 rsb_negativity_u1(const ThermoPoint& p) {
  RsbNegativityU1 out;
  double nb = std::clamp(p.nu_b(), 0.0, 1.0);
  out.exponent = 0.5 * (p.n_a() * shannon_f(p.nu_a) - p.n_b * shannon_f(nb));
  double nub_fac = std::pow(nb * (1.0 - nb), 0.25);
  // prefactor 8/9 (2/pi)^(3/4): the negative-lobe moment of the saddle-point
  // density; Monte Carlo pins it to a couple of percent
  double base = 8.0 / 9.0 * std::pow(2.0 / kPi, 0.75) *
                std::pow(p.n_a1 * p.n_a2 * p.n_b, 0.25) / std::sqrt(p.n_a()) * nub_fac;
  out.n1_half_filling_form = base * std::exp(out.exponent);
  double logterm = std::log(1.0 / p.nu_a - 1.0);
  double corr = std::sqrt(1.0 + 4.0 / 3.0 * (p.n_a1 * p.n_a2 / p.n_a()) * p.nu_a * (1.0 - p.nu_a) *
                                    logterm * logterm);
  out.n1 = out.n1_half_filling_form / corr;
  out.variants_agree = std::abs(out.n1 - out.n1_half_filling_form) <=
                       0.05 * std::max(out.n1, out.n1_half_filling_form);
  out.n2_active = out.exponent > 0.0;
  if (out.n2_active) {
    out.n2 = 4.0 / (3.0 * std::sqrt(3.0) * kPi) * std::pow(2.0 / kPi, 0.25) *
             std::pow(p.n_b / (p.n_a1 * p.n_a2), 0.25) * nub_fac /
             std::sqrt(p.nu_a * (1.0 - p.nu_a)) * std::exp(out.exponent);
  }
  out.regime_ok = classify_phase(p).label != PhaseLabel::kCriticalRegion;
  return out;
}

MaxEntLognegU1 maxent_logneg_u1(const ThermoPoint& p) {
  if (p.nu_a <= 0.0 || p.nu_a >= 1.0) throw std::domain_error("maxent_logneg_u1: boundary filling");
  // printed form assumes N_A1 > N_A2; swap labels otherwise
  double n_big = std::max(p.n_a1, p.n_a2);
  double n_small = std::min(p.n_a1, p.n_a2);
  double r_big = n_big / p.n_a();
  double logfac = std::log((1.0 - p.nu_a) / p.nu_a);
  MaxEntLognegU1 out;
  out.logneg = n_small * shannon_f(p.nu_a) +
               n_big * p.nu_a * (1.0 - p.nu_a) * logfac * logfac / (1.0 + 2.0 * n_big / n_small);
  out.nu1_saddle =
      p.nu_a - (1.0 - r_big) / (1.0 + r_big) * p.nu_a * (1.0 - p.nu_a) * logfac;
  return out;
}

const char* to_string(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::kSuppressed: return "suppressed";
    case PhaseLabel::kReplicaSymmetryBreaking: return "rsb";
    case PhaseLabel::kMaximalEntanglement: return "maxent";
    case PhaseLabel::kCriticalRegion: return "critical";
  }
  return "?";
}

namespace {

struct SideScan {
  bool has_root = false;
  bool all_positive = false;
  bool empty = false;
  double root = 0.0;
};

// criticality balance for the subsystem holding fraction r of A's sites:
// r f(nu1) - (1-r) f(nubar1) = (1/r_A - 1) f(nu_B), with
// nubar1 = (nu_A - r nu1) / (1 - r)
SideScan scan_side(double r, double nu_a, double rhs) {
  SideScan out;
  double lo = std::max(0.0, (nu_a - (1.0 - r)) / r);
  double hi = std::min(0.5, nu_a / r);
  if (!(hi > lo)) {
    out.empty = true;
    return out;
  }
  auto g = [&](double nu1) {
    double nubar = (nu_a - nu1 * r) / (1.0 - r);
    nubar = std::clamp(nubar, 0.0, 1.0);
    return r * shannon_f(nu1) - (1.0 - r) * shannon_f(nubar) - rhs;
  };
  constexpr int kScan = 512;
  double prev = g(lo);
  bool pos = prev > 0.0;
  out.all_positive = pos;
  for (int i = 1; i <= kScan; ++i) {
    double x = lo + (hi - lo) * double(i) / kScan;
    double cur = g(x);
    if (cur <= 0.0) out.all_positive = false;
    if ((prev <= 0.0) != (cur <= 0.0)) {
      double a = lo + (hi - lo) * double(i - 1) / kScan, b = x;
      for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        if ((g(a) <= 0.0) != (g(m) <= 0.0))
          b = m;
        else
          a = m;
        if (b - a < 1e-10) break;
      }
      out.has_root = true;
      out.root = 0.5 * (a + b);
      return out;
    }
    prev = cur;
  }
  return out;
}

}  // namespace

PhaseResult classify_phase(const ThermoPoint& p, double dead_band) {
  PhaseResult out;
  double nb = std::clamp(p.nu_b(), 0.0, 1.0);
  out.diag.f_balance = p.r_a() * shannon_f(p.nu_a) - (1.0 - p.r_a()) * shannon_f(nb);
  if (std::abs(out.diag.f_balance) <= dead_band) {
    out.label = PhaseLabel::kCriticalRegion;
    return out;
  }
  if (out.diag.f_balance < 0.0) {
    out.label = PhaseLabel::kSuppressed;
    return out;
  }
  double rhs = (1.0 / p.r_a() - 1.0) * shannon_f(nb);
  SideScan s1 = scan_side(p.r1(), p.nu_a, rhs);
  SideScan s2 = scan_side(1.0 - p.r1(), p.nu_a, rhs);
  out.diag.root_side1 = s1.has_root;
  out.diag.root_side2 = s2.has_root;
  out.diag.empty_range = s1.empty && s2.empty;
  if (s1.has_root || s2.has_root) {
    out.diag.critical_nu1 = s1.has_root ? s1.root : s2.root;
    out.label = PhaseLabel::kCriticalRegion;
    return out;
  }
  if ((!s1.empty && s1.all_positive) || (!s2.empty && s2.all_positive))
    out.label = PhaseLabel::kMaximalEntanglement;
  else
    out.label = PhaseLabel::kReplicaSymmetryBreaking;
  return out;
}

PhaseDiagramGrid phase_scan(int n_r1, int n_y, double y_min, double y_max, double nu_a, double nu) {
  if (n_r1 < 2 || n_y < 2) throw std::invalid_argument("phase_scan: grid at least 2x2");
  PhaseDiagramGrid out;
  out.n_r1 = n_r1;
  out.n_y = n_y;
  const double n_a = 120.0;  // absolute scale is irrelevant to the labels
  auto nu_b_of = [&](double y) { return nu + (nu - nu_a) / y; };
  for (int i = 0; i < n_r1; ++i) {
    double r1 = (i + 0.5) / double(n_r1);
    // dashed suppression line f(nu_A) = y f(nu_B(y)): bisect on y
    double dashed = std::numeric_limits<double>::quiet_NaN();
    {
      auto h = [&](double y) {
        double nb = nu_b_of(y);
        if (nb < 0.0 || nb > 1.0) return std::numeric_limits<double>::quiet_NaN();
        return shannon_f(nu_a) - y * shannon_f(nb);
      };
      double prev_y = 0.0, prev_h = 0.0;
      bool have_prev = false;
      for (int k = 0; k <= 4096; ++k) {
        double y = 1e-3 + (4.0 * y_max - 1e-3) * double(k) / 4096.0;
        double v = h(y);
        if (!std::isfinite(v)) continue;
        if (have_prev && (prev_h > 0.0) != (v > 0.0)) {
          double a = prev_y, b = y;
          for (int it = 0; it < 100; ++it) {
            double m = 0.5 * (a + b);
            double hm = h(m);
            if ((h(a) > 0.0) != (hm > 0.0))
              b = m;
            else
              a = m;
          }
          dashed = 0.5 * (a + b);
          break;
        }
        prev_y = y;
        prev_h = v;
        have_prev = true;
      }
    }
    for (int j = 0; j < n_y; ++j) {
      double y = y_min + (y_max - y_min) * (j + 0.5) / double(n_y);
      PhaseDiagramCell cell;
      cell.r1 = r1;
      cell.nb_over_na = y;
      cell.dashed_value = dashed;
      cell.red_curve_value = std::abs(2.0 * r1 - 1.0);
      double nb = nu_b_of(y);
      if (nb < 0.0 || nb > 1.0) {
        cell.label = PhaseLabel::kSuppressed;  // infeasible filling: outside diagram
      } else {
        ThermoPoint p(r1 * n_a, (1.0 - r1) * n_a, y * n_a, nu_a, nu);
        cell.label = classify_phase(p).label;
      }
      out.cells.push_back(cell);
    }
  }
  return out;
}

MutualInfo mutual_information_zr(const SymmetrySpec& spec, int n_a1, int n_a2, int n_b) {
  if (!spec.is_zr()) throw std::invalid_argument("mutual_information_zr: Z_R spec required");
  double lnr = std::log(double(spec.R));
  int n_a = n_a1 + n_a2;
  MutualInfo out;
  out.boundary = (n_a == n_b) || (n_a1 == n_b + n_a2 - 1) || (n_a2 == n_b + n_a1 - 1);
  if (n_a <= n_b) {  // the boundary case keeps the small-A value, flagged
    out.regime = 1;
    out.nats = lnr;
  } else if (n_a1 < n_b + n_a2 - 1 && n_a2 < n_b + n_a1 - 1) {
    out.regime = 2;
    out.nats = (n_a - n_b - 1) * lnr;
  } else {
    out.regime = 3;
    out.nats = std::min(n_a1, n_a2) * lnr;
  }
  return out;
}

MutualInfo mutual_information_u1(const ThermoPoint& p) {
  MutualInfo out;
  double nb = std::clamp(p.nu_b(), 0.0, 1.0);
  double prefac = 0.5 * std::log(2.0 * kPi * p.nu_a * (1.0 - p.nu_a));
  double n_a = p.n_a();
  out.boundary = std::abs(n_a - p.n_b) < 1e-9 ||
                 std::abs(p.n_a1 - (p.n_b + p.n_a2)) < 1e-9 ||
                 std::abs(p.n_a2 - (p.n_b + p.n_a1)) < 1e-9;
  if (n_a < p.n_b) {
    out.regime = 1;
    out.nats = -0.5 * std::log(n_a / (p.n_a1 * p.n_a2)) + prefac;
  } else if (p.n_a1 < p.n_b + p.n_a2 && p.n_a2 < p.n_b + p.n_a1) {
    out.regime = 2;
    out.nats = n_a * shannon_f(p.nu_a) - p.n_b * shannon_f(nb) -
               0.5 * std::log(n_a * n_a / (p.n_a1 * p.n_a2 * p.n_b)) + prefac;
  } else {
    out.regime = 3;
    double n_big = std::max(p.n_a1, p.n_a2);
    double n_small = std::min(p.n_a1, p.n_a2);
    out.nats = 2.0 * n_small * shannon_f(p.nu_a) - 0.5 * std::log(n_a / n_big);
  }
  return out;
}

PhaseLabel classify_finite(const SymmetrySpec& spec, int n_a1, int n_a2, int n_b,
                           int total_charge, int q_a) {
  if (q_a < 0) {
    // default to the largest-Born-weight sector
    auto weights = born_weights(spec, n_a1 + n_a2, n_b, total_charge);
    double best = -1.0;
    for (auto& [q, w] : weights)
      if (w > best) {
        best = w;
        q_a = q;
      }
  }
  SectorGeometry geom(spec, n_a1, n_a2, n_b, total_charge, q_a);
  double la = log_sector_dim(spec, n_a1 + n_a2, q_a);
  double lb = log_sector_dim(spec, n_b, geom.q_b());
  if (la < lb) return PhaseLabel::kSuppressed;
  // criticality broadening: sign change of ln L_{A1,q1} - ln(L_{A2,qbar1} L_B)
  // across the populated splits, on either side
  bool crossed = false, all_pos = false;
  for (int side = 0; side < 2; ++side) {
    bool have_prev = false, prev_pos = false, every = true;
    for (const auto& s : enumerate_splits(geom)) {
      double big = side == 0 ? std::log(double(s.dim_a1)) : std::log(double(s.dim_a2));
      double rest = (side == 0 ? std::log(double(s.dim_a2)) : std::log(double(s.dim_a1))) + lb;
      bool pos = big > rest;
      if (have_prev && pos != prev_pos) crossed = true;
      every = every && pos;
      prev_pos = pos;
      have_prev = true;
    }
    all_pos = all_pos || every;
  }
  if (crossed) return PhaseLabel::kCriticalRegion;
  if (all_pos) return PhaseLabel::kMaximalEntanglement;
  return PhaseLabel::kReplicaSymmetryBreaking;
}

}  // namespace symneg
