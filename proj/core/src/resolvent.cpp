// SPDX-License-Identifier: Apache-2.0
#include "symneg/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "symneg/quadrature.hpp"

namespace symneg {

namespace {

constexpr double kPi = std::numbers::pi;

double sqrt_clip(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

struct LogDims {
  double l1, l2, l1bar, l2bar, la, lb, lnr;
};

LogDims log_dims(int q1, int q2, const SectorGeometry& g) {
  LogDims d;
  d.l1 = log_sector_dim(g.spec, g.n_a1, q1);
  d.l2 = log_sector_dim(g.spec, g.n_a2, q2);
  d.l1bar = log_sector_dim(g.spec, g.n_a1, g.spec.canonical(g.qbar(q2)));
  d.l2bar = log_sector_dim(g.spec, g.n_a2, g.spec.canonical(g.qbar(q1)));
  d.la = log_sector_dim(g.spec, g.n_a(), g.q_a);
  d.lb = log_sector_dim(g.spec, g.n_b, g.q_b());
  d.lnr = std::log(double(g.spec.R));
  if (!std::isfinite(d.l1) || !std::isfinite(d.l2) || !std::isfinite(d.la) || !std::isfinite(d.lb))
    throw std::invalid_argument("resolvent: empty charge sector");
  return d;
}

bool rsb_ok(const LogDims& d) {
  const double ln2 = std::log(2.0);
  return d.l1 + ln2 <= d.l2bar + d.lb && d.l2bar + ln2 <= d.l1 + d.lb;
}

}  // namespace

double SpectralModel::integral(double abs_tol) const {
  double out = 0.0;
  for (const auto& iv : support)
    out += integrate_with_edge_substitution(density, iv.lo, iv.hi, abs_tol);
  return out;
}

double SpectralModel::first_moment(double abs_tol) const {
  double out = 0.0;
  auto f = [this](double x) { return x * density(x); };
  for (const auto& iv : support) out += integrate_with_edge_substitution(f, iv.lo, iv.hi, abs_tol);
  return out;
}

double SpectralModel::negativity(double abs_tol) const {
  double out = 0.0;
  auto f = [this](double x) { return -x * density(x); };
  for (const auto& iv : support) {
    if (iv.lo >= 0.0) continue;
    double hi = std::min(iv.hi, 0.0);
    out += integrate_with_edge_substitution(f, iv.lo, hi, abs_tol);
  }
  return out;
}

SpectralModel semicircle_p2(int q1, const SectorGeometry& geom) {
  int q2 = geom.qbar(q1);
  LogDims d = log_dims(q1, q2, geom);
  double log_alpha = d.l1 + d.l2bar - d.la - d.lb;  // alpha_{q1 qbar1}
  double center = std::exp(-d.la);
  double radius = 2.0 * std::exp(0.5 * (log_alpha - d.la));
  double pref = std::exp(2.0 * d.la + d.lb) / (2.0 * kPi);
  SpectralModel m;
  m.label = "P2(q1=" + std::to_string(q1) + ")";
  m.component = SpectralComponent::kP2;
  m.support = {{center - radius, center + radius}};
  m.density = [pref, center, radius](double xi) {
    double dx = xi - center;
    return pref * sqrt_clip(radius * radius - dx * dx);
  };
  m.normalization = std::exp(d.l1 + d.l2bar);
  m.expected_first_moment = std::exp(d.l1 + d.l2bar - d.la);
  m.regime_ok = rsb_ok(d);
  return m;
}

SpectralModel semicircle_p1(int q1, int q2, const SectorGeometry& geom) {
  if (geom.spec.canonical(q2) == geom.spec.canonical(geom.qbar(q1)))
    throw std::invalid_argument("semicircle_p1: (q1, q2) is a charge-diagonal sector");
  LogDims d = log_dims(q1, q2, geom);
  if (!std::isfinite(d.l1bar) || !std::isfinite(d.l2bar))
    throw std::invalid_argument("semicircle_p1: empty partner sector");
  double a = std::exp(d.l1 + d.l2 - d.la - d.lb);
  double abar = std::exp(d.l1bar + d.l2bar - d.la - d.lb);
  double sqrt_la = std::exp(0.5 * d.la);
  double lo = std::abs(std::sqrt(a) - std::sqrt(abar)) / sqrt_la;
  double hi = (std::sqrt(a) + std::sqrt(abar)) / sqrt_la;
  double pref = std::exp(2.0 * d.la + d.lb) / (2.0 * kPi);
  double la_lin = std::exp(d.la);
  bool gapless = lo <= 1e-12 * hi;
  SpectralModel m;
  m.label = "P1(q1=" + std::to_string(q1) + ",q2=" + std::to_string(q2) + ")";
  m.component = SpectralComponent::kP1;
  if (gapless)
    m.support = {{-hi, hi}};
  else
    m.support = {{-hi, -lo}, {lo, hi}};
  m.density = [pref, a, abar, la_lin, hi, gapless](double xi) {
    double ax = std::abs(xi);
    if (ax < 1e-13 * hi) {
      if (!gapless) return 0.0;
      return pref * 2.0 * std::sqrt(a / la_lin);  // xi -> 0 limit at a = abar
    }
    double t = xi * xi - (a + abar) / la_lin;
    return pref / ax * sqrt_clip(4.0 * a * abar / (la_lin * la_lin) - t * t);
  };
  m.normalization = std::min(std::exp(d.l1 + d.l2), std::exp(d.l1bar + d.l2bar));
  m.expected_first_moment = 0.0;
  const double ln2 = std::log(2.0);
  m.regime_ok = d.l1 + ln2 <= d.l2 + d.lb && d.l2 + ln2 <= d.l1 + d.lb &&
                d.l1bar + ln2 <= d.l2bar + d.lb && d.l2bar + ln2 <= d.l1bar + d.lb;
  return m;
}

SpectralModel zr_semicircle_density(const SectorGeometry& geom) {
  if (!geom.spec.is_zr()) throw std::invalid_argument("zr_semicircle_density: Z_R spec required");
  double lnr = std::log(double(geom.spec.R));
  double R = double(geom.spec.R);
  int n_a = geom.n_a(), n = geom.n_total();
  double radius = 2.0 * std::exp(-0.5 * (n - 1) * lnr);
  double center = std::exp(-(n_a - 1) * lnr);
  double pref = std::exp((2 * n_a + geom.n_b - 2) * lnr) / (2.0 * kPi);
  SpectralModel m;
  m.label = "ZR total";
  m.component = SpectralComponent::kTotal;
  if (center - radius <= radius)
    m.support = {{-radius, center + radius}};
  else
    m.support = {{-radius, radius}, {center - radius, center + radius}};
  m.density = [pref, center, radius, R](double xi) {
    double dc = xi - center;
    return pref * ((R - 1.0) * sqrt_clip(radius * radius - xi * xi) +
                   sqrt_clip(radius * radius - dc * dc));
  };
  m.normalization = std::exp(n_a * lnr);
  m.expected_first_moment = 1.0;
  LogDims d = log_dims(0, geom.qbar(0), geom);
  m.regime_ok = rsb_ok(d);
  return m;
}

ZrNegativity zr_closed_negativity(const SectorGeometry& geom) {
  if (!geom.spec.is_zr()) throw std::invalid_argument("zr_closed_negativity: Z_R spec required");
  double R = double(geom.spec.R);
  double lnr = std::log(R);
  double t = (geom.n_a() - geom.n_b - 1) * lnr;  // ln R^(N_A - N_B - 1)
  ZrNegativity out;
  // residual term: exact negative-lobe moment of the zero-centered
  // semicircle, N1 = int_{xi<0} (-xi) P1 = (4/3pi)(R-1) R^((N_A-N_B-1)/2)
  out.n1 = 4.0 / (3.0 * kPi) * (R - 1.0) * std::exp(0.5 * t);
  double x = std::exp(t);
  if (x > 0.25) {
    double root = std::sqrt(std::max(0.0, 1.0 - 0.25 / x));
    out.n2 = 1.0 / (2.0 * kPi) *
                 (8.0 / 3.0 * std::exp(0.5 * t) + 1.0 / 3.0 * std::exp(-0.5 * t)) * root -
             1.0 / kPi * std::acos(std::clamp(0.5 * std::exp(-0.5 * t), -1.0, 1.0));
    out.logneg2 =
        std::log2(8.0 * R / (3.0 * kPi)) + 0.5 * (geom.n_a() - geom.n_b - 1) * std::log2(R);
  } else {
    out.n2 = 0.0;
    out.logneg2 = 8.0 / (3.0 * kPi) * (R - 1.0) * std::exp(0.5 * t) / std::log(2.0);
  }
  return out;
}

CubicCoefficients sd_cubic_g2(int q1, const SectorGeometry& geom, double xi) {
  LogDims d = log_dims(q1, geom.qbar(q1), geom);
  double a = std::exp(d.l1 + d.l2bar - d.la - d.lb);  // alpha_{q1 qbar1}
  double b = std::exp(d.l1 - d.la - d.lb);            // beta_{q1}
  CubicCoefficients c;
  c.c3 = xi * b * b;
  c.c2 = a * std::exp(-d.la) - b * b;
  c.c1 = std::exp(-d.la) - xi;
  c.c0 = 1.0;
  c.provenance = CubicKind::kG2General;
  return c;
}

CubicCoefficients sd_cubic_g1(int q1, int q2, const SectorGeometry& geom, double xi) {
  LogDims d = log_dims(q1, q2, geom);
  if (!std::isfinite(d.l1bar) || !std::isfinite(d.l2bar))
    throw std::invalid_argument("sd_cubic_g1: empty partner sector");
  double a = std::exp(d.l1 + d.l2 - d.la - d.lb);
  double abar = std::exp(d.l1bar + d.l2bar - d.la - d.lb);
  double bb = std::exp(d.l1 - d.la - d.lb) * std::exp(d.l1bar - d.la - d.lb);  // beta_q1 beta_qbar2
  double inv_la = std::exp(-d.la);
  CubicCoefficients c;
  c.c3 = -xi * xi * a * bb;
  c.c2 = -xi * (a * (abar * inv_la - 2.0 * bb) + abar * bb);
  c.c1 = xi * xi * abar + (a - abar) * (abar * inv_la - bb);
  c.c0 = -xi * abar;
  c.provenance = CubicKind::kG1General;
  return c;
}

CubicCoefficients sd_cubic_zr(const SectorGeometry& geom, double xi, ZrCubic which) {
  if (!geom.spec.is_zr()) throw std::invalid_argument("sd_cubic_zr: Z_R spec required");
  double lnr = std::log(double(geom.spec.R));
  double beta2 = std::exp(-2.0 * (geom.n_a2 + geom.n_b - 1) * lnr);
  double alpha_over_la = std::exp(-(geom.n_total() - 1) * lnr);
  CubicCoefficients c;
  c.c3 = xi * beta2;
  c.c2 = alpha_over_la - beta2;
  c.c0 = 1.0;
  if (which == ZrCubic::kG1) {
    c.c1 = -xi;
    c.provenance = CubicKind::kZrG1;
  } else {
    c.c1 = std::exp(-(geom.n_a() - 1) * lnr) - xi;
    c.provenance = CubicKind::kZrG2;
  }
  return c;
}

std::complex<double> resolvent_from_cubic(const CubicCoefficients& coeffs) {
  CubicRoots r = solve_cubic(coeffs.c3, coeffs.c2, coeffs.c1, coeffs.c0);
  if (r.has_complex_pair) {
    for (int i = 0; i < r.count; ++i)
      if (r.root[i].imag() < 0.0) return r.root[i];
  }
  // all real: zero spectral weight; return the smallest-magnitude root
  std::complex<double> best = r.root[0];
  for (int i = 1; i < r.count; ++i)
    if (std::abs(r.root[i]) < std::abs(best)) best = r.root[i];
  return {best.real(), 0.0};
}

namespace {

double rule_density(const std::function<CubicCoefficients(double)>& coeffs, double weight,
                    double xi) {
  CubicCoefficients c = coeffs(xi);
  CubicRoots r = solve_cubic(c.c3, c.c2, c.c1, c.c0);
  if (!r.has_complex_pair) return 0.0;
  for (int i = 0; i < r.count; ++i)
    if (r.root[i].imag() < 0.0) return weight / kPi * (-r.root[i].imag());
  return 0.0;
}

}  // namespace

SpectralModel density_from_cubic(const std::function<CubicCoefficients(double)>& coeffs,
                                 const std::vector<double>& grid, double weight,
                                 const std::string& label, SpectralComponent component) {
  if (grid.size() < 2) throw std::invalid_argument("density_from_cubic: grid too small");
  SpectralModel m;
  m.label = label;
  m.component = component;
  m.density = [coeffs, weight](double xi) { return rule_density(coeffs, weight, xi); };

  // support bracketing on the grid, then bisection refinement of every edge
  std::vector<bool> alive(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) alive[i] = m.density(grid[i]) > 0.0;
  auto refine = [&](double dead, double live) {
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (dead + live);
      if (m.density(mid) > 0.0)
        live = mid;
      else
        dead = mid;
      if (std::abs(live - dead) < 1e-14 * (1.0 + std::abs(live))) break;
    }
    return live;
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!alive[i]) continue;
    std::size_t j = i;
    while (j + 1 < grid.size() && alive[j + 1]) ++j;
    double lo = i > 0 ? refine(grid[i - 1], grid[i]) : grid[i];
    double hi = j + 1 < grid.size() ? refine(grid[j + 1], grid[j]) : grid[j];
    m.support.push_back({lo, hi});
    i = j + 1;
  }

  // secondary continuation pass from |xi| -> inf where G ~ 1/xi; flag grid
  // intervals where nearest-root tracking disagrees with the pair rule
  auto track = [&](std::size_t begin, std::size_t end, std::int64_t step) {
    std::complex<double> prev(1.0 / grid[begin], -1e-300);
    for (std::size_t i = begin;; i += step) {
      CubicCoefficients c = coeffs(grid[i]);
      CubicRoots r = solve_cubic(c.c3, c.c2, c.c1, c.c0);
      if (r.count > 0) {
        std::complex<double> best = r.root[0];
        for (int k = 1; k < r.count; ++k)
          if (std::abs(r.root[k] - prev) < std::abs(best - prev)) best = r.root[k];
        // conjugate ambiguity is harmless: compare |Im|
        double tracked = weight / kPi * std::abs(best.imag());
        double ruled = m.density(grid[i]);
        double scale = std::max({tracked, ruled, 1e-300});
        if (std::abs(tracked - ruled) > 1e-6 * scale && std::abs(tracked - ruled) > 1e-12) {
          std::size_t a = i > 0 ? i - 1 : 0;
          std::size_t b = std::min(i + 1, grid.size() - 1);
          m.flagged.push_back({grid[a], grid[b]});
        }
        prev = best;
      }
      if (i == end) break;
    }
  };
  std::size_t zero_idx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i]) < std::abs(grid[zero_idx])) zero_idx = i;
  track(grid.size() - 1, zero_idx, -1);
  track(0, zero_idx, 1);
  m.normalization = 0.0;  // caller fills when known
  return m;
}

std::vector<double> symmetric_grid(double span, int n) {
  if (n < 2) throw std::invalid_argument("symmetric_grid: n >= 2 required");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = -span + 2.0 * span * double(i) / double(n - 1);
  return g;
}

double support_bracket(const SectorGeometry& geom) {
  // |xi| <= ||rho^{T2}||_F = ||rho||_F, and <Tr rho^2> = 1/L_{q_A} + 1/L_{q_B};
  // the partial transpose permutes matrix entries so the Frobenius norm is
  // exact. Factor 2 absorbs sample fluctuations and the finite edge widths.
  double la = log_sector_dim(geom.spec, geom.n_a(), geom.q_a);
  double lb = log_sector_dim(geom.spec, geom.n_b, geom.q_b());
  double frob = std::sqrt(std::exp(-la) + std::exp(-lb));
  // semicircle-regime refinement so RSB grids stay well resolved
  double sc = std::exp(-la);
  for (const auto& s : enumerate_splits(geom)) {
    for (const auto& t : enumerate_splits(geom)) {
      double a = alpha(s.q1, t.q2, geom);
      sc = std::max(sc, std::exp(-la) + 4.0 * std::sqrt(a * std::exp(-la)));
    }
  }
  return 2.0 * std::max(frob, sc);
}

SpectralModel cubic_density_p2(int q1, const SectorGeometry& geom, int grid_points) {
  auto grid = symmetric_grid(support_bracket(geom), grid_points);
  auto fn = [q1, geom](double xi) { return sd_cubic_g2(q1, geom, xi); };
  LogDims d = log_dims(q1, geom.qbar(q1), geom);
  double weight = std::exp(d.l1 + d.l2bar);
  auto m = density_from_cubic(fn, grid, weight, "P2(q1=" + std::to_string(q1) + ") cubic",
                              SpectralComponent::kP2);
  m.normalization = weight;
  m.expected_first_moment = std::exp(d.l1 + d.l2bar - d.la);
  return m;
}

SpectralModel cubic_density_p1(int q1, int q2, const SectorGeometry& geom, int grid_points) {
  if (geom.spec.canonical(q2) == geom.spec.canonical(geom.qbar(q1)))
    throw std::invalid_argument("cubic_density_p1: (q1, q2) is a charge-diagonal sector");
  auto grid = symmetric_grid(support_bracket(geom), grid_points);
  auto fn = [q1, q2, geom](double xi) { return sd_cubic_g1(q1, q2, geom, xi); };
  LogDims d = log_dims(q1, q2, geom);
  double weight = std::exp(d.l1 + d.l2);
  auto m = density_from_cubic(
      fn, grid, weight, "P1(q1=" + std::to_string(q1) + ",q2=" + std::to_string(q2) + ") cubic",
      SpectralComponent::kP1);
  m.normalization = std::min(weight, std::exp(d.l1bar + d.l2bar));
  m.expected_first_moment = 0.0;
  return m;
}

SpectralModel zr_cubic_density(const SectorGeometry& geom, ZrCubic which, int grid_points) {
  if (!geom.spec.is_zr()) throw std::invalid_argument("zr_cubic_density: Z_R spec required");
  auto grid = symmetric_grid(support_bracket(geom), grid_points);
  auto fn = [geom, which](double xi) { return sd_cubic_zr(geom, xi, which); };
  double lnr = std::log(double(geom.spec.R));
  double R = double(geom.spec.R);
  double weight = which == ZrCubic::kG1 ? std::exp(geom.n_a() * lnr) * (1.0 - 1.0 / R)
                                        : std::exp((geom.n_a() - 1) * lnr);
  auto m = density_from_cubic(fn, grid, weight,
                              which == ZrCubic::kG1 ? "ZR G1 cubic" : "ZR G2 cubic",
                              which == ZrCubic::kG1 ? SpectralComponent::kP1
                                                    : SpectralComponent::kP2);
  m.normalization = weight;
  m.expected_first_moment = which == ZrCubic::kG1 ? 0.0 : 1.0;
  return m;
}

CriticalityFlags criticality_flags(int q1, int q2, const SectorGeometry& geom) {
  using u128 = unsigned __int128;
  std::int64_t d1 = geom.dim_a1(q1);
  std::int64_t d2 = geom.dim_a2(q2);
  std::int64_t d1bar = geom.dim_a1(geom.qbar(q2));
  std::int64_t d2bar = geom.dim_a2(geom.qbar(q1));
  std::int64_t lb = geom.dim_b();
  // the spectrum does not care which subsystem carries the transpose, so the
  // printed conditions are checked in both orientations
  CriticalityFlags out;
  out.g2_critical = d2bar > 0 && (u128(d1) == u128(d2bar) * u128(lb) ||
                                  u128(d2bar) == u128(d1) * u128(lb));
  out.g1_critical = d2 > 0 && d1bar > 0 && d2bar > 0 &&
                    u128(d1) * u128(d2) == u128(d1bar) * u128(d2bar) &&
                    (u128(d1) == u128(d2) * u128(lb) || u128(d2) == u128(d1) * u128(lb));
  return out;
}

MaxEntClosedForms max_ent_closed_forms(int q1, int q2, const SectorGeometry& geom) {
  LogDims d = log_dims(q1, q2, geom);
  MaxEntClosedForms out;
  out.n1 = 0.5 * std::exp(0.5 * (d.l1 + d.l1bar) + d.l2 + d.l2bar - d.la);
  out.n2 = 0.5 * std::exp(d.l1 + 2.0 * d.l2bar - d.la);
  out.zr_total = geom.spec.is_zr() ? 0.5 * std::exp(geom.n_a2 * d.lnr)
                                   : std::numeric_limits<double>::quiet_NaN();
  const double ln2 = std::log(2.0);
  out.regime_ok = d.l1 >= d.l2bar + d.lb + ln2;
  return out;
}

double rsb_plateau_n2(int q1, const SectorGeometry& geom) {
  LogDims d = log_dims(q1, geom.qbar(q1), geom);
  return 4.0 / (3.0 * kPi) * std::exp(1.5 * (d.l1 + d.l2bar) - d.la - 0.5 * d.lb);
}

double zr_maxent_im_g(const SectorGeometry& geom, double z) {
  if (!geom.spec.is_zr()) throw std::invalid_argument("zr_maxent_im_g: Z_R spec required");
  double g = gamma_zr(geom);
  double s = std::exp(geom.n_a1 * std::log(double(geom.spec.R)));
  double w = s * z + 1.0 / g;
  return s * g * g / 2.0 * sqrt_clip(2.0 / g - w * w);
}

SpectralModel unprojected_zr_density(const SectorGeometry& geom) {
  if (!geom.spec.is_zr()) throw std::invalid_argument("unprojected_zr_density: Z_R spec required");
  double lnr = std::log(double(geom.spec.R));
  int n_a = geom.n_a(), n = geom.n_total();
  double center = std::exp(-n_a * lnr);
  double radius = 2.0 * std::exp(-0.5 * n * lnr);
  double pref = std::exp((2 * n_a + geom.n_b) * lnr) / (2.0 * kPi);
  SpectralModel m;
  m.label = "ZR unprojected";
  m.component = SpectralComponent::kTotal;
  m.support = {{center - radius, center + radius}};
  m.density = [pref, center, radius](double xi) {
    double dx = xi - center;
    return pref * sqrt_clip(radius * radius - dx * dx);
  };
  m.normalization = std::exp(n_a * lnr);
  m.expected_first_moment = 1.0;
  return m;
}

FixedPointResult unprojected_fixed_point(const SectorGeometry& geom,
                                         const std::vector<double>& grid,
                                         const FixedPointOptions& opts) {
  if (grid.size() < 2) throw std::invalid_argument("unprojected_fixed_point: grid too small");
  using cd = std::complex<double>;
  const SymmetrySpec& spec = geom.spec;
  int hi1 = spec.is_zr() ? spec.R - 1 : geom.n_a1;
  int hi2 = spec.is_zr() ? spec.R - 1 : geom.n_a2;
  int Q = geom.total_charge;

  struct Sector {
    int q1, q2;
    double log_dim;
  };
  std::vector<Sector> sectors;
  std::vector<std::vector<int>> index(hi1 + 1, std::vector<int>(hi2 + 1, -1));
  for (int q1 = 0; q1 <= hi1; ++q1)
    for (int q2 = 0; q2 <= hi2; ++q2) {
      double ld = log_sector_dim(spec, geom.n_a1, q1) + log_sector_dim(spec, geom.n_a2, q2);
      if (std::isfinite(ld)) {
        index[q1][q2] = int(sectors.size());
        sectors.push_back({q1, q2, ld});
      }
    }

  // ln of Lambda = sum_qA L_{qA} L_{qB}
  double log_lambda;
  {
    int qa_hi = spec.is_zr() ? spec.R - 1 : geom.n_a();
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (int qa = 0; qa <= qa_hi; ++qa) {
      double t = log_sector_dim(spec, geom.n_a(), qa) +
                 log_sector_dim(spec, geom.n_b, spec.sub(Q, qa));
      if (std::isfinite(t)) {
        terms.push_back(t);
        mx = std::max(mx, t);
      }
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - mx);
    log_lambda = mx + std::log(s);
  }

  // static couplings
  int ns = int(sectors.size());
  std::vector<double> direct(ns, 0.0);     // L_{B,Q-q1-q2} / Lambda
  std::vector<double> self_sq(ns, 0.0);    // (L_{A1,q1}/Lambda)^2
  struct Coupling {
    int partner;
    double weight;  // L_{B,qB} L_{A2,..} L_{A1,..} / Lambda^2
    double denom;   // L_{A1,q1} L_{A1,..} / Lambda^2
  };
  std::vector<std::vector<Coupling>> couplings(ns);
  int qb_hi = spec.is_zr() ? spec.R - 1 : geom.n_b;
  for (int s = 0; s < ns; ++s) {
    int q1 = sectors[s].q1, q2 = sectors[s].q2;
    double ld_b = log_sector_dim(spec, geom.n_b, spec.sub(Q, spec.add(q1, q2)));
    if (std::isfinite(ld_b)) direct[s] = std::exp(ld_b - log_lambda);
    double l1 = log_sector_dim(spec, geom.n_a1, q1);
    self_sq[s] = std::exp(2.0 * (l1 - log_lambda));
    for (int qb = 0; qb <= qb_hi; ++qb) {
      double lb = log_sector_dim(spec, geom.n_b, qb);
      if (!std::isfinite(lb)) continue;
      int a2p = spec.is_zr() ? spec.canonical(Q - q1 - qb) : Q - q1 - qb;
      int a1p = spec.is_zr() ? spec.canonical(Q - q2 - qb) : Q - q2 - qb;
      if (!spec.is_zr() && (a2p < 0 || a2p > geom.n_a2 || a1p < 0 || a1p > geom.n_a1)) continue;
      double l2p = log_sector_dim(spec, geom.n_a2, a2p);
      double l1p = log_sector_dim(spec, geom.n_a1, a1p);
      if (!std::isfinite(l2p) || !std::isfinite(l1p)) continue;
      int p = index[a1p][a2p];
      if (p < 0) continue;
      couplings[s].push_back(
          {p, std::exp(lb + l2p + l1p - 2.0 * log_lambda), std::exp(l1 + l1p - 2.0 * log_lambda)});
    }
  }

  double span = 0.5 * (grid.back() - grid.front());
  double eps_target = opts.epsilon_rel * span;

  FixedPointResult out;
  out.grid = grid;
  out.total_density.assign(grid.size(), 0.0);
  std::vector<std::vector<double>> sector_density(ns, std::vector<double>(grid.size(), 0.0));
  std::vector<cd> g(ns);
  bool warm = false;

  auto iterate_at = [&](cd z, std::vector<cd>& state, int max_iter,
                        std::vector<double>* hist) -> bool {
    for (int it = 0; it < max_iter; ++it) {
      double res = 0.0;
      std::vector<cd> gn(ns);
      for (int s = 0; s < ns; ++s) {
        cd sg = state[s];
        cd sigma = direct[s] / (1.0 - self_sq[s] * sg * sg);
        for (const auto& cpl : couplings[s])
          sigma += cpl.weight * state[cpl.partner] / (1.0 - cpl.denom * sg * state[cpl.partner]);
        gn[s] = 1.0 / (z - sigma);
      }
      double scale = 1e-300;
      for (int s = 0; s < ns; ++s) {
        cd mixed = (1.0 - opts.damping) * state[s] + opts.damping * gn[s];
        res = std::max(res, std::abs(mixed - state[s]));
        state[s] = mixed;
        scale = std::max(scale, std::abs(state[s]));
      }
      if (hist) hist->push_back(res / scale);
      if (res / scale < opts.tol) return true;
    }
    return false;
  };

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    if (!warm) {
      for (int s = 0; s < ns; ++s) g[s] = cd(0.0, -1.0) / std::max(std::abs(grid[gi]), span);
      warm = true;
    }
    std::vector<double> residuals;
    bool ok = iterate_at(cd(grid[gi], eps_target), g, opts.max_iter / 4, &residuals);
    if (!ok) {
      // epsilon continuation: reconverge from a strongly broadened point and
      // walk the imaginary offset down to the target
      for (int s = 0; s < ns; ++s) g[s] = cd(0.0, -1.0) / span;
      double eps = 0.05 * span;
      while (eps > eps_target) {
        iterate_at(cd(grid[gi], eps), g, opts.max_iter / 8, nullptr);
        eps *= 0.3;
      }
      residuals.clear();
      ok = iterate_at(cd(grid[gi], eps_target), g, opts.max_iter, &residuals);
    }
    int used = int(residuals.size());
    if (!ok) {
      out.converged = false;
      out.worst_iterations = opts.max_iter;
      out.residual_history = residuals;
    } else if (used > out.worst_iterations && out.converged) {
      out.worst_iterations = used;
      out.residual_history = residuals;
    }
    for (int s = 0; s < ns; ++s) {
      double dens = -std::exp(sectors[s].log_dim) * g[s].imag() / kPi;
      sector_density[s][gi] = std::max(0.0, dens);
      out.total_density[gi] += sector_density[s][gi];
    }
  }

  // aggregate by charge imbalance dq = q1 - q2
  std::map<int, std::vector<double>> by_dq;
  for (int s = 0; s < ns; ++s) {
    int dq = spec.is_zr() ? spec.sub(sectors[s].q1, sectors[s].q2) : sectors[s].q1 - sectors[s].q2;
    auto& acc = by_dq[dq];
    if (acc.empty()) acc.assign(grid.size(), 0.0);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) acc[gi] += sector_density[s][gi];
  }
  for (auto& [dq, dens] : by_dq) out.dq_components.emplace_back(dq, std::move(dens));

  // piecewise-linear total model
  auto grid_copy = grid;
  auto dens_copy = out.total_density;
  SpectralModel m;
  m.label = "unprojected fixed point";
  m.component = SpectralComponent::kTotal;
  m.density = [grid_copy, dens_copy](double xi) {
    auto it = std::lower_bound(grid_copy.begin(), grid_copy.end(), xi);
    if (it == grid_copy.begin() || it == grid_copy.end()) return 0.0;
    std::size_t i = std::size_t(it - grid_copy.begin());
    double t = (xi - grid_copy[i - 1]) / (grid_copy[i] - grid_copy[i - 1]);
    return (1.0 - t) * dens_copy[i - 1] + t * dens_copy[i];
  };
  double floor = 0.0;
  for (double v : out.total_density) floor = std::max(floor, v);
  floor *= 1e-8;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (out.total_density[i] <= floor) continue;
    std::size_t j = i;
    while (j + 1 < grid.size() && out.total_density[j + 1] > floor) ++j;
    m.support.push_back({grid[i], grid[j]});
    i = j + 1;
  }
  double total_dim = 0.0;
  for (const auto& s : sectors) total_dim += std::exp(s.log_dim);
  m.normalization = total_dim;
  m.expected_first_moment = 1.0;
  out.total = std::move(m);
  return out;
}

}  // namespace symneg
