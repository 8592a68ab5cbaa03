// SPDX-License-Identifier: Apache-2.0
#include "symneg/symmetry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace symneg {

SymmetrySpec SymmetrySpec::zr(int R) {
  if (R < 2) throw std::invalid_argument("Z_R requires R >= 2");
  return SymmetrySpec{GroupKind::ZR, R};
}

SymmetrySpec SymmetrySpec::u1() { return SymmetrySpec{GroupKind::U1, 2}; }

int SymmetrySpec::canonical(int q) const {
  if (kind == GroupKind::U1) return q;
  int m = q % R;
  return m < 0 ? m + R : m;
}

int SymmetrySpec::add(int a, int b) const { return canonical(a + b); }

int SymmetrySpec::sub(int a, int b) const { return canonical(a - b); }

std::string SymmetrySpec::name() const {
  if (kind == GroupKind::U1) return "U1";
  return "Z" + std::to_string(R);
}

namespace {

std::int64_t checked_ipow(std::int64_t base, int exp) {
  std::int64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > std::numeric_limits<std::int64_t>::max() / base)
      throw std::overflow_error("sector dimension exceeds int64 range");
    out *= base;
  }
  return out;
}

std::int64_t binomial_checked(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 out = 1;  // wide intermediates: prefixes stay exact
  for (int i = 1; i <= k; ++i) {
    out = out * unsigned(n - k + i) / unsigned(i);
    if (out > (unsigned __int128)(std::numeric_limits<std::int64_t>::max()))
      throw std::overflow_error("binomial coefficient exceeds int64 range");
  }
  return std::int64_t(out);
}

}  // namespace

std::int64_t sector_dim(const SymmetrySpec& spec, int n_sites, int q) {
  if (n_sites < 0) throw std::invalid_argument("negative site count");
  if (spec.kind == GroupKind::ZR) {
    if (n_sites == 0) return spec.canonical(q) == 0 ? 1 : 0;
    return checked_ipow(spec.R, n_sites - 1);
  }
  return binomial_checked(n_sites, q);
}

double log_sector_dim(const SymmetrySpec& spec, int n_sites, int q) {
  if (n_sites < 0) throw std::invalid_argument("negative site count");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (spec.kind == GroupKind::ZR) {
    if (n_sites == 0) return spec.canonical(q) == 0 ? 0.0 : kNegInf;
    return (n_sites - 1) * std::log(double(spec.R));
  }
  if (q < 0 || q > n_sites) return kNegInf;
  return std::lgamma(n_sites + 1.0) - std::lgamma(q + 1.0) - std::lgamma(n_sites - q + 1.0);
}

SectorGeometry::SectorGeometry(SymmetrySpec spec_, int n_a1_, int n_a2_, int n_b_,
                               int total_charge_, int q_a_)
    : spec(spec_), n_a1(n_a1_), n_a2(n_a2_), n_b(n_b_) {
  if (n_a1 < 0 || n_a2 < 0 || n_b < 0) throw std::invalid_argument("negative site count");
  total_charge = spec.canonical(total_charge_);
  q_a = spec.canonical(q_a_);
  if (spec.kind == GroupKind::U1) {
    if (q_a < 0 || q_a > n_a()) throw std::invalid_argument("U1 charge q_A outside [0, N_A]");
    int qb = total_charge - q_a;
    if (qb < 0 || qb > n_b) throw std::invalid_argument("U1 charge q_B outside [0, N_B]");
  }
  if (dim_b() <= 0) throw std::invalid_argument("empty complementary sector L_{q_B}");
}

std::vector<SectorSplit> enumerate_splits(const SectorGeometry& geom) {
  std::vector<SectorSplit> out;
  int q1_lo = 0;
  int q1_hi = geom.spec.is_zr() ? geom.spec.R - 1 : geom.n_a1;
  for (int q1 = q1_lo; q1 <= q1_hi; ++q1) {
    int q2 = geom.qbar(q1);
    std::int64_t d1 = geom.dim_a1(q1);
    std::int64_t d2 = geom.dim_a2(q2);
    if (d1 > 0 && d2 > 0) out.push_back({q1, q2, d1, d2});
  }
  return out;
}

double alpha(int q1, int q2, const SectorGeometry& geom) {
  double l1 = log_sector_dim(geom.spec, geom.n_a1, q1);
  double l2 = log_sector_dim(geom.spec, geom.n_a2, q2);
  double la = log_sector_dim(geom.spec, geom.n_a(), geom.q_a);
  double lb = log_sector_dim(geom.spec, geom.n_b, geom.q_b());
  if (!std::isfinite(l1) || !std::isfinite(l2) || !std::isfinite(la) || !std::isfinite(lb))
    throw std::invalid_argument("alpha: empty charge sector");
  return std::exp(l1 + l2 - la - lb);
}

double beta(int q1, const SectorGeometry& geom) {
  double l1 = log_sector_dim(geom.spec, geom.n_a1, q1);
  double la = log_sector_dim(geom.spec, geom.n_a(), geom.q_a);
  double lb = log_sector_dim(geom.spec, geom.n_b, geom.q_b());
  if (!std::isfinite(l1) || !std::isfinite(la) || !std::isfinite(lb))
    throw std::invalid_argument("beta: empty charge sector");
  return std::exp(l1 - la - lb);
}

double gamma_zr(const SectorGeometry& geom) {
  if (!geom.spec.is_zr()) throw std::invalid_argument("gamma is defined for Z_R only");
  return std::exp((-geom.n_a1 + geom.n_a2 + geom.n_b - 1) * std::log(double(geom.spec.R)));
}

double shannon_f(double nu) {
  if (nu < 0.0 || nu > 1.0) throw std::domain_error("filling outside [0,1]");
  if (nu == 0.0 || nu == 1.0) return 0.0;
  return -nu * std::log(nu) - (1.0 - nu) * std::log(1.0 - nu);
}

std::map<int, double> born_weights(const SymmetrySpec& spec, int n_a, int n_b, int total_charge) {
  int Q = spec.canonical(total_charge);
  int lo = 0;
  int hi = spec.is_zr() ? spec.R - 1 : n_a;
  std::map<int, double> logs;
  double log_max = -std::numeric_limits<double>::infinity();
  for (int q = lo; q <= hi; ++q) {
    double l = log_sector_dim(spec, n_a, q) + log_sector_dim(spec, n_b, spec.sub(Q, q));
    if (std::isfinite(l)) {
      logs[q] = l;
      log_max = std::max(log_max, l);
    }
  }
  if (logs.empty()) throw std::invalid_argument("born_weights: all sectors empty");
  double z = 0.0;
  for (auto& [q, l] : logs) z += std::exp(l - log_max);
  std::map<int, double> out;
  for (auto& [q, l] : logs) out[q] = std::exp(l - log_max) / z;
  return out;
}

std::vector<int> nonempty_sectors(const SymmetrySpec& spec, int n_a, int n_b, int total_charge) {
  std::vector<int> out;
  for (auto& [q, w] : born_weights(spec, n_a, n_b, total_charge))
    if (w > 0.0) out.push_back(q);
  return out;
}

}  // namespace symneg
