// SPDX-License-Identifier: Apache-2.0
#include "symneg/circuits.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace symneg {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t out = 1;
  while (e-- > 0) {
    if (out > (std::int64_t(1) << 62) / b) throw std::overflow_error("statevector too large");
    out *= b;
  }
  return out;
}

std::int64_t stride_of(const StateVector& psi, int site) {
  std::int64_t s = 1;
  for (int i = 0; i < site; ++i) s *= psi.r;
  return s;
}

}  // namespace

StateVector StateVector::zero_state(int r, int n_sites) {
  StateVector psi;
  psi.r = r;
  psi.n_sites = n_sites;
  std::int64_t d = ipow(r, n_sites);
  if (d > (std::int64_t(1) << 24)) throw std::overflow_error("statevector dimension above 2^24");
  psi.amp = Eigen::VectorXcd::Zero(d);
  psi.amp(0) = 1.0;
  return psi;
}

StateVector StateVector::basis_state(int r, std::span<const int> digits) {
  StateVector psi = zero_state(r, int(digits.size()));
  std::int64_t idx = 0, stride = 1;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= r) throw std::invalid_argument("digit outside [0, R)");
    idx += stride * digits[k];
    stride *= r;
  }
  psi.amp(0) = 0.0;
  psi.amp(idx) = 1.0;
  return psi;
}

int StateVector::digit(std::int64_t index, int site) const {
  std::int64_t s = 1;
  for (int i = 0; i < site; ++i) s *= r;
  return int((index / s) % r);
}

Eigen::MatrixXcd hadamard_r(int R) {
  Eigen::MatrixXcd h(R, R);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j)
      h(i, j) = std::polar(1.0 / std::sqrt(double(R)), 2.0 * kPi * i * j / R);
  return h;
}

Eigen::MatrixXcd z_r(int R) {
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(R, R);
  for (int j = 0; j < R; ++j) z(j, j) = std::polar(1.0, 2.0 * kPi * j / R);
  return z;
}

Eigen::Matrix2cd z_power(int n) {
  Eigen::Matrix2cd z = Eigen::Matrix2cd::Identity();
  z(1, 1) = std::polar(1.0, kPi / double(std::int64_t(1) << n));
  return z;
}

Eigen::MatrixXcd cz_r(int R) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(R * R, R * R);
  for (int j = 0; j < R; ++j)
    for (int k = 0; k < R; ++k)
      out(j * R + k, j * R + k) = std::polar(1.0, 2.0 * kPi * j * k / R);
  return out;
}

Eigen::MatrixXcd controlled(const Eigen::MatrixXcd& u) {
  int d = int(u.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(2 * d, 2 * d);
  out.block(d, d, d, d) = u;
  return out;
}

void apply_single_site(StateVector& psi, int site, const Eigen::MatrixXcd& u) {
  if (u.rows() != psi.r || u.cols() != psi.r)
    throw std::invalid_argument("gate dimension does not match site dimension");
  std::int64_t stride = stride_of(psi, site);
  std::int64_t block = stride * psi.r;
  Eigen::VectorXcd v(psi.r);
  for (std::int64_t base = 0; base < psi.dim(); base += block) {
    for (std::int64_t off = 0; off < stride; ++off) {
      for (int k = 0; k < psi.r; ++k) v(k) = psi.amp(base + off + k * stride);
      v = (u * v).eval();
      for (int k = 0; k < psi.r; ++k) psi.amp(base + off + k * stride) = v(k);
    }
  }
}

void apply_controlled_phase(StateVector& psi, int control, int target, double angle) {
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    int dc = psi.digit(i, control);
    int dt = psi.digit(i, target);
    if (dc == 0 || dt == 0) continue;
    psi.amp(i) *= std::polar(1.0, angle * dc * dt);
  }
}

int string_charge(const SymmetrySpec& spec, const StateVector& psi, std::int64_t index,
                  std::span<const int> sites) {
  int q = 0;
  for (int s : sites) q += psi.digit(index, s);
  return spec.is_zr() ? spec.canonical(q) : q;
}

Eigen::VectorXd reference_projector_diagonal(const SymmetrySpec& spec, const StateVector& psi,
                                             std::span<const int> sites, int q) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(psi.dim());
  int qc = spec.is_zr() ? spec.canonical(q) : q;
  for (std::int64_t i = 0; i < psi.dim(); ++i)
    if (string_charge(spec, psi, i, sites) == qc) diag(i) = 1.0;
  return diag;
}

StateVector apply_charge_projector(const SymmetrySpec& spec, const StateVector& psi,
                                   std::span<const int> sites, int q) {
  StateVector out = psi;
  Eigen::VectorXd diag = reference_projector_diagonal(spec, psi, sites, q);
  out.amp = psi.amp.cwiseProduct(diag.cast<cd>());
  double n = out.amp.norm();
  if (n < 1e-150) throw std::runtime_error("charge projection onto a zero-probability branch");
  out.amp /= n;
  return out;
}

namespace {

StateVector append_ancilla(const StateVector& psi) {
  StateVector out;
  out.r = psi.r;
  out.n_sites = psi.n_sites + 1;
  out.amp = Eigen::VectorXcd::Zero(psi.dim() * psi.r);
  out.amp.head(psi.dim()) = psi.amp;  // ancilla |0> is most significant
  return out;
}

struct AncillaReadout {
  int outcome = 0;
  double probability = 0.0;
  StateVector collapsed;  // ancilla removed
};

AncillaReadout measure_ancilla(const StateVector& psi, PhiloxRng* rng, int forced) {
  std::int64_t sub = psi.dim() / psi.r;
  std::vector<double> probs(psi.r);
  for (int k = 0; k < psi.r; ++k) probs[k] = psi.amp.segment(k * sub, sub).squaredNorm();
  AncillaReadout out;
  if (forced >= 0) {
    out.outcome = forced;
  } else {
    double u = rng->next_unit();
    double acc = 0.0;
    out.outcome = psi.r - 1;
    for (int k = 0; k < psi.r; ++k) {
      acc += probs[k];
      if (u < acc) {
        out.outcome = k;
        break;
      }
    }
  }
  out.probability = probs[out.outcome];
  // forced-outcome branches this small are roundoff residue of an exactly
  // forbidden charge; renormalizing them would amplify pure noise
  if (out.probability < 1e-20)
    throw std::runtime_error("norm underflow on zero-probability forced outcome");
  out.collapsed.r = psi.r;
  out.collapsed.n_sites = psi.n_sites - 1;
  out.collapsed.amp = psi.amp.segment(out.outcome * sub, sub) / std::sqrt(out.probability);
  return out;
}

MeasurementRecord run_zr_circuit(const StateVector& psi, std::span<const int> b_sites, int R,
                                 PhiloxRng* rng, int forced) {
  if (psi.r != R) throw std::invalid_argument("measure_charge_zr: state has different qudit size");
  if (b_sites.empty()) throw std::invalid_argument("measure_charge_zr: empty B");
  StateVector work = append_ancilla(psi);
  int anc = work.n_sites - 1;
  Eigen::MatrixXcd h = hadamard_r(R);
  apply_single_site(work, anc, h);
  for (int b : b_sites) apply_controlled_phase(work, anc, b, 2.0 * kPi / R);
  apply_single_site(work, anc, h.adjoint());
  AncillaReadout ro = measure_ancilla(work, rng, forced);
  MeasurementRecord rec;
  rec.rounds.push_back({1, R, ro.outcome, ro.probability});
  rec.final_charge = ro.outcome;
  rec.post_state = std::move(ro.collapsed);
  return rec;
}

}  // namespace

MeasurementRecord measure_charge_zr(const StateVector& psi, std::span<const int> b_sites, int R,
                                    PhiloxRng& rng) {
  return run_zr_circuit(psi, b_sites, R, &rng, -1);
}

MeasurementRecord measure_charge_zr_forced(const StateVector& psi, std::span<const int> b_sites,
                                           int R, int outcome) {
  return run_zr_circuit(psi, b_sites, R, nullptr, outcome);
}

int u1_round_count(int n_b_sites) {
  return int(std::ceil(std::log2(double(n_b_sites + 1))));
}

namespace {

MeasurementRecord run_u1_ladder(const StateVector& psi, std::span<const int> b_sites,
                                PhiloxRng* rng, int target_charge) {
  if (psi.r != 2) throw std::invalid_argument("measure_charge_u1: qubit system required");
  if (b_sites.empty()) throw std::invalid_argument("measure_charge_u1: empty B");
  MeasurementRecord rec;
  StateVector state = psi;
  int rounds = u1_round_count(int(b_sites.size()));
  int residue = 0;  // charge modulo 2^(n-1) after round n-1
  for (int n = 1; n <= rounds; ++n) {
    StateVector work = append_ancilla(state);
    int anc = work.n_sites - 1;
    Eigen::MatrixXcd h = hadamard_r(2);
    apply_single_site(work, anc, h);
    // controlled-Z^(1/2^(n-1)) on every B qubit
    double kick = kPi / double(std::int64_t(1) << (n - 1));
    for (int b : b_sites) apply_controlled_phase(work, anc, b, kick);
    // undo the known residue phase: U_a = (Z^(1/2^(n-1)))^(-residue)
    Eigen::Matrix2cd ua = Eigen::Matrix2cd::Identity();
    ua(1, 1) = std::polar(1.0, -kPi * double(residue) / double(std::int64_t(1) << (n - 1)));
    apply_single_site(work, anc, ua);
    apply_single_site(work, anc, h);
    int forced = -1;
    if (target_charge >= 0) forced = (target_charge >> (n - 1)) & 1;
    AncillaReadout ro = measure_ancilla(work, rng, forced);
    residue += ro.outcome << (n - 1);
    rec.rounds.push_back({n, std::int64_t(1) << n, residue, ro.probability});
    state = std::move(ro.collapsed);
  }
  rec.final_charge = residue;
  rec.post_state = std::move(state);
  return rec;
}

}  // namespace

MeasurementRecord measure_charge_u1(const StateVector& psi, std::span<const int> b_sites,
                                    PhiloxRng& rng) {
  return run_u1_ladder(psi, b_sites, &rng, -1);
}

MeasurementRecord measure_charge_u1_forced(const StateVector& psi, std::span<const int> b_sites,
                                           int target_charge) {
  return run_u1_ladder(psi, b_sites, nullptr, target_charge);
}

StateVector random_symmetric_state(const SymmetrySpec& spec, int n_a, int n_b, int total_charge,
                                   PhiloxRng& rng) {
  StateVector psi = StateVector::zero_state(spec.R, n_a + n_b);
  psi.amp(0) = 0.0;
  std::vector<int> a_sites(n_a), b_sites(n_b);
  for (int i = 0; i < n_a; ++i) a_sites[i] = i;
  for (int i = 0; i < n_b; ++i) b_sites[i] = n_a + i;
  int Q = spec.is_zr() ? spec.canonical(total_charge) : total_charge;
  // variance 1/(L_{qA} L_{qB}) per sector, matching the ensemble convention
  std::int64_t dim_a = 1;
  for (int i = 0; i < n_a; ++i) dim_a *= spec.R;
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    int qa = string_charge(spec, psi, i, a_sites);
    int qb = string_charge(spec, psi, i, b_sites);
    if (spec.is_zr() ? spec.add(qa, qb) != Q : qa + qb != Q) continue;
    double la = double(sector_dim(spec, n_a, qa));
    double lb = double(sector_dim(spec, n_b, qb));
    if (la <= 0.0 || lb <= 0.0) continue;
    psi.amp(i) = rng.next_complex_gaussian(1.0 / (la * lb));
  }
  double n = psi.norm();
  if (n == 0.0) throw std::runtime_error("random_symmetric_state: empty charge sector");
  psi.amp /= n;
  return psi;
}

StateVector random_state(int r, int n_sites, PhiloxRng& rng) {
  StateVector psi = StateVector::zero_state(r, n_sites);
  for (std::int64_t i = 0; i < psi.dim(); ++i) psi.amp(i) = rng.next_complex_gaussian(1.0);
  psi.amp /= psi.norm();
  return psi;
}

}  // namespace symneg
