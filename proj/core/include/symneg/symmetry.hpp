// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace symneg {

enum class GroupKind { ZR, U1 };

/// On-site Abelian symmetry: the cyclic group Z_R acting on R-dimensional
/// qudits, or U(1) particle number on qubits. Charges are canonicalized at
/// construction (mod R for Z_R) and never re-reduced downstream.
struct SymmetrySpec {
  GroupKind kind = GroupKind::ZR;
  int R = 2;  // on-site dimension, fixed to 2 for U1

  static SymmetrySpec zr(int R);
  static SymmetrySpec u1();

  bool is_zr() const { return kind == GroupKind::ZR; }
  int canonical(int q) const;
  int add(int a, int b) const;
  int sub(int a, int b) const;
  std::string name() const;
};

/// Hilbert-space dimension of the charge-q sector of n_sites sites.
/// Z_R: R^(n-1) for n >= 1 (independent of q); the empty factor n = 0 is
/// taken as dimension 1 for q = 0 and 0 otherwise so that split enumeration
/// stays total. U1: binomial(n, q), zero outside 0 <= q <= n.
std::int64_t sector_dim(const SymmetrySpec& spec, int n_sites, int q);

/// ln of sector_dim, valid far beyond the int64 range (lgamma-based for U1).
/// Returns -inf for empty sectors.
double log_sector_dim(const SymmetrySpec& spec, int n_sites, int q);

/// Tripartite charge-sector geometry: A = A1 A2 with N_A1 + N_A2 sites,
/// bath B with N_B sites, global charge Q, projected A-charge q_A.
struct SectorGeometry {
  SymmetrySpec spec;
  int n_a1 = 0;
  int n_a2 = 0;
  int n_b = 0;
  int total_charge = 0;  // Q
  int q_a = 0;

  SectorGeometry() = default;
  SectorGeometry(SymmetrySpec spec, int n_a1, int n_a2, int n_b, int total_charge, int q_a);

  int n_a() const { return n_a1 + n_a2; }
  int n_total() const { return n_a() + n_b; }
  int q_b() const { return spec.sub(total_charge, q_a); }
  int qbar(int q) const { return spec.sub(q_a, q); }

  std::int64_t dim_a1(int q1) const { return sector_dim(spec, n_a1, spec.canonical(q1)); }
  std::int64_t dim_a2(int q2) const { return sector_dim(spec, n_a2, spec.canonical(q2)); }
  std::int64_t dim_a() const { return sector_dim(spec, n_a(), q_a); }
  std::int64_t dim_b() const { return sector_dim(spec, n_b, q_b()); }
};

/// One (q1, qbar1) charge split of the block rho_A^(q_A); q1 + q2 = q_A.
struct SectorSplit {
  int q1 = 0;
  int q2 = 0;
  std::int64_t dim_a1 = 0;
  std::int64_t dim_a2 = 0;

  std::int64_t dim() const { return dim_a1 * dim_a2; }
};

/// All splits with both factor dimensions positive, ascending in q1.
/// Sum of split dimensions equals dim_a(); empty if the q_A sector is empty.
std::vector<SectorSplit> enumerate_splits(const SectorGeometry& geom);

/// alpha_{q1 q2} = L_{A1,q1} L_{A2,q2} / (L_{q_A} L_{q_B}), evaluated in
/// log space. Throws on empty sectors.
double alpha(int q1, int q2, const SectorGeometry& geom);

/// beta_{q1} = L_{A1,q1} / (L_{q_A} L_{q_B}).
double beta(int q1, const SectorGeometry& geom);

/// gamma = R^(-N_A1 + N_A2 + N_B - 1), the small parameter of the Z_R
/// maximal-entanglement regime.
double gamma_zr(const SectorGeometry& geom);

/// Binary Shannon entropy density f(nu) = -nu ln nu - (1-nu) ln(1-nu),
/// with f(0) = f(1) = 0. Domain error outside [0,1].
double shannon_f(double nu);

/// Born weights p_{q_A} = L_{q_A} L_{q_B} / sum_q L_q L_qbar over all
/// sectors of an (n_a, n_b) bipartition at global charge Q.
std::map<int, double> born_weights(const SymmetrySpec& spec, int n_a, int n_b, int total_charge);

/// Charges q_A with nonzero Born weight, ascending.
std::vector<int> nonempty_sectors(const SymmetrySpec& spec, int n_a, int n_b, int total_charge);

}  // namespace symneg
