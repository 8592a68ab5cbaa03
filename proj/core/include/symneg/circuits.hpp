// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "symneg/rng.hpp"
#include "symneg/symmetry.hpp"

namespace symneg {

/// Dense statevector over uniform R-dimensional sites. Amplitudes are stored
/// little-endian: site 0 is the least significant digit of the flat index,
/// so appending a site (the ancilla) makes it the most significant factor.
struct StateVector {
  int r = 2;
  int n_sites = 0;
  Eigen::VectorXcd amp;

  static StateVector zero_state(int r, int n_sites);
  static StateVector basis_state(int r, std::span<const int> digits);

  std::int64_t dim() const { return amp.size(); }
  double norm() const { return amp.norm(); }
  int digit(std::int64_t index, int site) const;
};

/// Generalized Hadamard H_R |j> = (1/sqrt(R)) sum_i w^(ij) |i>; not Hermitian
/// for R > 2, so protocols apply its adjoint on the way out.
Eigen::MatrixXcd hadamard_r(int R);
/// Qudit Z = diag(1, w, ..., w^(R-1)).
Eigen::MatrixXcd z_r(int R);
/// Qubit phase gate Z^(1/2^n) = diag(1, exp(i pi / 2^n)).
Eigen::Matrix2cd z_power(int n);
/// Controlled-Z for qudits: CZ_R = sum_j |j><j| (x) Z^j, as an R^2 x R^2
/// matrix (control factor first).
Eigen::MatrixXcd cz_r(int R);
/// Controlled-U for a single-site unitary (control factor first).
Eigen::MatrixXcd controlled(const Eigen::MatrixXcd& u);

void apply_single_site(StateVector& psi, int site, const Eigen::MatrixXcd& u);
/// Diagonal controlled phase: amp *= exp(i angle digit(control) digit(target)).
void apply_controlled_phase(StateVector& psi, int control, int target, double angle);

/// Total charge of a basis string restricted to `sites`.
int string_charge(const SymmetrySpec& spec, const StateVector& psi, std::int64_t index,
                  std::span<const int> sites);

/// Diagonal 0/1 reference projector onto charge-q strings of `sites`
/// (test oracle; dense diagonal over the full state space).
Eigen::VectorXd reference_projector_diagonal(const SymmetrySpec& spec, const StateVector& psi,
                                             std::span<const int> sites, int q);

/// Normalized (Pi_sites^(q) (x) 1) |psi>; throws on zero-probability branch.
StateVector apply_charge_projector(const SymmetrySpec& spec, const StateVector& psi,
                                   std::span<const int> sites, int q);

struct MeasurementRound {
  int round = 0;
  std::int64_t modulus = 0;
  int outcome = 0;
  double probability = 0.0;
};

struct MeasurementRecord {
  std::vector<MeasurementRound> rounds;
  int final_charge = 0;
  StateVector post_state;  // ancilla removed

  double total_probability() const {
    double p = 1.0;
    for (const auto& r : rounds) p *= r.probability;
    return p;
  }
};

/// Non-collapsing Z_R charge measurement of the listed sites: one ancilla
/// qudit, H_R, a CZ_R per site, H_R^dag, computational-basis readout. The
/// outcome equals the Z_R charge; the post-state is the exact normalized
/// charge projection of the input.
MeasurementRecord measure_charge_zr(const StateVector& psi, std::span<const int> b_sites, int R,
                                    PhiloxRng& rng);
/// Post-selected variant for deterministic tests.
MeasurementRecord measure_charge_zr_forced(const StateVector& psi, std::span<const int> b_sites,
                                           int R, int outcome);

/// U(1) binary-ladder measurement on qubits: round n reads the charge bit of
/// weight 2^(n-1) using controlled-Z^(1/2^(n-1)) kicks and an ancilla
/// correction built from the cumulative residue. Exactly
/// ceil(log2(N_B + 1)) rounds.
MeasurementRecord measure_charge_u1(const StateVector& psi, std::span<const int> b_sites,
                                    PhiloxRng& rng);
MeasurementRecord measure_charge_u1_forced(const StateVector& psi, std::span<const int> b_sites,
                                           int target_charge);

int u1_round_count(int n_b_sites);

/// Random global state of definite charge Q over (A, B) with the ensemble
/// module's Gaussian weights; sites [0, n_a) form A and [n_a, n_a + n_b) B.
StateVector random_symmetric_state(const SymmetrySpec& spec, int n_a, int n_b, int total_charge,
                                   PhiloxRng& rng);

/// Haar-ish random state without charge structure.
StateVector random_state(int r, int n_sites, PhiloxRng& rng);

}  // namespace symneg
