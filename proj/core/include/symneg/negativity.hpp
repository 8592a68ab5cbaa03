// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "symneg/ensemble.hpp"
#include "symneg/symmetry.hpp"

namespace symneg {

/// One (q1, q2) charge sector of the partially transposed block. The
/// support of rho^{T2} is larger than that of rho: it contains every
/// (q1, q2) with all four of L_{A1,q1}, L_{A2,q2}, L_{A1,qbar2}, L_{A2,qbar1}
/// nonzero, whereas rho itself lives on the q2 = qbar1 splits only.
struct PtSector {
  int q1 = 0;
  int q2 = 0;
  std::int64_t dim_a1 = 0;
  std::int64_t dim_a2 = 0;
  std::int64_t offset = 0;

  std::int64_t dim() const { return dim_a1 * dim_a2; }
};

struct PtLayout {
  std::vector<PtSector> sectors;  // ascending (q1, q2)
  std::int64_t total_dim = 0;

  const PtSector* find(int q1, int q2) const;
};

PtLayout pt_support(const SectorGeometry& geom);

/// A Hermitian matrix living on the extended PT support.
struct PtMatrix {
  SectorGeometry geom;
  PtLayout layout;
  Eigen::MatrixXcd mat;
};

/// rho embedded in the extended support (zero outside its own splits).
PtMatrix embed_in_pt_support(const BlockDensityMatrix& rho);

/// Partial transpose with respect to A2:
///   <i1 i2| rho^{T2} |j1 j2> = <i1 j2| rho |j1 i2>.
/// Trace-preserving and Hermitian; an exact involution on PtMatrix.
PtMatrix partial_transpose(const BlockDensityMatrix& rho);
PtMatrix partial_transpose(const PtMatrix& m);

/// Charge-diagonal sub-block of rho^{T2} on the (q1, qbar1) sector.
struct PtDiagonalBlock {
  int q1 = 0;
  Eigen::MatrixXcd mat;  // Hermitian
};

/// Coupling between the (q1, q2) and (qbar2, qbar1) sectors, q2 != qbar1.
/// The pair forms [[0, M], [M^dag, 0]]; its nonzero eigenvalues are plus and
/// minus the singular values of M, with |rows - cols| structural zeros.
struct PtPairedBlock {
  int q1 = 0;
  int q2 = 0;  // partner sector is (qbar2, qbar1)
  Eigen::MatrixXcd coupling;
};

struct PtBlockDecomposition {
  SectorGeometry geom;
  std::vector<PtDiagonalBlock> diagonal_blocks;
  std::vector<PtPairedBlock> paired_blocks;
};

PtBlockDecomposition decompose_pt(const BlockDensityMatrix& rho);

/// Eigenvalues of rho^{T2}, grouped by the resolvent components: P2 from
/// charge-diagonal blocks, P1 from paired blocks (signed +/- singular value
/// pairs). structural_zero_count holds the exact zeros of rectangular pairs.
struct NegativitySpectrum {
  std::vector<double> p1_eigenvalues;
  std::vector<double> p2_eigenvalues;
  std::int64_t structural_zero_count = 0;

  std::int64_t count() const {
    return std::int64_t(p1_eigenvalues.size() + p2_eigenvalues.size()) + structural_zero_count;
  }
};

NegativitySpectrum pt_spectrum(const BlockDensityMatrix& rho);
NegativitySpectrum pt_spectrum(const PtBlockDecomposition& blocks);

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m);
std::vector<double> singular_values(const Eigen::MatrixXcd& m);

/// Magnitude below which an eigenvalue is treated as numerical zero before
/// the xi < 0 integration (desk-scale spectra sit around 1e-4).
inline constexpr double kEigenvalueClamp = 1e-12;

double negativity_from_eigenvalues(std::span<const double> eigs);

/// N = (||rho^{T2}||_1 - 1)/2, evaluated as -sum_{xi<0} xi.
double negativity(const BlockDensityMatrix& rho);
/// E = ln ||rho^{T2}||_1 (natural log; unit conversion happens at the CLI).
double log_negativity(const BlockDensityMatrix& rho);

/// sum_q p_q E_q. Throws if a sector with nonzero weight is missing.
double symmetry_averaged_logneg(const std::map<int, double>& per_sector,
                                const std::map<int, double>& weights);

struct HistogramSpec {
  int bins = 0;        // 0: Freedman-Diaconis
  double lo = 0.0;     // used only when explicit_range
  double hi = 0.0;
  bool explicit_range = false;
};

struct Histogram {
  std::vector<double> edges;    // size bins + 1
  std::vector<double> density;  // size bins

  double bin_width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double integral() const;
  /// -sum_{bins with center < 0} center * density * width
  double negativity_estimate() const;
};

/// Histogram with density normalized so the integral equals
/// (number of values) * weight_per_value; pass 1/n_samples for pooled
/// ensemble spectra to get a per-sample density.
Histogram spectrum_histogram(std::span<const double> values, const HistogramSpec& spec = {},
                             double weight_per_value = 1.0);

}  // namespace symneg
