// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "symneg/symmetry.hpp"

namespace symneg {

/// Gaussian coefficient matrix X of a charge-fixed random pure state,
/// restricted to the (q_A, q_B) sector: entries are i.i.d. circular complex
/// Gaussians with E|X|^2 = 1/(L_{q_A} L_{q_B}), so Tr(X X^dag) = 1 on
/// average. Rows enumerate the A-sector basis in layout order (splits
/// ascending in q1, row-major over (A1 index, A2 index) inside a split).
struct GaussianBlock {
  SectorGeometry geom;
  Eigen::MatrixXcd x;  // L_{q_A} x L_{q_B}
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;
};

/// One charge block rho_A^(q_A) together with its split layout.
struct BlockDensityMatrix {
  SectorGeometry geom;
  std::vector<SectorSplit> layout;
  Eigen::MatrixXcd rho;  // L_{q_A} x L_{q_A}, Hermitian
  bool normalized = false;
};

GaussianBlock sample_block(const SectorGeometry& geom, std::uint64_t sample_index,
                           std::uint64_t master_seed);

/// rho = X X^dag, exactly Hermitian after symmetrization. Per-sample trace
/// normalization is off by default; the ensemble convention keeps
/// <Tr rho> = 1 and neglects trace fluctuations.
BlockDensityMatrix build_rho(const GaussianBlock& block, bool normalize = false);

/// Wrap an explicit matrix as a charge block (layout checked against the
/// matrix dimension).
BlockDensityMatrix make_block(const SectorGeometry& geom, Eigen::MatrixXcd rho,
                              bool normalized = false);

/// Tr(rho^n) via eigenvalues.
double renyi_moment(const BlockDensityMatrix& rho, int n);

enum class MomentRegime {
  kADominant,      // L_{q_A} >> L_{q_B}:       <Tr rho^n> ~ L_{q_B}^(1-n)
  kBDominant,      // L_{q_A} << L_{q_B}:       <Tr rho^n> ~ L_{q_A}^(1-n)
  kPtLargeB,       // PT moments, large bath:   sum_q1 L1 L2 / L_{q_A}^n
  kPtLargeA1,      // PT moments, dominant A1 diagram (even n)
  kPtRsbCandidate  // PT moments, one candidate replica-symmetry-broken diagram (even n)
};

struct MomentPrediction {
  double value = 0.0;
  // false when the regime's dimension ratios are violated by more than a
  // factor-2 safety margin; the value is still returned.
  bool regime_ok = true;
};

MomentPrediction predicted_moment(const SectorGeometry& geom, int n, MomentRegime regime);

struct EnsembleStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::vector<double> samples;  // filled only when requested
};

/// Monte Carlo mean and standard error of a per-sample statistic. Results
/// are bit-identical for any worker count with the same master seed: every
/// sample's RNG stream is keyed by its index and the reduction is a fixed
/// pairwise sum in index order.
EnsembleStats ensemble_run(const SectorGeometry& geom, std::size_t n_samples,
                           const std::function<double(const BlockDensityMatrix&)>& statistic,
                           std::uint64_t master_seed, int workers, bool keep_samples = false);

/// Map an arbitrary per-sample functional over the ensemble; results are
/// returned in sample-index order regardless of scheduling.
template <typename T>
std::vector<T> ensemble_map(const SectorGeometry& geom, std::size_t n_samples,
                            const std::function<T(const BlockDensityMatrix&)>& fn,
                            std::uint64_t master_seed, int workers, bool normalize = false);

/// Numerically stable pairwise sum (deterministic reduction order).
double pairwise_sum(const std::vector<double>& values);

namespace detail {
void parallel_for_samples(std::size_t n, int workers, const std::function<void(std::size_t)>& body);
}

template <typename T>
std::vector<T> ensemble_map(const SectorGeometry& geom, std::size_t n_samples,
                            const std::function<T(const BlockDensityMatrix&)>& fn,
                            std::uint64_t master_seed, int workers, bool normalize) {
  std::vector<T> out(n_samples);
  detail::parallel_for_samples(n_samples, workers, [&](std::size_t i) {
    out[i] = fn(build_rho(sample_block(geom, i, master_seed), normalize));
  });
  return out;
}

}  // namespace symneg
