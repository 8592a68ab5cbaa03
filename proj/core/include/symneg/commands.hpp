// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symneg/ensemble.hpp"
#include "symneg/negativity.hpp"
#include "symneg/resolvent.hpp"
#include "symneg/run_config.hpp"

namespace symneg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCompareFail = 2;
inline constexpr int kExitNonConvergence = 3;

/// Pooled Monte Carlo spectrum of one charge sector plus per-sample scalars.
struct SampleSpectrumResult {
  std::vector<double> p1;  // pooled over samples
  std::vector<double> p2;
  std::int64_t structural_zeros = 0;
  EnsembleStats negativity;
  EnsembleStats log_negativity;  // nats
  EnsembleStats tr_rho2;
  EnsembleStats tr_rho3;
  std::size_t n_samples = 0;
};

SampleSpectrumResult run_sample_spectrum(const SectorGeometry& geom, std::size_t n_samples,
                                         std::uint64_t seed, int workers, bool normalize = false);

/// Analytic component models of a projected sector. mode: semicircle, cubic,
/// or auto (semicircle when the replica-symmetry-breaking ratios hold for
/// every component, cubic otherwise).
std::vector<SpectralModel> theory_models(const SectorGeometry& geom, const std::string& mode,
                                         int grid_points = 4001);

/// Per-component histogram set on common edges (components: P1, P2, total).
struct BinnedSpectra {
  std::vector<double> edges;
  std::vector<double> p1, p2, total;  // densities per bin
};

BinnedSpectra bin_mc_spectrum(const SampleSpectrumResult& mc, int bins);
BinnedSpectra bin_theory(const std::vector<SpectralModel>& models,
                         const std::vector<double>& edges);

struct CompareRow {
  std::string component;
  double l1 = 0.0;
  double ks = 0.0;
  bool pass = false;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  bool pass = false;
};

CompareReport compare_binned(const BinnedSpectra& mc, const BinnedSpectra& theory,
                             double tolerance_l1);

/// One sample of the unprojected (full block-diagonal) PT spectrum, computed
/// densely on the A1 x A2 product basis.
std::vector<double> sample_unprojected_pt_spectrum(const SymmetrySpec& spec, int n_a1, int n_a2,
                                                   int n_b, int total_charge,
                                                   std::uint64_t sample_index, std::uint64_t seed);

// CLI subcommands; each writes its files under cfg.out_dir.
int cmd_sample_spectrum(const RunConfig& cfg);
int cmd_theory_spectrum(const RunConfig& cfg);
int cmd_compare(const RunConfig& cfg);
int cmd_phase_diagram(const RunConfig& cfg);
int cmd_moments(const RunConfig& cfg);
int cmd_mutual_info(const RunConfig& cfg);
int cmd_circuit_demo(const RunConfig& cfg);

}  // namespace symneg
