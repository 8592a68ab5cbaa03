// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "symneg/symmetry.hpp"

namespace symneg {

/// Resolved run configuration. Parsed from a single JSON file with strict
/// schema validation (unknown keys are rejected); every command writes the
/// resolved form back next to its results.
struct RunConfig {
  // symmetry
  SymmetrySpec symmetry = SymmetrySpec::zr(2);
  // geometry
  int n_a1 = 1;
  int n_a2 = 1;
  int n_b = 1;
  int total_charge = 0;
  std::optional<int> q_a;  // nullopt: every sector with nonzero Born weight
  bool unprojected = false;
  // ensemble
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: hardware concurrency
  bool normalize = false;
  // analysis
  int bins = 0;  // 0: Freedman-Diaconis
  int grid_points = 4001;
  double tolerance_l1 = 0.05;
  std::string theory = "auto";  // auto | semicircle | cubic
  int log_base = 2;             // 2 or 0 (natural)
  // phase-diagram / thermodynamic inputs
  int phase_r1_cells = 50;
  int phase_y_cells = 50;
  double phase_y_min = 0.05;
  double phase_y_max = 3.0;
  double nu_a = 0.5;
  double nu = 0.5;
  // circuit demo
  int shots = 1;
  bool dump_state = false;
  // outputs
  std::filesystem::path out_dir = "out";
  bool per_sample_csv = false;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  int effective_workers() const;

  /// Apply SYMNEG_OUT_DIR / SYMNEG_WORKERS environment overrides.
  void apply_env_overrides();
};

/// Write manifest.json (resolved config, version string, seed) into dir.
void write_manifest(const RunConfig& cfg, const std::filesystem::path& dir);

double to_log_base(double nats, int log_base);

}  // namespace symneg
