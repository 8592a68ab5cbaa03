// SPDX-License-Identifier: Apache-2.0
//
// symneg: sampling and random-matrix analysis of charge-projected
// entanglement negativity spectra, plus the charge-measurement circuit
// protocols. One subcommand per pipeline; all runs are reproducible from
// the emitted manifest.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "symneg/commands.hpp"
#include "symneg/version.hpp"

using namespace symneg;

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-resolved negativity spectra of random mixed states"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> log_base;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "override ensemble.seed");
    sub->add_option("--workers", workers, "override ensemble.workers");
    sub->add_option("--out", out_dir, "override outputs.directory");
    sub->add_option("--log-base", log_base, "2 or e")->check(CLI::IsMember({"2", "e"}));
  };

  CLI::App* sample = app.add_subcommand("sample-spectrum", "Monte Carlo negativity spectrum");
  CLI::App* theory = app.add_subcommand("theory-spectrum", "random-matrix theory curves");
  CLI::App* compare = app.add_subcommand("compare", "MC vs theory with L1/KS gates");
  CLI::App* phase = app.add_subcommand("phase-diagram", "thermodynamic phase classifier scan");
  CLI::App* moments = app.add_subcommand("moments", "MC moments vs diagrammatic predictions");
  CLI::App* minfo = app.add_subcommand("mutual-info", "mutual-information table");
  CLI::App* circuit = app.add_subcommand("circuit-demo", "charge-measurement circuit run");
  for (CLI::App* sub : {sample, theory, compare, phase, moments, minfo, circuit}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = RunConfig::from_file(config_path);
    cfg.apply_env_overrides();
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (out_dir) cfg.out_dir = *out_dir;
    if (log_base) cfg.log_base = *log_base == "e" ? 0 : 2;

    if (sample->parsed()) return cmd_sample_spectrum(cfg);
    if (theory->parsed()) return cmd_theory_spectrum(cfg);
    if (compare->parsed()) return cmd_compare(cfg);
    if (phase->parsed()) return cmd_phase_diagram(cfg);
    if (moments->parsed()) return cmd_moments(cfg);
    if (minfo->parsed()) return cmd_mutual_info(cfg);
    if (circuit->parsed()) return cmd_circuit_demo(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
