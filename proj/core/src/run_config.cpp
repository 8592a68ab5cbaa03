// SPDX-License-Identifier: Apache-2.0
#include "symneg/run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <thread>

#include "symneg/csv.hpp"
#include "symneg/version.hpp"

namespace symneg {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  reject_unknown(j, {"symmetry", "geometry", "ensemble", "analysis", "phase", "circuit", "outputs"},
                 "top level");
  if (j.contains("symmetry")) {
    const json& s = j.at("symmetry");
    reject_unknown(s, {"kind", "R"}, "symmetry");
    std::string kind = s.value("kind", "ZR");
    if (kind == "ZR")
      cfg.symmetry = SymmetrySpec::zr(s.value("R", 2));
    else if (kind == "U1")
      cfg.symmetry = SymmetrySpec::u1();
    else
      throw std::invalid_argument("config: symmetry.kind must be ZR or U1");
  }
  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    reject_unknown(g, {"N_A1", "N_A2", "N_B", "Q", "q_A", "unprojected"}, "geometry");
    cfg.n_a1 = g.value("N_A1", cfg.n_a1);
    cfg.n_a2 = g.value("N_A2", cfg.n_a2);
    cfg.n_b = g.value("N_B", cfg.n_b);
    cfg.total_charge = g.value("Q", cfg.total_charge);
    cfg.unprojected = g.value("unprojected", false);
    if (g.contains("q_A")) {
      if (g.at("q_A").is_string()) {
        if (g.at("q_A").get<std::string>() != "all")
          throw std::invalid_argument("config: geometry.q_A must be an integer or \"all\"");
      } else {
        cfg.q_a = g.at("q_A").get<int>();
      }
    }
  }
  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    reject_unknown(e, {"samples", "seed", "workers", "normalize"}, "ensemble");
    cfg.samples = e.value("samples", cfg.samples);
    cfg.seed = e.value("seed", cfg.seed);
    cfg.workers = e.value("workers", cfg.workers);
    cfg.normalize = e.value("normalize", cfg.normalize);
  }
  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    reject_unknown(a, {"bins", "grid_points", "tolerance_l1", "theory", "log_base"}, "analysis");
    cfg.bins = a.value("bins", cfg.bins);
    cfg.grid_points = a.value("grid_points", cfg.grid_points);
    cfg.tolerance_l1 = a.value("tolerance_l1", cfg.tolerance_l1);
    cfg.theory = a.value("theory", cfg.theory);
    if (cfg.theory != "auto" && cfg.theory != "semicircle" && cfg.theory != "cubic")
      throw std::invalid_argument("config: analysis.theory must be auto, semicircle or cubic");
    if (a.contains("log_base")) {
      if (a.at("log_base").is_string()) {
        std::string b = a.at("log_base").get<std::string>();
        if (b == "e")
          cfg.log_base = 0;
        else if (b == "2")
          cfg.log_base = 2;
        else
          throw std::invalid_argument("config: analysis.log_base must be 2 or e");
      } else {
        cfg.log_base = a.at("log_base").get<int>();
        if (cfg.log_base != 2) throw std::invalid_argument("config: analysis.log_base must be 2 or e");
      }
    }
  }
  if (j.contains("phase")) {
    const json& p = j.at("phase");
    reject_unknown(p, {"r1_cells", "y_cells", "y_min", "y_max", "nu_A", "nu"}, "phase");
    cfg.phase_r1_cells = p.value("r1_cells", cfg.phase_r1_cells);
    cfg.phase_y_cells = p.value("y_cells", cfg.phase_y_cells);
    cfg.phase_y_min = p.value("y_min", cfg.phase_y_min);
    cfg.phase_y_max = p.value("y_max", cfg.phase_y_max);
    cfg.nu_a = p.value("nu_A", cfg.nu_a);
    cfg.nu = p.value("nu", cfg.nu);
  }
  if (j.contains("circuit")) {
    const json& c = j.at("circuit");
    reject_unknown(c, {"shots", "dump_state"}, "circuit");
    cfg.shots = c.value("shots", cfg.shots);
    cfg.dump_state = c.value("dump_state", cfg.dump_state);
  }
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    reject_unknown(o, {"directory", "per_sample_csv"}, "outputs");
    cfg.out_dir = o.value("directory", cfg.out_dir.string());
    cfg.per_sample_csv = o.value("per_sample_csv", cfg.per_sample_csv);
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  json j = json::parse(read_text_file(path));
  return from_json(j);
}

json RunConfig::to_json() const {
  json j;
  j["symmetry"] = {{"kind", symmetry.is_zr() ? "ZR" : "U1"}, {"R", symmetry.R}};
  json g = {{"N_A1", n_a1}, {"N_A2", n_a2}, {"N_B", n_b}, {"Q", total_charge},
            {"unprojected", unprojected}};
  if (q_a)
    g["q_A"] = *q_a;
  else
    g["q_A"] = "all";
  j["geometry"] = g;
  j["ensemble"] = {{"samples", samples}, {"seed", seed}, {"workers", workers},
                   {"normalize", normalize}};
  j["analysis"] = {{"bins", bins},
                   {"grid_points", grid_points},
                   {"tolerance_l1", tolerance_l1},
                   {"theory", theory},
                   {"log_base", log_base == 0 ? json("e") : json(2)}};
  j["phase"] = {{"r1_cells", phase_r1_cells}, {"y_cells", phase_y_cells},
                {"y_min", phase_y_min},       {"y_max", phase_y_max},
                {"nu_A", nu_a},               {"nu", nu}};
  j["circuit"] = {{"shots", shots}, {"dump_state", dump_state}};
  j["outputs"] = {{"directory", out_dir.string()}, {"per_sample_csv", per_sample_csv}};
  return j;
}

int RunConfig::effective_workers() const {
  if (workers > 0) return workers;
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? int(hc) : 1;
}

void RunConfig::apply_env_overrides() {
  if (const char* dir = std::getenv("SYMNEG_OUT_DIR")) out_dir = dir;
  if (const char* w = std::getenv("SYMNEG_WORKERS")) workers = std::atoi(w);
}

void write_manifest(const RunConfig& cfg, const std::filesystem::path& dir) {
  json m;
  m["config"] = cfg.to_json();
  m["version"] = kVersion;
  m["seed"] = cfg.seed;
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

double to_log_base(double nats, int log_base) {
  return log_base == 2 ? nats / std::log(2.0) : nats;
}

}  // namespace symneg
