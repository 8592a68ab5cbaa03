// SPDX-License-Identifier: Apache-2.0
#include "symneg/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <json.hpp>

#include "symneg/asymptotics.hpp"
#include "symneg/circuits.hpp"
#include "symneg/csv.hpp"
#include "symneg/quadrature.hpp"
#include "symneg/rng.hpp"

namespace symneg {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct PerSample {
  std::vector<double> p1, p2;
  std::int64_t zeros = 0;
  double neg = 0.0, logneg = 0.0, tr2 = 0.0, tr3 = 0.0;
};

EnsembleStats stats_of(const std::vector<double>& v) {
  EnsembleStats s;
  s.n_samples = v.size();
  s.mean = pairwise_sum(v) / double(v.size());
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - s.mean) * (v[i] - s.mean);
  double var = v.size() > 1 ? pairwise_sum(sq) / double(v.size() - 1) : 0.0;
  s.std_error = std::sqrt(var / double(v.size()));
  return s;
}

}  // namespace

SampleSpectrumResult run_sample_spectrum(const SectorGeometry& geom, std::size_t n_samples,
                                         std::uint64_t seed, int workers, bool normalize) {
  std::function<PerSample(const BlockDensityMatrix&)> fn = [](const BlockDensityMatrix& rho) {
    PerSample out;
    NegativitySpectrum s = pt_spectrum(rho);
    out.p1 = std::move(s.p1_eigenvalues);
    out.p2 = std::move(s.p2_eigenvalues);
    out.zeros = s.structural_zero_count;
    std::vector<double> all(out.p1);
    all.insert(all.end(), out.p2.begin(), out.p2.end());
    out.neg = negativity_from_eigenvalues(all);
    double tn = 0.0;
    for (double x : all)
      if (std::abs(x) > kEigenvalueClamp) tn += std::abs(x);
    out.logneg = std::log(tn);
    // moments from the charge-diagonal eigenvalues of rho itself
    Eigen::VectorXd ev = hermitian_eigenvalues(rho.rho);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      out.tr2 += ev(i) * ev(i);
      out.tr3 += ev(i) * ev(i) * ev(i);
    }
    return out;
  };
  auto per = ensemble_map<PerSample>(geom, n_samples, fn, seed, workers, normalize);
  SampleSpectrumResult out;
  out.n_samples = n_samples;
  std::vector<double> neg(n_samples), logneg(n_samples), tr2(n_samples), tr3(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    out.p1.insert(out.p1.end(), per[i].p1.begin(), per[i].p1.end());
    out.p2.insert(out.p2.end(), per[i].p2.begin(), per[i].p2.end());
    out.structural_zeros += per[i].zeros;
    neg[i] = per[i].neg;
    logneg[i] = per[i].logneg;
    tr2[i] = per[i].tr2;
    tr3[i] = per[i].tr3;
  }
  out.negativity = stats_of(neg);
  out.log_negativity = stats_of(logneg);
  out.tr_rho2 = stats_of(tr2);
  out.tr_rho3 = stats_of(tr3);
  return out;
}

std::vector<SpectralModel> theory_models(const SectorGeometry& geom, const std::string& mode,
                                         int grid_points) {
  PtLayout layout = pt_support(geom);
  auto build = [&](bool cubic) {
    std::vector<SpectralModel> out;
    for (const auto& s : layout.sectors) {
      bool diagonal = geom.spec.canonical(s.q2) == geom.spec.canonical(geom.qbar(s.q1));
      if (diagonal)
        out.push_back(cubic ? cubic_density_p2(s.q1, geom, grid_points)
                            : semicircle_p2(s.q1, geom));
      else
        out.push_back(cubic ? cubic_density_p1(s.q1, s.q2, geom, grid_points)
                            : semicircle_p1(s.q1, s.q2, geom));
    }
    return out;
  };
  if (mode == "semicircle") return build(false);
  if (mode == "cubic") return build(true);
  auto sc = build(false);
  bool ok = true;
  for (const auto& m : sc) ok = ok && m.regime_ok;
  return ok ? sc : build(true);
}

namespace {

std::vector<double> edges_for(const std::vector<double>& pooled, int bins) {
  HistogramSpec spec;
  spec.bins = bins;
  Histogram h = spectrum_histogram(pooled, spec);
  return h.edges;
}

std::vector<double> bin_values(const std::vector<double>& values, const std::vector<double>& edges,
                               double weight) {
  int bins = int(edges.size()) - 1;
  std::vector<double> density(bins, 0.0);
  double lo = edges.front(), hi = edges.back();
  double w = (hi - lo) / bins;
  for (double x : values) {
    if (x < lo || x > hi) continue;
    int b = std::min(bins - 1, int((x - lo) / w));
    density[b] += weight / w;
  }
  return density;
}

}  // namespace

BinnedSpectra bin_mc_spectrum(const SampleSpectrumResult& mc, int bins) {
  std::vector<double> pooled(mc.p1);
  pooled.insert(pooled.end(), mc.p2.begin(), mc.p2.end());
  BinnedSpectra out;
  out.edges = edges_for(pooled, bins);
  double w = 1.0 / double(mc.n_samples);
  out.p1 = bin_values(mc.p1, out.edges, w);
  out.p2 = bin_values(mc.p2, out.edges, w);
  out.total = bin_values(pooled, out.edges, w);
  return out;
}

BinnedSpectra bin_theory(const std::vector<SpectralModel>& models,
                         const std::vector<double>& edges) {
  BinnedSpectra out;
  out.edges = edges;
  int bins = int(edges.size()) - 1;
  out.p1.assign(bins, 0.0);
  out.p2.assign(bins, 0.0);
  out.total.assign(bins, 0.0);
  for (const auto& m : models) {
    for (int b = 0; b < bins; ++b) {
      double mass = 0.0;
      for (const auto& iv : m.support) {
        double lo = std::max(edges[b], iv.lo);
        double hi = std::min(edges[b + 1], iv.hi);
        if (hi <= lo) continue;
        mass += integrate_with_edge_substitution(m.density, lo, hi,
                                                 1e-10 * (1.0 + m.normalization));
      }
      double dens = mass / (edges[b + 1] - edges[b]);
      out.total[b] += dens;
      if (m.component == SpectralComponent::kP1)
        out.p1[b] += dens;
      else if (m.component == SpectralComponent::kP2)
        out.p2[b] += dens;
      else {
        // total-only models (e.g. the Z_R closed form) count as total
      }
    }
  }
  return out;
}

namespace {

CompareRow compare_component(const std::string& name, const std::vector<double>& mc,
                             const std::vector<double>& th, const std::vector<double>& edges,
                             double tol) {
  CompareRow row;
  row.component = name;
  double l1 = 0.0, mass = 0.0, cum = 0.0, ks = 0.0, mc_mass = 0.0;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    double w = edges[b + 1] - edges[b];
    l1 += std::abs(mc[b] - th[b]) * w;
    mass += th[b] * w;
    mc_mass += mc[b] * w;
  }
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    double w = edges[b + 1] - edges[b];
    cum += (mc[b] / std::max(mc_mass, 1e-300) - th[b] / std::max(mass, 1e-300)) * w;
    ks = std::max(ks, std::abs(cum));
  }
  row.l1 = mass > 0.0 ? l1 / mass : l1;
  row.ks = ks;
  row.pass = row.l1 < tol;
  return row;
}

}  // namespace

CompareReport compare_binned(const BinnedSpectra& mc, const BinnedSpectra& theory,
                             double tolerance_l1) {
  CompareReport rep;
  rep.rows.push_back(compare_component("P1", mc.p1, theory.p1, mc.edges, tolerance_l1));
  rep.rows.push_back(compare_component("P2", mc.p2, theory.p2, mc.edges, tolerance_l1));
  rep.rows.push_back(compare_component("total", mc.total, theory.total, mc.edges, tolerance_l1));
  rep.pass = true;
  for (const auto& r : rep.rows) rep.pass = rep.pass && r.pass;
  return rep;
}

std::vector<double> sample_unprojected_pt_spectrum(const SymmetrySpec& spec, int n_a1, int n_a2,
                                                   int n_b, int total_charge,
                                                   std::uint64_t sample_index,
                                                   std::uint64_t seed) {
  // dense route on the full A1 x A2 product basis
  auto pow_i = [&](int n) {
    std::int64_t d = 1;
    for (int i = 0; i < n; ++i) d *= spec.R;
    return d;
  };
  std::int64_t d1 = pow_i(n_a1), d2 = pow_i(n_a2), db = pow_i(n_b);
  auto digit_sum = [&](std::int64_t s, int n) {
    int q = 0;
    for (int i = 0; i < n; ++i) {
      q += int(s % spec.R);
      s /= spec.R;
    }
    return spec.is_zr() ? spec.canonical(q) : q;
  };
  std::vector<int> qa1(d1), qa2(d2), qb(db);
  for (std::int64_t i = 0; i < d1; ++i) qa1[i] = digit_sum(i, n_a1);
  for (std::int64_t i = 0; i < d2; ++i) qa2[i] = digit_sum(i, n_a2);
  for (std::int64_t i = 0; i < db; ++i) qb[i] = digit_sum(i, n_b);
  double lambda = 0.0;
  {
    int qa_hi = spec.is_zr() ? spec.R - 1 : n_a1 + n_a2;
    for (int qa = 0; qa <= qa_hi; ++qa) {
      std::int64_t la = sector_dim(spec, n_a1 + n_a2, qa);
      std::int64_t lb = sector_dim(spec, n_b, spec.sub(total_charge, qa));
      lambda += double(la) * double(lb);
    }
  }
  PhiloxRng rng(seed, sample_index);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d1 * d2, db);
  int Q = spec.is_zr() ? spec.canonical(total_charge) : total_charge;
  for (std::int64_t i1 = 0; i1 < d1; ++i1)
    for (std::int64_t i2 = 0; i2 < d2; ++i2)
      for (std::int64_t b = 0; b < db; ++b) {
        int qtot = spec.is_zr() ? spec.add(spec.add(qa1[i1], qa2[i2]), qb[b])
                                : qa1[i1] + qa2[i2] + qb[b];
        std::complex<double> g = rng.next_complex_gaussian(1.0 / lambda);
        if (qtot == Q) x(i1 * d2 + i2, b) = g;  // draw always, for stream stability
      }
  Eigen::MatrixXcd rho = x * x.adjoint();
  Eigen::MatrixXcd pt(d1 * d2, d1 * d2);
  for (std::int64_t i1 = 0; i1 < d1; ++i1)
    for (std::int64_t i2 = 0; i2 < d2; ++i2)
      for (std::int64_t j1 = 0; j1 < d1; ++j1)
        for (std::int64_t j2 = 0; j2 < d2; ++j2)
          pt(i1 * d2 + i2, j1 * d2 + j2) = rho(i1 * d2 + j2, j1 * d2 + i2);
  pt = ((pt + pt.adjoint()) / 2.0).eval();
  Eigen::VectorXd ev = hermitian_eigenvalues(pt);
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

namespace {

std::vector<int> sectors_to_run(const RunConfig& cfg) {
  if (cfg.q_a) return {*cfg.q_a};
  return nonempty_sectors(cfg.symmetry, cfg.n_a1 + cfg.n_a2, cfg.n_b, cfg.total_charge);
}

SectorGeometry geom_of(const RunConfig& cfg, int q_a) {
  return SectorGeometry(cfg.symmetry, cfg.n_a1, cfg.n_a2, cfg.n_b, cfg.total_charge, q_a);
}

void write_spectrum_csv(const fs::path& path, const BinnedSpectra& b) {
  CsvTable t;
  t.header = {"bin_left", "bin_right", "density", "component"};
  auto emit = [&](const std::vector<double>& dens, const char* comp) {
    for (std::size_t i = 0; i + 1 < b.edges.size(); ++i)
      t.add_row({format_double(b.edges[i]), format_double(b.edges[i + 1]),
                 format_double(dens[i]), comp});
  };
  emit(b.p1, "P1");
  emit(b.p2, "P2");
  emit(b.total, "total");
  write_text_file(path, t.to_string());
}

std::string sector_suffix(const RunConfig& cfg, int q_a) {
  if (cfg.q_a) return "";
  return "_qA" + std::to_string(q_a);
}

}  // namespace

namespace {

int sample_unprojected(const RunConfig& cfg) {
  std::vector<std::vector<double>> per(cfg.samples);
  detail::parallel_for_samples(cfg.samples, cfg.effective_workers(), [&](std::size_t i) {
    per[i] = sample_unprojected_pt_spectrum(cfg.symmetry, cfg.n_a1, cfg.n_a2, cfg.n_b,
                                            cfg.total_charge, i, cfg.seed);
  });
  std::vector<double> pooled, neg(cfg.samples);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    neg[i] = negativity_from_eigenvalues(per[i]);
    pooled.insert(pooled.end(), per[i].begin(), per[i].end());
  }
  HistogramSpec hs;
  hs.bins = cfg.bins;
  Histogram h = spectrum_histogram(pooled, hs, 1.0 / double(cfg.samples));
  CsvTable t;
  t.header = {"bin_left", "bin_right", "density", "component"};
  for (std::size_t i = 0; i + 1 < h.edges.size(); ++i)
    t.add_row({format_double(h.edges[i]), format_double(h.edges[i + 1]),
               format_double(h.density[i]), "total"});
  write_text_file(cfg.out_dir / "spectrum.csv", t.to_string());
  auto stats = stats_of(neg);
  json summary;
  summary["unprojected"] = true;
  summary["negativity"] = {{"mean", stats.mean}, {"stderr", stats.std_error}};
  write_text_file(cfg.out_dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(cfg, cfg.out_dir);
  return kExitOk;
}

}  // namespace

int cmd_sample_spectrum(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  if (cfg.unprojected) return sample_unprojected(cfg);
  auto sectors = sectors_to_run(cfg);
  auto weights = born_weights(cfg.symmetry, cfg.n_a1 + cfg.n_a2, cfg.n_b, cfg.total_charge);
  json summary;
  std::map<int, double> logneg_nats;
  for (int q_a : sectors) {
    SectorGeometry geom = geom_of(cfg, q_a);
    auto mc = run_sample_spectrum(geom, cfg.samples, cfg.seed, cfg.effective_workers(),
                                  cfg.normalize);
    if (cfg.per_sample_csv) {
      auto stats = ensemble_run(
          geom, cfg.samples, [](const BlockDensityMatrix& r) { return negativity(r); }, cfg.seed,
          cfg.effective_workers(), true);
      CsvTable t;
      t.header = {"sample_index", "value"};
      for (std::size_t i = 0; i < stats.samples.size(); ++i)
        t.add_row({std::to_string(i), format_double(stats.samples[i])});
      write_text_file(cfg.out_dir / ("per_sample" + sector_suffix(cfg, q_a) + ".csv"),
                      t.to_string());
    }
    BinnedSpectra binned = bin_mc_spectrum(mc, cfg.bins);
    write_spectrum_csv(cfg.out_dir / ("spectrum" + sector_suffix(cfg, q_a) + ".csv"), binned);
    Histogram pooled;
    pooled.edges = binned.edges;
    pooled.density = binned.total;
    json s;
    s["q_A"] = q_a;
    s["samples"] = mc.n_samples;
    s["negativity"] = {{"mean", mc.negativity.mean}, {"stderr", mc.negativity.std_error}};
    s["log_negativity"] = {{"mean", to_log_base(mc.log_negativity.mean, cfg.log_base)},
                           {"stderr", to_log_base(mc.log_negativity.std_error, cfg.log_base)},
                           {"base", cfg.log_base == 0 ? "e" : "2"}};
    s["tr_rho2"] = {{"mean", mc.tr_rho2.mean}, {"stderr", mc.tr_rho2.std_error}};
    s["tr_rho3"] = {{"mean", mc.tr_rho3.mean}, {"stderr", mc.tr_rho3.std_error}};
    s["histogram_negativity"] = pooled.negativity_estimate();
    s["born_weight"] = weights.count(q_a) ? weights.at(q_a) : 0.0;
    summary["sectors"].push_back(s);
    logneg_nats[q_a] = mc.log_negativity.mean;
  }
  if (!cfg.q_a) {
    double avg = symmetry_averaged_logneg(logneg_nats, weights);
    summary["symmetry_averaged_log_negativity"] = to_log_base(avg, cfg.log_base);
  }
  write_text_file(cfg.out_dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(cfg, cfg.out_dir);
  return kExitOk;
}

int cmd_theory_spectrum(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  if (cfg.unprojected) {
    SectorGeometry geom(cfg.symmetry, cfg.n_a1, cfg.n_a2, cfg.n_b, cfg.total_charge,
                        sectors_to_run(cfg).front());
    SpectralModel model;
    bool converged = true;
    if (cfg.symmetry.is_zr() && cfg.theory != "cubic") {
      model = unprojected_zr_density(geom);
    } else {
      double span = support_bracket(geom) * 2.0;
      auto res = unprojected_fixed_point(geom, symmetric_grid(span, cfg.grid_points));
      model = res.total;
      converged = res.converged;
      json diag;
      diag["converged"] = res.converged;
      diag["worst_iterations"] = res.worst_iterations;
      diag["residuals"] = res.residual_history;
      write_text_file(cfg.out_dir / "solver_diagnostics.json", diag.dump(2) + "\n");
    }
    CsvTable t;
    t.header = {"xi", "density", "component"};
    double lo = model.support.front().lo, hi = model.support.back().hi;
    for (int i = 0; i < cfg.grid_points; ++i) {
      double xi = lo + (hi - lo) * double(i) / double(cfg.grid_points - 1);
      t.add_row({format_double(xi), format_double(model.density(xi)), "total"});
    }
    write_text_file(cfg.out_dir / "theory.csv", t.to_string());
    write_manifest(cfg, cfg.out_dir);
    return converged ? kExitOk : kExitNonConvergence;
  }
  json diagnostics;
  for (int q_a : sectors_to_run(cfg)) {
    SectorGeometry geom = geom_of(cfg, q_a);
    auto models = theory_models(geom, cfg.theory, cfg.grid_points);
    CsvTable t;
    t.header = {"xi", "density", "component"};
    double span = support_bracket(geom);
    int flagged = 0;
    for (const auto& m : models) {
      flagged += int(m.flagged.size());
      for (const auto& iv : m.flagged)
        diagnostics["flagged_intervals"].push_back(
            {{"q_A", q_a}, {"model", m.label}, {"lo", iv.lo}, {"hi", iv.hi}});
    }
    for (int i = 0; i < cfg.grid_points; ++i) {
      double xi = -span + 2.0 * span * double(i) / double(cfg.grid_points - 1);
      double p1 = 0.0, p2 = 0.0;
      for (const auto& m : models) {
        double d = m.density(xi);
        if (m.component == SpectralComponent::kP1)
          p1 += d;
        else if (m.component == SpectralComponent::kP2)
          p2 += d;
      }
      t.add_row({format_double(xi), format_double(p1), "P1"});
      t.add_row({format_double(xi), format_double(p2), "P2"});
      t.add_row({format_double(xi), format_double(p1 + p2), "total"});
    }
    write_text_file(cfg.out_dir / ("theory" + sector_suffix(cfg, q_a) + ".csv"), t.to_string());
    if (flagged > 0)
      std::cerr << "warning: " << flagged << " branch-tracking disagreements flagged (q_A=" << q_a
                << ")\n";
  }
  if (!diagnostics.is_null())
    write_text_file(cfg.out_dir / "solver_diagnostics.json", diagnostics.dump(2) + "\n");
  write_manifest(cfg, cfg.out_dir);
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  json report;
  bool all_pass = true;
  for (int q_a : sectors_to_run(cfg)) {
    SectorGeometry geom = geom_of(cfg, q_a);
    auto mc = run_sample_spectrum(geom, cfg.samples, cfg.seed, cfg.effective_workers(),
                                  cfg.normalize);
    auto models = theory_models(geom, cfg.theory, cfg.grid_points);
    BinnedSpectra mcb = bin_mc_spectrum(mc, cfg.bins);
    BinnedSpectra thb = bin_theory(models, mcb.edges);
    CompareReport rep = compare_binned(mcb, thb, cfg.tolerance_l1);
    bool regime_warn = false;
    for (const auto& m : models) regime_warn = regime_warn || !m.regime_ok;
    json jq;
    jq["q_A"] = q_a;
    jq["tolerance_l1"] = cfg.tolerance_l1;
    jq["regime_warning"] = regime_warn;
    for (const auto& row : rep.rows) {
      std::cout << "q_A=" << q_a << "  " << row.component << "  L1=" << row.l1
                << "  KS=" << row.ks << "  " << (row.pass ? "pass" : "FAIL") << "\n";
      jq["rows"].push_back({{"component", row.component},
                            {"l1", row.l1},
                            {"ks", row.ks},
                            {"pass", row.pass}});
    }
    if (regime_warn)
      std::cerr << "warning: theory regime preconditions violated for q_A=" << q_a << "\n";
    report["sectors"].push_back(jq);
    all_pass = all_pass && rep.pass;
  }
  report["pass"] = all_pass;
  write_text_file(cfg.out_dir / "compare.json", report.dump(2) + "\n");
  write_manifest(cfg, cfg.out_dir);
  return all_pass ? kExitOk : kExitCompareFail;
}

int cmd_phase_diagram(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  auto grid = phase_scan(cfg.phase_r1_cells, cfg.phase_y_cells, cfg.phase_y_min, cfg.phase_y_max,
                         cfg.nu_a, cfg.nu);
  CsvTable t;
  t.header = {"r1", "NB_over_NA", "label", "dashed_value", "red_curve_value"};
  for (const auto& c : grid.cells)
    t.add_row({format_double(c.r1), format_double(c.nb_over_na), to_string(c.label),
               format_double(c.dashed_value), format_double(c.red_curve_value)});
  write_text_file(cfg.out_dir / "phase_diagram.csv", t.to_string());
  write_manifest(cfg, cfg.out_dir);
  return kExitOk;
}

int cmd_moments(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  CsvTable t;
  t.header = {"q_A", "moment", "mc_mean", "mc_stderr", "predicted", "z_score"};
  for (int q_a : sectors_to_run(cfg)) {
    SectorGeometry geom = geom_of(cfg, q_a);
    double la = double(geom.dim_a()), lb = double(geom.dim_b());
    auto mc = run_sample_spectrum(geom, cfg.samples, cfg.seed, cfg.effective_workers(),
                                  cfg.normalize);
    double pred2 = 1.0 / la + 1.0 / lb;
    double pred3 = 1.0 / (lb * lb) + 3.0 / (la * lb) + 1.0 / (la * la);
    auto z = [](const EnsembleStats& s, double pred) {
      return s.std_error > 0.0 ? (s.mean - pred) / s.std_error : 0.0;
    };
    t.add_row({std::to_string(q_a), "tr_rho2", format_double(mc.tr_rho2.mean),
               format_double(mc.tr_rho2.std_error), format_double(pred2),
               format_double(z(mc.tr_rho2, pred2))});
    t.add_row({std::to_string(q_a), "tr_rho3", format_double(mc.tr_rho3.mean),
               format_double(mc.tr_rho3.std_error), format_double(pred3),
               format_double(z(mc.tr_rho3, pred3))});
    std::cout << "q_A=" << q_a << "  tr_rho2 mc=" << mc.tr_rho2.mean << " pred=" << pred2
              << " z=" << z(mc.tr_rho2, pred2) << "\n";
    std::cout << "q_A=" << q_a << "  tr_rho3 mc=" << mc.tr_rho3.mean << " pred=" << pred3
              << " z=" << z(mc.tr_rho3, pred3) << "\n";
  }
  write_text_file(cfg.out_dir / "moments.csv", t.to_string());
  write_manifest(cfg, cfg.out_dir);
  return kExitOk;
}

int cmd_mutual_info(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  CsvTable t;
  t.header = {"group", "N_A1", "N_A2", "N_B", "regime", "mutual_information", "boundary"};
  if (cfg.symmetry.is_zr()) {
    MutualInfo mi = mutual_information_zr(cfg.symmetry, cfg.n_a1, cfg.n_a2, cfg.n_b);
    t.add_row({cfg.symmetry.name(), std::to_string(cfg.n_a1), std::to_string(cfg.n_a2),
               std::to_string(cfg.n_b), std::to_string(mi.regime),
               format_double(to_log_base(mi.nats, cfg.log_base)), mi.boundary ? "1" : "0"});
  } else {
    ThermoPoint p(cfg.n_a1, cfg.n_a2, cfg.n_b, cfg.nu_a, cfg.nu);
    MutualInfo mi = mutual_information_u1(p);
    t.add_row({"U1", std::to_string(cfg.n_a1), std::to_string(cfg.n_a2), std::to_string(cfg.n_b),
               std::to_string(mi.regime), format_double(to_log_base(mi.nats, cfg.log_base)),
               mi.boundary ? "1" : "0"});
  }
  write_text_file(cfg.out_dir / "mutual_info.csv", t.to_string());
  write_manifest(cfg, cfg.out_dir);
  std::cout << read_text_file(cfg.out_dir / "mutual_info.csv");
  return kExitOk;
}

int cmd_circuit_demo(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  int n_a = cfg.n_a1 + cfg.n_a2;
  std::vector<int> b_sites(cfg.n_b);
  for (int i = 0; i < cfg.n_b; ++i) b_sites[i] = n_a + i;
  CsvTable t;
  t.header = {"shot", "round", "modulus", "outcome", "probability"};
  double min_fidelity = 1.0;
  for (int shot = 0; shot < cfg.shots; ++shot) {
    PhiloxRng state_rng(cfg.seed, 2 * std::uint64_t(shot));
    PhiloxRng meas_rng(cfg.seed, 2 * std::uint64_t(shot) + 1);
    StateVector psi =
        random_symmetric_state(cfg.symmetry, n_a, cfg.n_b, cfg.total_charge, state_rng);
    MeasurementRecord rec = cfg.symmetry.is_zr()
                                ? measure_charge_zr(psi, b_sites, cfg.symmetry.R, meas_rng)
                                : measure_charge_u1(psi, b_sites, meas_rng);
    for (const auto& r : rec.rounds)
      t.add_row({std::to_string(shot), std::to_string(r.round), std::to_string(r.modulus),
                 std::to_string(r.outcome), format_double(r.probability)});
    StateVector projected = apply_charge_projector(cfg.symmetry, psi, b_sites, rec.final_charge);
    double fid = std::norm(projected.amp.dot(rec.post_state.amp));
    min_fidelity = std::min(min_fidelity, fid);
    if (shot == 0) {
      std::cout << "shot 0: measured q_B=" << rec.final_charge << " in " << rec.rounds.size()
                << " round(s), projector fidelity " << fid << "\n";
      for (const auto& r : rec.rounds)
        std::cout << "  round " << r.round << ": charge = " << r.outcome << " (mod " << r.modulus
                  << "), p = " << r.probability << "\n";
      if (cfg.dump_state) {
        // little-endian binary: uint32 R, uint32 n_sites, int32 charge,
        // then interleaved re/im doubles
        std::string blob;
        auto put = [&blob](const void* p, std::size_t n) {
          blob.append(reinterpret_cast<const char*>(p), n);
        };
        std::uint32_t r32 = std::uint32_t(rec.post_state.r);
        std::uint32_t n32 = std::uint32_t(rec.post_state.n_sites);
        std::int32_t q32 = std::int32_t(rec.final_charge);
        put(&r32, 4);
        put(&n32, 4);
        put(&q32, 4);
        for (Eigen::Index i = 0; i < rec.post_state.amp.size(); ++i) {
          double re = rec.post_state.amp(i).real(), im = rec.post_state.amp(i).imag();
          put(&re, 8);
          put(&im, 8);
        }
        write_text_file(cfg.out_dir / "post_state.bin", blob);
      }
    }
  }
  std::cout << "minimum projector fidelity over " << cfg.shots << " shot(s): " << min_fidelity
            << "\n";
  write_text_file(cfg.out_dir / "shots.csv", t.to_string());
  write_manifest(cfg, cfg.out_dir);
  return min_fidelity >= 1.0 - 1e-10 ? kExitOk : kExitNonConvergence;
}

}  // namespace symneg
