// SPDX-License-Identifier: Apache-2.0
#include "symneg/negativity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symneg {

const PtSector* PtLayout::find(int q1, int q2) const {
  for (const auto& s : sectors)
    if (s.q1 == q1 && s.q2 == q2) return &s;
  return nullptr;
}

PtLayout pt_support(const SectorGeometry& geom) {
  PtLayout layout;
  int hi1 = geom.spec.is_zr() ? geom.spec.R - 1 : geom.n_a1;
  int hi2 = geom.spec.is_zr() ? geom.spec.R - 1 : geom.n_a2;
  for (int q1 = 0; q1 <= hi1; ++q1) {
    for (int q2 = 0; q2 <= hi2; ++q2) {
      std::int64_t d1 = geom.dim_a1(q1);
      std::int64_t d2 = geom.dim_a2(q2);
      if (d1 <= 0 || d2 <= 0) continue;
      if (geom.dim_a1(geom.qbar(q2)) <= 0 || geom.dim_a2(geom.qbar(q1)) <= 0) continue;
      layout.sectors.push_back({q1, q2, d1, d2, layout.total_dim});
      layout.total_dim += d1 * d2;
    }
  }
  return layout;
}

namespace {

// offset of split s inside rho's own basis
std::vector<std::int64_t> split_offsets(const std::vector<SectorSplit>& layout) {
  std::vector<std::int64_t> off(layout.size());
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    off[i] = acc;
    acc += layout[i].dim();
  }
  return off;
}

}  // namespace

PtMatrix embed_in_pt_support(const BlockDensityMatrix& rho) {
  PtLayout layout = pt_support(rho.geom);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(layout.total_dim, layout.total_dim);
  std::int64_t src_row = 0;
  for (std::size_t si = 0; si < rho.layout.size(); ++si) {
    const auto& s = rho.layout[si];
    const PtSector* ps = layout.find(s.q1, s.q2);
    if (!ps) throw std::logic_error("split missing from PT support");
    std::int64_t src_col = 0;
    for (std::size_t ti = 0; ti < rho.layout.size(); ++ti) {
      const auto& t = rho.layout[ti];
      const PtSector* pt = layout.find(t.q1, t.q2);
      out.block(ps->offset, pt->offset, s.dim(), t.dim()) =
          rho.rho.block(src_row, src_col, s.dim(), t.dim());
      src_col += t.dim();
    }
    src_row += s.dim();
  }
  return {rho.geom, std::move(layout), std::move(out)};
}

PtMatrix partial_transpose(const PtMatrix& m) {
  const PtLayout& L = m.layout;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(L.total_dim, L.total_dim);
  // element ((q1,i1),(q2,i2)) x ((r1,j1),(r2,j2)) of the output comes from
  // ((q1,i1),(r2,j2)) x ((r1,j1),(q2,i2)) of the input
  for (const auto& S : L.sectors) {
    for (const auto& T : L.sectors) {
      const PtSector* src_row = L.find(S.q1, T.q2);
      const PtSector* src_col = L.find(T.q1, S.q2);
      if (!src_row || !src_col) continue;
      for (std::int64_t i1 = 0; i1 < S.dim_a1; ++i1)
        for (std::int64_t i2 = 0; i2 < S.dim_a2; ++i2)
          for (std::int64_t j1 = 0; j1 < T.dim_a1; ++j1)
            for (std::int64_t j2 = 0; j2 < T.dim_a2; ++j2)
              out(S.offset + i1 * S.dim_a2 + i2, T.offset + j1 * T.dim_a2 + j2) =
                  m.mat(src_row->offset + i1 * src_row->dim_a2 + j2,
                        src_col->offset + j1 * src_col->dim_a2 + i2);
    }
  }
  return {m.geom, L, std::move(out)};
}

PtMatrix partial_transpose(const BlockDensityMatrix& rho) {
  return partial_transpose(embed_in_pt_support(rho));
}

PtBlockDecomposition decompose_pt(const BlockDensityMatrix& rho) {
  PtBlockDecomposition out;
  out.geom = rho.geom;
  auto offs = split_offsets(rho.layout);
  // diagonal blocks: ordinary two-party PT of each split's diagonal sub-block
  for (std::size_t si = 0; si < rho.layout.size(); ++si) {
    const auto& s = rho.layout[si];
    Eigen::MatrixXcd m(s.dim(), s.dim());
    auto B = rho.rho.block(offs[si], offs[si], s.dim(), s.dim());
    for (std::int64_t i1 = 0; i1 < s.dim_a1; ++i1)
      for (std::int64_t i2 = 0; i2 < s.dim_a2; ++i2)
        for (std::int64_t j1 = 0; j1 < s.dim_a1; ++j1)
          for (std::int64_t j2 = 0; j2 < s.dim_a2; ++j2)
            m(i1 * s.dim_a2 + i2, j1 * s.dim_a2 + j2) = B(i1 * s.dim_a2 + j2, j1 * s.dim_a2 + i2);
    out.diagonal_blocks.push_back({s.q1, std::move(m)});
  }
  // each unordered split pair (s, t) feeds one coupled off-diagonal block
  // between PT sectors (s1, tbar1) and (t1, sbar1)
  for (std::size_t si = 0; si < rho.layout.size(); ++si) {
    for (std::size_t ti = si + 1; ti < rho.layout.size(); ++ti) {
      const auto& s = rho.layout[si];
      const auto& t = rho.layout[ti];
      auto B = rho.rho.block(offs[si], offs[ti], s.dim(), t.dim());
      Eigen::MatrixXcd m(s.dim_a1 * t.dim_a2, t.dim_a1 * s.dim_a2);
      for (std::int64_t i1 = 0; i1 < s.dim_a1; ++i1)
        for (std::int64_t i2 = 0; i2 < s.dim_a2; ++i2)
          for (std::int64_t j1 = 0; j1 < t.dim_a1; ++j1)
            for (std::int64_t j2 = 0; j2 < t.dim_a2; ++j2)
              m(i1 * t.dim_a2 + j2, j1 * s.dim_a2 + i2) = B(i1 * s.dim_a2 + i2, j1 * t.dim_a2 + j2);
      out.paired_blocks.push_back({s.q1, t.q2, std::move(m)});
    }
  }
  return out;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::vector<double> singular_values(const Eigen::MatrixXcd& m) {
  // Gram-matrix route on the smaller side; accurate far below the spectral
  // scales probed anywhere in the pipeline
  Eigen::MatrixXcd g;
  if (m.rows() <= m.cols())
    g = m * m.adjoint();
  else
    g = m.adjoint() * m;
  g = ((g + g.adjoint()) / 2.0).eval();
  Eigen::VectorXd ev = hermitian_eigenvalues(g);
  std::vector<double> out(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) out[i] = std::sqrt(std::max(0.0, ev(i)));
  return out;
}

NegativitySpectrum pt_spectrum(const PtBlockDecomposition& blocks) {
  NegativitySpectrum out;
  for (const auto& d : blocks.diagonal_blocks) {
    Eigen::VectorXd ev = hermitian_eigenvalues(d.mat);
    out.p2_eigenvalues.insert(out.p2_eigenvalues.end(), ev.data(), ev.data() + ev.size());
  }
  for (const auto& p : blocks.paired_blocks) {
    auto sv = singular_values(p.coupling);
    for (double s : sv) {
      out.p1_eigenvalues.push_back(s);
      out.p1_eigenvalues.push_back(-s);
    }
    out.structural_zero_count += std::abs(p.coupling.rows() - p.coupling.cols());
  }
  return out;
}

NegativitySpectrum pt_spectrum(const BlockDensityMatrix& rho) {
  return pt_spectrum(decompose_pt(rho));
}

double negativity_from_eigenvalues(std::span<const double> eigs) {
  std::vector<double> neg;
  neg.reserve(eigs.size());
  for (double x : eigs)
    if (x < -kEigenvalueClamp) neg.push_back(-x);
  std::sort(neg.begin(), neg.end());
  double out = 0.0;
  for (double x : neg) out += x;
  return out;
}

namespace {

double trace_norm(const NegativitySpectrum& s) {
  std::vector<double> mags;
  mags.reserve(s.p1_eigenvalues.size() + s.p2_eigenvalues.size());
  for (double x : s.p1_eigenvalues)
    if (std::abs(x) > kEigenvalueClamp) mags.push_back(std::abs(x));
  for (double x : s.p2_eigenvalues)
    if (std::abs(x) > kEigenvalueClamp) mags.push_back(std::abs(x));
  std::sort(mags.begin(), mags.end());
  double out = 0.0;
  for (double x : mags) out += x;
  return out;
}

}  // namespace

double negativity(const BlockDensityMatrix& rho) {
  auto s = pt_spectrum(rho);
  std::vector<double> all(s.p1_eigenvalues);
  all.insert(all.end(), s.p2_eigenvalues.begin(), s.p2_eigenvalues.end());
  return negativity_from_eigenvalues(all);
}

double log_negativity(const BlockDensityMatrix& rho) {
  return std::log(trace_norm(pt_spectrum(rho)));
}

double symmetry_averaged_logneg(const std::map<int, double>& per_sector,
                                const std::map<int, double>& weights) {
  double wsum = 0.0;
  for (auto& [q, w] : weights) wsum += w;
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("symmetry_averaged_logneg: weights do not sum to 1");
  double out = 0.0;
  for (auto& [q, w] : weights) {
    if (w == 0.0) continue;
    auto it = per_sector.find(q);
    if (it == per_sector.end())
      throw std::invalid_argument("symmetry_averaged_logneg: missing sector " + std::to_string(q));
    out += w * it->second;
  }
  return out;
}

double Histogram::integral() const {
  double out = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) out += density[i] * bin_width(i);
  return out;
}

double Histogram::negativity_estimate() const {
  double out = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    double c = 0.5 * (edges[i] + edges[i + 1]);
    if (c < 0.0) out -= c * density[i] * bin_width(i);
  }
  return out;
}

Histogram spectrum_histogram(std::span<const double> values, const HistogramSpec& spec,
                             double weight_per_value) {
  if (values.empty()) throw std::invalid_argument("spectrum_histogram: no eigenvalues");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double lo = spec.explicit_range ? spec.lo : sorted.front();
  double hi = spec.explicit_range ? spec.hi : sorted.back();
  if (spec.explicit_range && !(hi > lo))
    throw std::invalid_argument("spectrum_histogram: zero-width binning");
  if (!(hi > lo)) hi = lo + 1.0;  // degenerate single-point spectrum
  int bins = spec.bins;
  if (bins <= 0) {
    // Freedman-Diaconis
    double q1 = sorted[std::size_t(0.25 * double(sorted.size() - 1))];
    double q3 = sorted[std::size_t(0.75 * double(sorted.size() - 1))];
    double width = 2.0 * (q3 - q1) / std::cbrt(double(sorted.size()));
    bins = width > 0.0 ? int(std::ceil((hi - lo) / width)) : 64;
    bins = std::clamp(bins, 8, 2048);
  }
  if (!(hi > lo)) throw std::invalid_argument("spectrum_histogram: zero-width binning");
  Histogram h;
  h.edges.resize(bins + 1);
  h.density.assign(bins, 0.0);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * double(i) / bins;
  double w = (hi - lo) / bins;
  if (w <= 0.0) throw std::invalid_argument("spectrum_histogram: zero-width binning");
  for (double x : values) {
    if (x < lo || x > hi) continue;
    int b = std::min(bins - 1, int((x - lo) / w));
    h.density[b] += weight_per_value / w;
  }
  return h;
}

}  // namespace symneg
