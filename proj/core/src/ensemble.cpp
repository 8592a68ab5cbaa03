// SPDX-License-Identifier: Apache-2.0
#include "symneg/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "symneg/rng.hpp"

namespace symneg {

GaussianBlock sample_block(const SectorGeometry& geom, std::uint64_t sample_index,
                           std::uint64_t master_seed) {
  std::int64_t la = geom.dim_a();
  std::int64_t lb = geom.dim_b();
  if (la <= 0 || lb <= 0) throw std::invalid_argument("sample_block: empty sector");
  double variance = 1.0 / (double(la) * double(lb));
  PhiloxRng rng(master_seed, sample_index);
  Eigen::MatrixXcd x(la, lb);
  for (std::int64_t i = 0; i < la; ++i)
    for (std::int64_t j = 0; j < lb; ++j) x(i, j) = rng.next_complex_gaussian(variance);
  return {geom, std::move(x), master_seed, sample_index};
}

BlockDensityMatrix build_rho(const GaussianBlock& block, bool normalize) {
  Eigen::MatrixXcd rho = block.x * block.x.adjoint();
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  if (normalize) {
    double tr = rho.real().trace();
    if (tr <= 0.0) throw std::runtime_error("build_rho: zero-trace sample");
    rho /= tr;
  }
  return {block.geom, enumerate_splits(block.geom), std::move(rho), normalize};
}

BlockDensityMatrix make_block(const SectorGeometry& geom, Eigen::MatrixXcd rho, bool normalized) {
  auto layout = enumerate_splits(geom);
  std::int64_t dim = 0;
  for (const auto& s : layout) dim += s.dim();
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("make_block: matrix does not match the sector layout");
  return {geom, std::move(layout), std::move(rho), normalized};
}

double renyi_moment(const BlockDensityMatrix& rho, int n) {
  if (n < 1) throw std::invalid_argument("renyi_moment: n >= 1 required");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.rho, Eigen::EigenvaluesOnly);
  double out = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out += std::pow(es.eigenvalues()(i), n);
  return out;
}

namespace {

double log_dim(const SectorGeometry& g, int subsystem, int q) {
  switch (subsystem) {
    case 1: return log_sector_dim(g.spec, g.n_a1, q);
    case 2: return log_sector_dim(g.spec, g.n_a2, q);
    default: throw std::logic_error("bad subsystem");
  }
}

}  // namespace

MomentPrediction predicted_moment(const SectorGeometry& geom, int n, MomentRegime regime) {
  if (n < 1) throw std::invalid_argument("predicted_moment: n >= 1 required");
  double la = std::log(double(geom.dim_a()));
  double lb = std::log(double(geom.dim_b()));
  MomentPrediction out;
  switch (regime) {
    case MomentRegime::kADominant:
      out.value = std::exp((1 - n) * lb);
      out.regime_ok = geom.dim_a() >= 2 * geom.dim_b();
      return out;
    case MomentRegime::kBDominant:
      out.value = std::exp((1 - n) * la);
      out.regime_ok = geom.dim_b() >= 2 * geom.dim_a();
      return out;
    case MomentRegime::kPtLargeB: {
      double sum = 0.0;
      for (const auto& s : enumerate_splits(geom))
        sum += std::exp(std::log(double(s.dim())) - n * la);
      out.value = sum;
      for (const auto& s : enumerate_splits(geom))
        if (double(geom.dim_b()) < 2.0 * double(s.dim())) out.regime_ok = false;
      return out;
    }
    case MomentRegime::kPtLargeA1:
    case MomentRegime::kPtRsbCandidate: {
      if (n % 2 != 0)
        throw std::invalid_argument("partial-transpose diagram predictions need even n");
      const double ln2 = std::log(2.0);
      auto splits = enumerate_splits(geom);
      double sum = 0.0;
      bool ok = true;
      // two independent loop charges: q1 on A1, q2 on A2, with all four of
      // L_{A1,q1}, L_{A2,q2}, L_{A1,qbar2}, L_{A2,qbar1} nonzero
      for (const auto& s : splits) {
        for (const auto& t : splits) {
          int q1 = s.q1, q2 = t.q2;
          double l1 = log_dim(geom, 1, q1);
          double l2 = log_dim(geom, 2, q2);
          double l1bar = log_dim(geom, 1, geom.qbar(q2));
          double l2bar = log_dim(geom, 2, geom.qbar(q1));
          if (regime == MomentRegime::kPtLargeA1) {
            sum += std::exp((n / 2.0) * (l1 + l1bar) + l2 + l2bar - n * la - (n - 1) * lb);
            if (l1 < ln2 + l2 + lb) ok = false;
          } else {
            sum += std::exp(l1 + l2 + (n / 2.0) * (l1bar + l2bar) - n * la - (n / 2.0) * lb);
            if (l1 + l2 - lb < ln2) ok = false;
            if (l2 + lb - l1 < ln2 || l1 + lb - l2 < ln2) ok = false;
          }
        }
      }
      out.value = sum;
      out.regime_ok = ok;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

double pairwise_sum(const std::vector<double>& values) {
  // recursion bottom at 8 consecutive elements
  std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += values[i];
      return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return values.empty() ? 0.0 : rec(0, values.size());
}

namespace detail {

void parallel_for_samples(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  if (workers < 1) workers = 1;
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  auto run = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

EnsembleStats ensemble_run(const SectorGeometry& geom, std::size_t n_samples,
                           const std::function<double(const BlockDensityMatrix&)>& statistic,
                           std::uint64_t master_seed, int workers, bool keep_samples) {
  if (n_samples < 1) throw std::invalid_argument("ensemble_run: n_samples >= 1 required");
  std::vector<double> values(n_samples);
  detail::parallel_for_samples(n_samples, workers, [&](std::size_t i) {
    try {
      values[i] = statistic(build_rho(sample_block(geom, i, master_seed)));
    } catch (const std::exception& e) {
      throw std::runtime_error("statistic failed at sample " + std::to_string(i) + ": " + e.what());
    }
  });
  EnsembleStats stats;
  stats.n_samples = n_samples;
  stats.mean = pairwise_sum(values) / double(n_samples);
  std::vector<double> sq(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    double d = values[i] - stats.mean;
    sq[i] = d * d;
  }
  double var = n_samples > 1 ? pairwise_sum(sq) / double(n_samples - 1) : 0.0;
  stats.std_error = std::sqrt(var / double(n_samples));
  if (keep_samples) stats.samples = std::move(values);
  return stats;
}

}  // namespace symneg
