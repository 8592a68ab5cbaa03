// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "symneg/ensemble.hpp"
#include "symneg/rng.hpp"

using namespace symneg;

namespace {

SectorGeometry z2_geom(int n_a1, int n_a2, int n_b) {
  return SectorGeometry(SymmetrySpec::zr(2), n_a1, n_a2, n_b, 0, 0);
}

}  // namespace

TEST_CASE("sample_block determinism and layout") {
  SectorGeometry g = z2_geom(2, 2, 3);
  auto b1 = sample_block(g, 17, 123);
  auto b2 = sample_block(g, 17, 123);
  CHECK((b1.x - b2.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b1.x.rows() == g.dim_a());
  CHECK(b1.x.cols() == g.dim_b());
  auto b3 = sample_block(g, 18, 123);
  CHECK((b1.x - b3.x).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("trace normalization on average") {
  SectorGeometry g = z2_geom(2, 2, 3);
  const int n = 10000;
  std::vector<double> traces(n);
  for (int i = 0; i < n; ++i)
    traces[i] = sample_block(g, i, 7).x.squaredNorm();
  double mean = pairwise_sum(traces) / n;
  double var = 0.0;
  for (double t : traces) var += (t - mean) * (t - mean);
  var /= (n - 1);
  double sigma = std::sqrt(var / n);
  CHECK(std::abs(mean - 1.0) < 3.0 * sigma);
}

TEST_CASE("entry variance matches 1/(L_A L_B)") {
  // L_{q_A} = L_{q_B} = 8 at Z2 with N_A = 4, N_B = 4
  SectorGeometry g = z2_geom(2, 2, 4);
  REQUIRE(g.dim_a() == 8);
  REQUIRE(g.dim_b() == 8);
  double acc = 0.0;
  std::size_t count = 0;
  for (int i = 0; i < 1600; ++i) {
    auto b = sample_block(g, i, 99);
    acc += b.x.squaredNorm();
    count += std::size_t(b.x.size());
  }
  CHECK(acc / double(count) == doctest::Approx(1.0 / 64).epsilon(0.05));
}

TEST_CASE("build_rho basics") {
  SectorGeometry g(SymmetrySpec::u1(), 1, 1, 2, 1, 1);
  SUBCASE("pure projector from a single column") {
    GaussianBlock b{g, Eigen::MatrixXcd::Zero(2, 1), 0, 0};
    b.x(0, 0) = 1.0;
    auto rho = build_rho(b);
    CHECK(rho.rho(0, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(rho.rho(1, 1)) == doctest::Approx(0.0));
    CHECK(renyi_moment(rho, 5) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("gram positivity and exact hermiticity") {
    for (int i = 0; i < 20; ++i) {
      auto rho = build_rho(sample_block(g, i, 3));
      CHECK((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.rho, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues()(0) >= -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("normalize flag gives exact unit trace") {
    auto rho = build_rho(sample_block(g, 0, 3), true);
    CHECK(rho.rho.real().trace() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rank-1 Wishart eigenvalue law at L_A=2, L_B=1") {
  // oracle: independent generator (std::mt19937) for the same ensemble
  SectorGeometry g(SymmetrySpec::u1(), 1, 1, 1, 1, 1);
  REQUIRE(g.dim_a() == 2);
  REQUIRE(g.dim_b() == 1);
  const int n = 20000;
  std::vector<double> ours, reference;
  for (int i = 0; i < n; ++i) {
    auto rho = build_rho(sample_block(g, i, 11));
    // rank-1: nonzero eigenvalue equals the trace
    ours.push_back(rho.rho.real().trace());
  }
  std::mt19937 gen(4321);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5 / 2.0));
  for (int i = 0; i < n; ++i) {
    double t = 0.0;
    for (int k = 0; k < 2; ++k) {
      double re = nd(gen), im = nd(gen);
      t += re * re + im * im;
    }
    reference.push_back(t);
  }
  std::sort(ours.begin(), ours.end());
  std::sort(reference.begin(), reference.end());
  // two-sample KS
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ours.size() && j < reference.size()) {
    if (ours[i] <= reference[j])
      ++i;
    else
      ++j;
    ks = std::max(ks, std::abs(double(i) / n - double(j) / n));
  }
  CHECK(ks < 1.95 * std::sqrt(2.0 / n));  // ~5 sigma-ish two-sample bound
}

TEST_CASE("ensemble moments match the diagrammatic results") {
  SUBCASE("second moment at (27, 27)") {
    SectorGeometry g(SymmetrySpec::zr(3), 2, 2, 4, 0, 0);
    REQUIRE(g.dim_a() == 27);
    REQUIRE(g.dim_b() == 27);
    auto stats = ensemble_run(
        g, 2000, [](const BlockDensityMatrix& r) { return renyi_moment(r, 2); }, 5, 2);
    CHECK(std::abs(stats.mean - 2.0 / 27) < 3.0 * stats.std_error);
  }
  SUBCASE("third moment at (4, 8)") {
    SectorGeometry g = z2_geom(2, 1, 4);
    REQUIRE(g.dim_a() == 4);
    REQUIRE(g.dim_b() == 8);
    auto stats = ensemble_run(
        g, 4000, [](const BlockDensityMatrix& r) { return renyi_moment(r, 3); }, 5, 2);
    CHECK(std::abs(stats.mean - 0.171875) < 3.0 * stats.std_error);
  }
}

TEST_CASE("predicted dominant-diagram moments") {
  SUBCASE("B-dominant limit") {
    SectorGeometry g = z2_geom(3, 3, 13);
    REQUIRE(g.dim_a() == 32);
    REQUIRE(g.dim_b() == 4096);
    auto p = predicted_moment(g, 3, MomentRegime::kBDominant);
    CHECK(p.value == doctest::Approx(1.0 / 1024).epsilon(1e-12));
    CHECK(p.regime_ok);
  }
  SUBCASE("A-dominant limit") {
    SectorGeometry g = z2_geom(6, 7, 6);
    REQUIRE(g.dim_a() == 4096);
    REQUIRE(g.dim_b() == 32);
    auto p = predicted_moment(g, 3, MomentRegime::kADominant);
    CHECK(p.value == doctest::Approx(std::pow(32.0, -2)).epsilon(1e-12));
    CHECK(p.regime_ok);
  }
  SUBCASE("PT large-B sum collapses to L_A^(1-n)") {
    SectorGeometry g = z2_geom(2, 2, 11);
    for (int n : {2, 3, 4, 5}) {
      auto p = predicted_moment(g, n, MomentRegime::kPtLargeB);
      CHECK(p.value == doctest::Approx(std::pow(double(g.dim_a()), 1.0 - n)).epsilon(1e-10));
    }
  }
  SUBCASE("regime flag trips outside validity") {
    SectorGeometry g = z2_geom(3, 3, 2);
    CHECK_FALSE(predicted_moment(g, 3, MomentRegime::kBDominant).regime_ok);
  }
  SUBCASE("odd n rejected for PT diagram families") {
    SectorGeometry g = z2_geom(2, 2, 3);
    CHECK_THROWS_AS((void)predicted_moment(g, 3, MomentRegime::kPtLargeA1),
                    std::invalid_argument);
  }
}

TEST_CASE("ensemble_run workers do not change the result") {
  SectorGeometry g = z2_geom(2, 2, 3);
  auto stat = [](const BlockDensityMatrix& r) { return renyi_moment(r, 2); };
  auto s1 = ensemble_run(g, 400, stat, 31, 1);
  auto s8 = ensemble_run(g, 400, stat, 31, 8);
  CHECK(s1.mean == s8.mean);  // bit identical
  CHECK(s1.std_error == s8.std_error);
  auto other_seed = ensemble_run(g, 400, stat, 32, 2);
  CHECK(s1.mean != other_seed.mean);
}

TEST_CASE("ensemble_run propagates statistic failures with the sample index") {
  SectorGeometry g = z2_geom(1, 1, 2);
  auto bad = [](const BlockDensityMatrix&) -> double { throw std::runtime_error("boom"); };
  CHECK_THROWS_WITH_AS(ensemble_run(g, 3, bad, 1, 1),
                       "statistic failed at sample 0: boom", std::runtime_error);
}

TEST_CASE("mean trace over the ensemble is 1") {
  SectorGeometry g = z2_geom(2, 1, 3);
  auto stats = ensemble_run(
      g, 1000, [](const BlockDensityMatrix& r) { return r.rho.real().trace(); }, 13, 2);
  CHECK(std::abs(stats.mean - 1.0) < 3.0 * stats.std_error);
}
