#include <catch_amalgamated.hpp>

#include "cauchyfm/oracles.hpp"
#include "cauchyfm/spectral_inversion.hpp"

using namespace cauchyfm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

UniformMesh disk5(std::size_t n) { return build_uniform_mesh(circle_curve({0, 0}, 5.0), n); }

CauchyPair polygon_data(std::size_t n_outer, double gamma, double delta) {
  SynthesisSetup s;
  s.obstacle = PolygonBoundary(example_polygon());
  s.n_outer = n_outer;
  s.n_obstacle = 128;
  s.grading_p = 3.0;
  s.gamma = gamma;
  return synthesize_cauchy(s, arc_pattern(2 * n_outer, 0, static_cast<long>(n_outer) - 1), delta, 12345);
}

}  // namespace

TEST_CASE("weighted eigensystem is orthonormal in the quadrature product", "[spectral]") {
  // M = D^{-1} S with S symmetric is self-adjoint in (., .)_D.
  Eigen::MatrixXd s(3, 3);
  s << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Eigen::VectorXd w = Eigen::Vector3d(0.5, 1.0, 2.0);
  const Eigen::MatrixXd m = w.cwiseInverse().asDiagonal() * s;
  const WeightedEigensystem e = weighted_eigs(m, w, 1e-8);
  CHECK(e.asymmetry <= 1e-15);
  REQUIRE(e.kept_count() == 3);
  const Eigen::MatrixXd gram = e.eigenvectors.transpose() * w.asDiagonal() * e.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-13);
  for (Eigen::Index k = 0; k < 3; ++k) {
    CHECK((m * e.eigenvectors.col(k) - e.eigenvalues(k) * e.eigenvectors.col(k)).norm() <= 1e-12);
    if (k > 0) CHECK(std::abs(e.eigenvalues(k)) <= std::abs(e.eigenvalues(k - 1)));
  }
}

TEST_CASE("weighted eigensystem cutoff and input checks", "[spectral]") {
  const Eigen::Vector3d w(1.0, 1.0, 1.0);
  const Eigen::MatrixXd m = Eigen::Vector3d(1.0, 1e-3, 1e-9).asDiagonal();
  CHECK(weighted_eigs(m, w, 1e-8).kept_count() == 2);
  CHECK(weighted_eigs(m, w, 1e-2).kept_count() == 1);
  CHECK(weighted_eigs(m, w, 1e-8).all_eigenvalues.size() == 3);
  CHECK_THROWS_AS(weighted_eigs(m, w, 0.0), ConfigError);
  CHECK_THROWS_AS(weighted_eigs(m, Eigen::Vector3d(1.0, -1.0, 1.0), 1e-8), ConfigError);
  CHECK_THROWS_AS(weighted_eigs(Eigen::MatrixXd::Zero(3, 3), w, 1e-8), NumericalError);
  CHECK(weighted_asymmetry(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 3.0)) == 0.0);
}

TEST_CASE("Picard value of an eigenvector is its eigenvalue", "[spectral]") {
  const Eigen::Vector3d w(1.0, 2.0, 1.0);
  const Eigen::MatrixXd m = Eigen::Vector3d(2.0, 0.5, 0.25).asDiagonal();
  const WeightedEigensystem e = weighted_eigs(m, w, 1e-8);
  for (Eigen::Index k = 0; k < 3; ++k) CHECK_THAT(picard_value(e.eigenvectors.col(k), e), WithinRel(e.eigenvalues(k), 1e-13));
  CHECK(picard_value(Eigen::Vector3d::Zero(), e) == kPicardCap);
  CHECK_THROWS_AS(picard_value(Eigen::Vector2d::Ones(), e), ConfigError);
}

TEST_CASE("DtN difference is self-adjoint with a nonnegative kept spectrum", "[spectral][oracle]") {
  const SelfAdjointness s = self_adjointness(64, 128, 2.0);
  CHECK(s.asymmetry <= 1e-6);
  CHECK(s.min_ratio >= -1e-8);
  CHECK(s.kept > 10);
}

TEST_CASE("obstacle indicator separates inside from outside", "[spectral]") {
  const UniformMesh outer = disk5(32);
  const DtnMatrix l0 = EmptyDiskSolver(outer).dtn();
  const ObstacleSolver s(outer, build_smooth_obstacle_mesh(circle_curve({2, 3}, 0.5), 64));
  const WeightedEigensystem e = weighted_eigs(s.dtn(), l0, 1e-8);
  const DiskGreens g = make_disk_greens({0, 0}, 5.0);
  const IndicatorField in = obstacle_indicator_field(e, {{2.0, 3.0}, {2.2, 3.1}, {1.9, 2.8}}, g, outer);
  const IndicatorField out = obstacle_indicator_field(e, {{-2.0, -1.0}, {0.0, 0.0}, {-1.0, 3.0}}, g, outer);
  CHECK(median(in.values) >= 10.0 * median(out.values));
  CHECK(in.n_outer == 32);
  CHECK_THROWS_AS(obstacle_indicator_field(e, {{6.0, 0.0}}, g, outer), GeometryError);
}

TEST_CASE("gamma estimate takes the first maximum and flags flat scans", "[spectral]") {
  IndicatorField f;
  f.taus = {0.0, 0.5, 1.0, 1.5};
  f.values = {1.0, 5.0, 5.0, 1.0};
  const GammaEstimate e = estimate_gamma(f);
  CHECK(e.gamma_hat == 0.5);
  CHECK(e.index == 1);
  CHECK_THAT(e.peak_to_median, WithinRel(5.0 / 3.0, 1e-15));
  CHECK(e.low_confidence);
  f.values = {1.0, 1.0, 9.0, 1.0};
  CHECK_FALSE(estimate_gamma(f).low_confidence);
  f.values.clear();
  CHECK_THROWS_AS(estimate_gamma(f), ConfigError);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("conductivity scan peaks at the true conductivity", "[spectral]") {
  const UniformMesh outer = disk5(32);
  const DtnMatrix l0 = EmptyDiskSolver(outer).dtn();
  const DtnMatrix lo = ObstacleSolver(outer, build_smooth_obstacle_mesh(circle_curve({0, 0}, 3.0), 64), DtnKind::Sampler).dtn();
  std::vector<double> taus;
  for (int l = 0; l <= 40; ++l) taus.push_back(l / 20.0);
  for (double gamma : {0.5, 1.25}) {
    const CauchyPair d = polygon_data(32, gamma, 0.0);
    const IndicatorField f = conductivity_scan(d, l0, lo, taus, default_cutoff(0.0));
    CHECK_THAT(estimate_gamma(f).gamma_hat, WithinAbs(gamma, 0.05 + 1e-12));
  }
  CHECK(default_cutoff(0.0) == kExactDataCutoff);
  CHECK(default_cutoff(0.02) == 0.02);
  CHECK_THROWS_AS(conductivity_scan(polygon_data(32, 1.0, 0.0), l0, lo, {}, 1e-8), ConfigError);
}

TEST_CASE("domain scan grows once disks cover the obstacle and is thread-independent", "[spectral]") {
  const UniformMesh outer = disk5(32);
  const DtnMatrix l0 = EmptyDiskSolver(outer).dtn();
  const CauchyPair d = polygon_data(32, 1.0, 0.0);
  DomainScanOptions opt;
  opt.sampler_n_half = 32;
  const auto disks = concentric_disks({0, 0}, 5, 30);
  REQUIRE(disks.size() == 26);
  CHECK_THAT(disks.back().radius, WithinAbs(3.0, 1e-15));
  const IndicatorField one = domain_scan(d, 1.0, l0, outer, disks, opt);
  CHECK(one.values.back() >= 10.0 * one.values.front());
  opt.threads = 3;
  const IndicatorField three = domain_scan(d, 1.0, l0, outer, disks, opt);
  CHECK(one.values == three.values);
  CHECK_THROWS_AS(domain_scan(d, 0.0, l0, outer, disks, opt), ConfigError);
}

TEST_CASE("disk grid and color mapping", "[spectral]") {
  const auto g = disk_grid(0.5);
  CHECK(g.size() == 25);
  CHECK(g.front().center == Vec2{-2.0, -2.0});
  CHECK(g.back().center == Vec2{2.0, 2.0});
  CHECK_THROWS_AS(disk_grid(0.0), ConfigError);
  const auto v = color_scalar({1.0, 3.0, 2.0});
  CHECK(v == std::vector<double>{-1.0, 1.0, 0.0});
  CHECK(color_scalar({2.0, 2.0}) == std::vector<double>{0.0, 0.0});
  const Rgb hi = color_ramp(1.0);
  const Rgb lo = color_ramp(-1.0);
  const Rgb mid = color_ramp(0.0);
  CHECK((hi.r == 1.0 && hi.g == 0.0 && hi.b == 0.0));
  CHECK((lo.r == 0.0 && lo.g == 0.0 && lo.b == 1.0));
  CHECK((mid.r == 0.0 && mid.g == 1.0 && mid.b == 0.0));
}
