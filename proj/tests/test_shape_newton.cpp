#include <catch_amalgamated.hpp>

#include <random>

#include "cauchyfm/oracles.hpp"
#include "cauchyfm/shape_newton.hpp"

using namespace cauchyfm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CauchyPair clean_data() {
  SynthesisSetup s;
  s.obstacle = PolygonBoundary(example_polygon());
  s.n_outer = 32;
  s.n_obstacle = 128;
  s.grading_p = 3.0;
  s.refine = 2;
  return synthesize_cauchy(s, newton_boundary_data(32), 0.0, 1);
}

double max_corner_error(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double e = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) e = std::max(e, norm(a[l] - b[l]));
  return e;
}

}  // namespace

TEST_CASE("corner packing round-trips", "[newton]") {
  const auto c = example_polygon();
  const Eigen::VectorXd v = pack_corners(c);
  CHECK(v(1) == 1.5);
  CHECK(v(4) == -0.75);
  CHECK(unpack_corners(v) == c);
}

TEST_CASE("corner hats peak at their corner and vanish off their panels", "[newton]") {
  const PolygonBoundary poly(example_polygon());
  for (std::size_t l = 0; l < 4; ++l) {
    CHECK(corner_hat(poly, l, poly.corner_param(l)) == 1.0);
    CHECK(corner_hat(poly, l, poly.corner_param((l + 2) % 4) + 0.3) == 0.0);
  }
  for (double t : {0.1, 1.0, 2.2, 4.0, 6.0}) {
    double sum = 0.0;
    for (std::size_t l = 0; l < 4; ++l) sum += corner_hat(poly, l, t);
    CHECK_THAT(sum, WithinAbs(1.0, 1e-14));
  }
  const GradedMesh mesh = build_graded_mesh(poly, 64, 3.0);
  const Eigen::MatrixXd q = corner_basis(poly, mesh);
  REQUIRE(q.cols() == 8);
  // Corner 0 touches panels 3 and 0 only; panel 1 holds nodes 32..63.
  CHECK(q.col(0).segment(32, 64).cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.col(4).segment(32, 64).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward map at the true corners matches same-mesh synthesis", "[newton]") {
  NewtonParams p;
  p.n_obstacle = 128;
  p.grading_p = 3.0;
  SynthesisSetup s;
  s.obstacle = PolygonBoundary(example_polygon());
  s.n_outer = 32;
  s.n_obstacle = 128;
  s.grading_p = 3.0;
  s.refine = 1;
  const Eigen::VectorXd f = newton_boundary_data(32);
  const CauchyPair d = synthesize_cauchy(s, f, 0.0, 1);
  CHECK((forward_map(example_polygon(), p, f) - d.neumann).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Jacobian columns match forward differences", "[newton][oracle]") {
  const NewtonParams p;
  const auto err = jacobian_fd_errors(example_polygon(), p, newton_boundary_data(p.n_outer));
  REQUIRE(err.size() == 8);
  for (double e : err) CHECK(e <= 1e-3);
}

TEST_CASE("reciprocity and collocation Jacobians agree to discretization error", "[newton]") {
  NewtonParams p;
  p.n_obstacle = 256;
  const Eigen::VectorXd f = newton_boundary_data(p.n_outer);
  const Eigen::MatrixXd jr = jacobian(example_polygon(), p, f);
  p.jacobian_form = JacobianForm::Collocation;
  const Eigen::MatrixXd jc = jacobian(example_polygon(), p, f);
  CHECK((jr - jc).norm() / jr.norm() <= 5e-2);
  CHECK(std::string(to_string(p.jacobian_form)) == "collocation");
}

TEST_CASE("domain derivative is linear in the displacement", "[newton]") {
  NewtonParams p;
  p.n_obstacle = 128;
  const Eigen::VectorXd f = newton_boundary_data(p.n_outer);
  const Eigen::MatrixXd j = jacobian(example_polygon(), p, f);
  Eigen::VectorXd dp = Eigen::VectorXd::Zero(8);
  dp(1) = 0.3;
  dp(6) = -0.2;
  CHECK((domain_derivative(example_polygon(), p, f, dp) - (0.3 * j.col(1) - 0.2 * j.col(6))).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(domain_derivative(example_polygon(), p, f, Eigen::VectorXd::Zero(3)), ConfigError);
}

TEST_CASE("Tikhonov step solves the regularized normal equations", "[newton]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd j(12, 4);
  for (Eigen::Index a = 0; a < j.size(); ++a) j.data()[a] = nd(rng);
  Eigen::VectorXd r(12), w(12);
  for (Eigen::Index a = 0; a < 12; ++a) {
    r(a) = nd(rng);
    w(a) = 0.5 + 0.1 * static_cast<double>(a);
  }
  const double alpha = 0.3;
  const Eigen::VectorXd x = tikhonov_step(j, r, w, alpha);
  const Eigen::MatrixXd a = alpha * Eigen::MatrixXd::Identity(4, 4) + j.transpose() * w.asDiagonal() * j;
  CHECK((a * x - j.transpose() * w.asDiagonal() * r).norm() <= 1e-12);
  // Larger alpha damps the step monotonically.
  double last = INFINITY;
  for (double al : {1e-6, 1e-3, 1e-1, 10.0, 1e3}) {
    const double n = tikhonov_step(j, r, w, al).norm();
    CHECK(n < last);
    last = n;
  }
  // Scalar case in closed form.
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  CHECK_THAT(tikhonov_step(2.0 * one, 3.0 * one, 0.5 * one, 1.0)(0), WithinRel(3.0 / 3.0, 1e-15));
  CHECK_THROWS_AS(tikhonov_step(j, r, w, -1.0), ConfigError);
  CHECK_THROWS_AS(tikhonov_step(j, r.head(3), w, 1.0), ConfigError);
}

TEST_CASE("Newton stays put when started at the true polygon", "[newton]") {
  NewtonParams p;
  p.max_iters = 3;
  const NewtonState st = newton_run(example_polygon(), clean_data(), p);
  REQUIRE_FALSE(st.aborted);
  REQUIRE(st.history.size() <= p.max_iters + 1);
  for (const auto& r : st.history) CHECK(r.step_inf <= 1e-3);
  CHECK(max_corner_error(st.corners, example_polygon()) <= 1e-3);
}

TEST_CASE("Newton recovers the four-corner polygon from the standard guess", "[newton]") {
  NewtonParams p;
  p.alpha = 1e-3;
  p.alpha0 = 1e-4;
  p.max_iters = 20;
  const NewtonState st = newton_run({{0.3, -0.7}, {1.7, -0.7}, {1.7, 0.7}, {0.3, 0.7}}, clean_data(), p);
  REQUIRE_FALSE(st.aborted);
  CHECK(st.history.size() == 21);
  CHECK(st.history.back().residual < 0.1 * st.history.front().residual);
  CHECK(max_corner_error(st.corners, example_polygon()) <= 0.05);
}

TEST_CASE("five-corner run reduces the residual tenfold", "[newton]") {
  NewtonParams p;
  p.alpha = 1e-4;
  p.alpha0 = 1e-5;
  p.max_iters = 50;
  p.n_obstacle = 260;
  const NewtonState st = newton_run({{0, -0.8}, {0.9, -1}, {1.6, -0.9}, {1.5, 0.8}, {0.3, 0.5}}, clean_data(), p);
  REQUIRE_FALSE(st.aborted);
  CHECK(st.history.back().residual <= 0.1 * st.history.front().residual);
}

TEST_CASE("Newton aborts on inadmissible polygons", "[newton]") {
  const NewtonParams p;
  const CauchyPair d = clean_data();
  const NewtonState band = newton_run({{0, -0.5}, {4.9, 0}, {0, 0.5}}, d, p);
  CHECK(band.aborted);
  CHECK(band.history.empty());
  CHECK(band.abort_reason.find("clearance") != std::string::npos);
  const NewtonState tiny = newton_run({{0, 0}, {1e-4, 0}, {1, 1}, {0, 1}}, d, p);
  CHECK(tiny.aborted);
  CHECK(tiny.abort_reason.find("panel") != std::string::npos);
  NewtonParams wrong = p;
  wrong.n_outer = 16;
  CHECK_THROWS_AS(newton_run(example_polygon(), d, wrong), ConfigError);
  wrong = p;
  wrong.gamma_hat = 0.0;
  CHECK_THROWS_AS(newton_run(example_polygon(), d, wrong), ConfigError);
}
