#pragma once

// Reference geometries and closed-form oracle checks shared by the self-test
// command and the acceptance harness. Every check returns a measured error;
// pass/fail is decided by the caller against a tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyfm/forward_solver.hpp"
#include "cauchyfm/geometry.hpp"
#include "cauchyfm/nystrom.hpp"
#include "cauchyfm/potential_kernels.hpp"
#include "cauchyfm/shape_newton.hpp"
#include "cauchyfm/spectral_inversion.hpp"

namespace cauchyfm {

inline std::vector<Vec2> example_polygon() { return {{0.25, -0.75}, {1.5, -0.5}, {1.5, 0.5}, {0.5, 0.5}}; }

// 0.5 (cos t + 0.65 cos 2t - 0.65, 1.5 sin t) + (2, 1)
inline SmoothCurve kite_curve() {
  return SmoothCurve({2.0 - 0.325, 1.0}, {FourierMode{1, 0.5, 0.0, 0.0, 0.75}, FourierMode{2, 0.325, 0.0, 0.0, 0.0}});
}

inline std::vector<Vec2> regular_polygon(std::size_t n, double radius) {
  std::vector<Vec2> c(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double a = kTwoPi * static_cast<double>(l) / static_cast<double>(n);
    c[l] = {radius * std::cos(a), radius * std::sin(a)};
  }
  return c;
}

// 1 on nodes first..last (indices taken modulo count, last >= first), 0 elsewhere.
inline Eigen::VectorXd arc_pattern(std::size_t count, long first, long last) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
  const long n = static_cast<long>(count);
  for (long j = first; j <= last; ++j) f(((j % n) + n) % n) = 1.0;
  return f;
}

inline Eigen::VectorXd cos_mode(const UniformMesh& mesh, int k) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t j = 0; j < mesh.size(); ++j) f(static_cast<Eigen::Index>(j)) = std::cos(k * mesh.t[j]);
  return f;
}

inline double rel_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) { return (got - want).norm() / want.norm(); }

// ---------------------------------------------------------------------------

// max_k |Lambda_0 cos(k t) - (k/R) cos(k t)| / |(k/R) cos(k t)|, k = 1..k_max.
inline double fourier_dtn_error(std::size_t n_half = 64, double radius = 5.0, int k_max = 8) {
  const auto mesh = build_uniform_mesh(circle_curve({0.0, 0.0}, radius), n_half);
  const auto l0 = EmptyDiskSolver(mesh).dtn();
  double worst = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const Eigen::VectorXd f = cos_mode(mesh, k);
    worst = std::max(worst, rel_error(l0.matrix * f, (k / radius) * f));
  }
  return worst;
}

struct AnnulusErrors {
  double constant{0.0};   // relative error of Lambda_D 1
  double modes{0.0};      // worst relative error over cos modes 1..4
  double trace{0.0};      // worst relative mid-panel error of du/dnu on the obstacle
  double field{0.0};      // relative error of u at radius 2
};

// Concentric regular polygon of circumradius rho inside the radius-R circle.
inline AnnulusErrors annulus_errors(std::size_t corners = 128, std::size_t n_obstacle = 256, std::size_t n_outer = 64,
                                    double radius = 5.0, double rho = 1.0, double alpha0 = 1e-4) {
  const auto outer = build_uniform_mesh(circle_curve({0.0, 0.0}, radius), n_outer);
  const ObstacleSolver s(outer, build_graded_mesh(PolygonBoundary(regular_polygon(corners, rho)), n_obstacle, 2.0));
  const double log_ratio = std::log(radius / rho);
  AnnulusErrors e;
  const Densities d = s.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(outer.size())));
  const Eigen::VectorXd g = s.outer_neumann(d);
  e.constant = (g.array() - 1.0 / (radius * log_ratio)).abs().maxCoeff() * radius * log_ratio;
  const auto ld = s.dtn();
  for (int n = 1; n <= 4; ++n) {
    const double r2n = std::pow(radius, 2 * n);
    const double p2n = std::pow(rho, 2 * n);
    const double ev = (n / radius) * (r2n + p2n) / (r2n - p2n);
    const Eigen::VectorXd f = cos_mode(outer, n);
    e.modes = std::max(e.modes, rel_error(ld.matrix * f, ev * f));
  }
  // mid-panel nodes: the two central nodes of each panel
  const Eigen::VectorXd tr = s.neumann_trace(d, alpha0);
  const std::size_t per = n_obstacle / corners;  // nodes per panel = 2 per
  const double exact = 1.0 / (rho * log_ratio);
  for (std::size_t l = 0; l < corners; ++l) {
    for (std::size_t k : {per - 1, per}) {
      const auto j = static_cast<Eigen::Index>(l * 2 * per + k);
      e.trace = std::max(e.trace, std::abs(tr(j) - exact) / exact);
    }
  }
  const double u_exact = std::log(2.0 / rho) / log_ratio;
  e.field = std::abs(s.field(d, {2.0, 0.0}) - u_exact) / u_exact;
  return e;
}

struct GreensErrors {
  double boundary{0.0};     // max |K(x, z)| on the circle
  double reciprocity{0.0};  // max |K(x, y) - K(y, x)|
  double constant{0.0};     // |sum_j (pi/n)|x'| dK/dnu + 1|
};

inline GreensErrors greens_errors(std::size_t n_half = 64, double radius = 5.0, std::uint64_t seed = 7) {
  const DiskGreens g = make_disk_greens({0.0, 0.0}, radius);
  std::mt19937_64 rng(seed);
  auto interior = [&] {
    const double r = 0.95 * radius * std::sqrt(0.5 * (symmetric_uniform(rng) + 1.0));
    const double a = kPi * symmetric_uniform(rng);
    return Vec2{r * std::cos(a), r * std::sin(a)};
  };
  GreensErrors e;
  for (int k = 0; k < 50; ++k) {
    const Vec2 z = interior();
    for (int j = 0; j < 256; ++j) {
      const double a = kTwoPi * j / 256.0;
      e.boundary = std::max(e.boundary, std::abs(disk_greens(g, {radius * std::cos(a), radius * std::sin(a)}, z)));
    }
  }
  for (int k = 0; k < 100; ++k) {
    const Vec2 x = interior();
    const Vec2 y = interior();
    e.reciprocity = std::max(e.reciprocity, std::abs(disk_greens(g, x, y) - disk_greens(g, y, x)));
  }
  const auto mesh = build_uniform_mesh(circle_curve({0.0, 0.0}, radius), n_half);
  const Eigen::VectorXd tr = greens_normal_trace(g, {1.0, 2.0}, mesh);
  e.constant = std::abs(quadrature_weights(mesh).dot(tr) + 1.0);
  return e;
}

// max over n in {16, 32, 64} and all i of |sum_j R_j(s_i)| and |sum_j T_j(t_i)|.
inline double quadrature_identity_error() {
  double worst = 0.0;
  for (std::size_t n : {16u, 32u, 64u}) {
    const auto h = kPi / static_cast<double>(n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const double si = 0.5 * h + static_cast<double>(i) * h;
      const double ti = static_cast<double>(i) * h;
      double r = 0.0;
      double t = 0.0;
      for (std::size_t j = 0; j < 2 * n; ++j) {
        r += weight_R(n, si, 0.5 * h + static_cast<double>(j) * h);
        t += weight_T(n, ti, static_cast<double>(j) * h);
      }
      worst = std::max({worst, std::abs(r), std::abs(t)});
    }
  }
  return worst;
}

struct SelfAdjointness {
  double asymmetry{0.0};
  double min_ratio{0.0};  // smallest kept eigenvalue / largest
  std::size_t kept{0};
};

inline SelfAdjointness self_adjointness(std::size_t n_outer = 64, std::size_t n_obstacle = 128, double grading_p = 2.0) {
  const auto outer = build_uniform_mesh(circle_curve({0.0, 0.0}, 5.0), n_outer);
  const auto l0 = EmptyDiskSolver(outer).dtn();
  const auto ld = ObstacleSolver(outer, build_graded_mesh(PolygonBoundary(example_polygon()), n_obstacle, grading_p)).dtn();
  const auto eig = weighted_eigs(ld, l0, kExactDataCutoff);
  return {eig.asymmetry, eig.eigenvalues.minCoeff() / eig.eigenvalues.maxCoeff(), eig.kept_count()};
}

// Boundary data used for the Jacobian and Newton checks on the example polygon.
inline Eigen::VectorXd newton_boundary_data(std::size_t n_outer) {
  const auto n = static_cast<long>(2 * n_outer);
  return arc_pattern(2 * n_outer, 3 * n / 8, 3 * n / 8 + 3 * n / 4 - 1);
}

// Worst relative forward-difference error over all 2N Jacobian columns.
inline std::vector<double> jacobian_fd_errors(const std::vector<Vec2>& corners, const NewtonParams& p, const Eigen::VectorXd& f,
                                              double eps = 1e-4) {
  const Linearization lin = linearize(corners, p, f);
  const Eigen::VectorXd w = quadrature_weights(newton_outer_mesh(p));
  const Eigen::VectorXd x0 = pack_corners(corners);
  std::vector<double> out;
  for (Eigen::Index c = 0; c < x0.size(); ++c) {
    Eigen::VectorXd x = x0;
    x(c) += eps;
    const Eigen::VectorXd fd = (forward_map(unpack_corners(x), p, f) - lin.value) / eps;
    out.push_back(weighted_norm(fd - lin.jacobian.col(c), w) / weighted_norm(lin.jacobian.col(c), w));
  }
  return out;
}

}  // namespace cauchyfm
