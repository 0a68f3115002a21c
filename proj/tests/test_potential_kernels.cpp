#include <catch_amalgamated.hpp>

#include "cauchyfm/oracles.hpp"
#include "cauchyfm/potential_kernels.hpp"

using namespace cauchyfm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("fundamental solution values and gradient", "[kernels]") {
  CHECK_THAT(phi0({1, 0}, {0, 0}), WithinAbs(0.0, 1e-16));
  CHECK_THAT(phi0({std::exp(1.0), 0}, {0, 0}), WithinRel(-1.0 / kTwoPi, 1e-15));
  const Vec2 x{0.3, -0.2};
  const Vec2 y{1.1, 0.9};
  const double h = 1e-6;
  const Vec2 fd{(phi0(x + Vec2{h, 0}, y) - phi0(x - Vec2{h, 0}, y)) / (2 * h),
                (phi0(x + Vec2{0, h}, y) - phi0(x - Vec2{0, h}, y)) / (2 * h)};
  CHECK_THAT(norm(fd - phi0_grad_x(x, y)), WithinAbs(0.0, 1e-9));
  const Vec2 nu{0.6, 0.8};
  const double fdn = (phi0(x, y + h * nu) - phi0(x, y - h * nu)) / (2 * h);
  CHECK_THAT(phi0_normal_source(x, y, nu), WithinAbs(fdn, 1e-9));
  CHECK_THROWS_AS(phi0(x, x), SingularityError);
  CHECK_THROWS_AS(phi0_grad_x(x, x), SingularityError);
}

TEST_CASE("disk Green's function vanishes on the circle and is symmetric", "[kernels][oracle]") {
  const GreensErrors e = greens_errors();
  CHECK(e.boundary <= 1e-12);
  CHECK(e.reciprocity <= 1e-12);
  CHECK(e.constant <= 1e-8);
}

TEST_CASE("disk Green's function with off-origin center", "[kernels]") {
  const DiskGreens g = make_disk_greens({1.0, -2.0}, 3.0);
  const Vec2 y{1.5, -1.0};
  for (double t : {0.0, 1.0, 2.5, 4.0}) {
    const Vec2 x = Vec2{1.0, -2.0} + 3.0 * Vec2{std::cos(t), std::sin(t)};
    CHECK_THAT(disk_greens(g, x, y), WithinAbs(0.0, 1e-14));
  }
  // Source at the center: K = (1/2pi) ln(R/|x-c|).
  CHECK_THAT(disk_greens(g, {2.0, -2.0}, {1.0, -2.0}), WithinRel(std::log(3.0) / kTwoPi, 1e-14));
  CHECK_THROWS_AS(disk_greens(g, {2.0, -2.0}, {5.0, -2.0}), GeometryError);
  CHECK_THROWS_AS(make_disk_greens({0, 0}, 0.0), GeometryError);
}

TEST_CASE("Green's gradient matches finite differences", "[kernels]") {
  const DiskGreens g = make_disk_greens({0, 0}, 5.0);
  const Vec2 y{2.0, 3.0};
  const double h = 1e-6;
  for (Vec2 x : {Vec2{0.5, -1.0}, Vec2{-3.0, 2.0}, Vec2{4.0, 0.5}}) {
    const Vec2 fd{(disk_greens(g, x + Vec2{h, 0}, y) - disk_greens(g, x - Vec2{h, 0}, y)) / (2 * h),
                  (disk_greens(g, x + Vec2{0, h}, y) - disk_greens(g, x - Vec2{0, h}, y)) / (2 * h)};
    CHECK_THAT(norm(fd - disk_greens_grad_x(g, x, y)), WithinAbs(0.0, 1e-8));
  }
}

TEST_CASE("image part of the Green's function is harmonic", "[kernels]") {
  const DiskGreens g = make_disk_greens({0, 0}, 5.0);
  const Vec2 y{2.0, 3.0};
  auto image = [&](Vec2 x) { return disk_greens(g, x, y) - phi0(x, y); };
  const double h = 1e-3;
  for (Vec2 x : {Vec2{0.0, 0.0}, Vec2{-2.0, 1.0}, Vec2{1.0, -3.5}}) {
    const double lap = (image(x + Vec2{h, 0}) + image(x - Vec2{h, 0}) + image(x + Vec2{0, h}) + image(x - Vec2{0, h}) - 4 * image(x)) / (h * h);
    CHECK_THAT(lap, WithinAbs(0.0, 1e-6));
  }
}

TEST_CASE("normal trace reproduces harmonic functions from boundary values", "[kernels]") {
  // u(z) = -int f dK(., z)/dnu ds for harmonic u with u = f on the circle.
  const UniformMesh mesh = build_uniform_mesh(circle_curve({0, 0}, 5.0), 64);
  const DiskGreens g = make_disk_greens({0, 0}, 5.0);
  for (Vec2 z : {Vec2{2.0, 3.0}, Vec2{-1.0, 0.5}}) {
    const Eigen::VectorXd tr = greens_normal_trace(g, z, mesh);
    double u = 0.0;
    for (std::size_t j = 0; j < mesh.size(); ++j) u -= mesh.spacing() * mesh.speed[j] * std::cos(mesh.t[j]) * tr(static_cast<Eigen::Index>(j));
    CHECK_THAT(u, WithinAbs(z.x / 5.0, 1e-8));
  }
  CHECK_THROWS_AS(greens_normal_trace(g, {6.0, 0.0}, mesh), GeometryError);
}
