#include <catch_amalgamated.hpp>

#include "cauchyfm/geometry.hpp"
#include "cauchyfm/oracles.hpp"
#include "oracle_values.hpp"

using namespace cauchyfm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("polygon parametrization hits corners at panel starts", "[geometry]") {
  const PolygonBoundary square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(square.param(0.0) == Vec2{0, 0});
  const PolygonBoundary poly(example_polygon());
  const Vec2 p = poly.param(kPi / 2);
  CHECK_THAT(p.x, WithinAbs(1.5, 1e-15));
  CHECK_THAT(p.y, WithinAbs(-0.5, 1e-15));
  for (std::size_t l = 0; l < poly.size(); ++l) {
    const Vec2 c = poly.param(poly.corner_param(l));
    CHECK_THAT(norm(c - poly.corner(l)), WithinAbs(0.0, 1e-14));
  }
  // Midpoint of the first panel.
  const Vec2 m = poly.param(kPi / 4);
  CHECK_THAT(m.x, WithinAbs(0.875, 1e-15));
  CHECK_THAT(m.y, WithinAbs(-0.625, 1e-15));
}

TEST_CASE("polygon derivative is constant per panel and integrates to the edge", "[geometry]") {
  const PolygonBoundary poly(example_polygon());
  for (std::size_t l = 0; l < poly.size(); ++l) {
    const Vec2 d = poly.deriv1(poly.corner_param(l) + 0.1);
    const Vec2 edge = poly.corner((l + 1) % poly.size()) - poly.corner(l);
    CHECK_THAT(norm(d * (kPi / 2) - edge), WithinAbs(0.0, 1e-14));
  }
  CHECK(poly.deriv2(0.3) == Vec2{});
}

TEST_CASE("polygon rejects degenerate and clockwise input", "[geometry]") {
  CHECK_THROWS_AS(PolygonBoundary({{0, 0}, {1, 0}}), GeometryError);
  CHECK_THROWS_AS(PolygonBoundary({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), GeometryError);
  CHECK_THROWS_AS(PolygonBoundary({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), GeometryError);
}

TEST_CASE("smooth curve derivatives match finite differences", "[geometry]") {
  const SmoothCurve kite = kite_curve();
  const double h = 1e-5;
  for (double t : {0.0, 0.7, 2.1, 4.4}) {
    const Vec2 d1 = (kite.param(t + h) - kite.param(t - h)) / (2 * h);
    const Vec2 d2 = (kite.deriv1(t + h) - kite.deriv1(t - h)) / (2 * h);
    const Vec2 d3 = (kite.deriv2(t + h) - kite.deriv2(t - h)) / (2 * h);
    CHECK_THAT(norm(d1 - kite.deriv1(t)), WithinAbs(0.0, 1e-8));
    CHECK_THAT(norm(d2 - kite.deriv2(t)), WithinAbs(0.0, 1e-8));
    CHECK_THAT(norm(d3 - kite.deriv3(t)), WithinAbs(0.0, 1e-8));
  }
  CHECK_THROWS_AS(circle_curve({0, 0}, -1.0), GeometryError);
  CHECK_THROWS_AS(SmoothCurve({0, 0}, {}), GeometryError);
}

TEST_CASE("graded substitution matches high-precision reference values", "[geometry][oracle]") {
  for (const auto& o : oracle::kGrading) {
    const auto g = graded_substitution(o.s, static_cast<std::size_t>(o.panels), o.p);
    CHECK_THAT(g.w, WithinRel(o.w, 1e-13));
    CHECK_THAT(g.w_prime, WithinRel(o.w_prime, 1e-12));
  }
}

TEST_CASE("graded substitution maps each panel onto itself", "[geometry]") {
  for (double p : {2.0, 3.0, 5.0}) {
    for (std::size_t panels : {1u, 4u, 5u}) {
      const double len = kTwoPi / static_cast<double>(panels);
      for (std::size_t l = 0; l < panels; ++l) {
        CHECK_THAT(graded_substitution(l * len, panels, p).w, WithinAbs(l * len, 1e-13));
        CHECK_THAT(graded_substitution((l + 0.5) * len, panels, p).w, WithinAbs((l + 0.5) * len, 1e-13));
        CHECK(graded_substitution(l * len + 1e-4, panels, p).w_prime < 1e-3);
      }
    }
  }
  CHECK_THROWS_AS(graded_substitution(1.0, 4, 1.5), ConfigError);
}

TEST_CASE("graded derivative matches finite differences", "[geometry]") {
  const double h = 1e-6;
  for (double s : {0.2, 1.3, 2.9, 5.5}) {
    const double fd = (graded_substitution(s + h, 4, 3.0).w - graded_substitution(s - h, 4, 3.0).w) / (2 * h);
    CHECK_THAT(graded_substitution(s, 4, 3.0).w_prime, WithinRel(fd, 1e-7));
  }
}

TEST_CASE("graded mesh clusters nodes toward corners", "[geometry]") {
  const PolygonBoundary square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const GradedMesh m = build_graded_mesh(square, 8, 2.0);
  REQUIRE(m.size() == 16);
  CHECK(m.corners_count == 4);
  for (std::size_t j = 1; j < m.size(); ++j) CHECK(m.t[j] > m.t[j - 1]);
  for (std::size_t l = 0; l < 4; ++l) {
    // Nodes 4l .. 4l+3 lie in panel l; the end nodes have the smallest w'.
    CHECK(m.w_prime[4 * l] < m.w_prime[4 * l + 1]);
    CHECK(m.w_prime[4 * l + 3] < m.w_prime[4 * l + 2]);
    for (std::size_t k = 0; k < 4; ++k) CHECK(square.panel_of(m.t[4 * l + k]) == l);
  }
  for (double wp : m.w_prime) CHECK(wp > 0.0);
  CHECK_THAT(m.s[0], WithinAbs(kPi / 16, 1e-15));
  CHECK_THROWS_AS(build_graded_mesh(square, 6, 2.0), ConfigError);
}

TEST_CASE("graded mesh normals point outward with unit length", "[geometry]") {
  const PolygonBoundary poly(example_polygon());
  const GradedMesh m = build_graded_mesh(poly, 64, 3.0);
  const Vec2 centroid{0.9375, -0.0625};
  for (std::size_t j = 0; j < m.size(); ++j) {
    CHECK_THAT(norm(m.normals[j]), WithinAbs(1.0, 1e-14));
    CHECK(dot(m.normals[j], m.points[j] - centroid) > 0.0);
  }
}

TEST_CASE("uniform mesh on a circle", "[geometry]") {
  const UniformMesh m = build_uniform_mesh(circle_curve({1, -1}, 5.0), 32);
  REQUIRE(m.size() == 64);
  for (std::size_t j = 0; j < m.size(); ++j) {
    CHECK_THAT(m.t[j], WithinAbs(j * kPi / 32, 1e-14));
    CHECK_THAT(m.speed[j], WithinAbs(5.0, 1e-14));
    CHECK_THAT(norm(m.points[j] - Vec2{1, -1}), WithinAbs(5.0, 1e-14));
  }
}

TEST_CASE("polyline containment and distance", "[geometry]") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polyline_contains(sq, {0.5, 0.5}));
  CHECK_FALSE(polyline_contains(sq, {1.5, 0.5}));
  CHECK_THAT(polyline_distance(sq, {2.0, 0.5}), WithinAbs(1.0, 1e-15));
  CHECK_THAT(polyline_distance(sq, {0.5, 0.25}), WithinAbs(0.25, 1e-15));
  CHECK_THAT(segment_distance({0, 0}, {1, 0}, {2, 1}), WithinAbs(std::sqrt(2.0), 1e-15));
}
