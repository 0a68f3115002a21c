#pragma once

// Laplace fundamental solution and the Dirichlet Green's function of a disk.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "cauchyfm/errors.hpp"
#include "cauchyfm/geometry.hpp"

namespace cauchyfm {

// (1/2pi) ln(1/|x-y|)
inline double phi0(Vec2 x, Vec2 y) {
  const double r2 = norm2(x - y);
  if (!(r2 > 0.0)) throw SingularityError("phi0: coincident source and target");
  return -std::log(r2) / (4.0 * kPi);
}

// grad_x of phi0: -(x-y) / (2pi |x-y|^2)
inline Vec2 phi0_grad_x(Vec2 x, Vec2 y) {
  const Vec2 d = x - y;
  const double r2 = norm2(d);
  if (!(r2 > 0.0)) throw SingularityError("phi0_grad_x: coincident source and target");
  return (-1.0 / (kTwoPi * r2)) * d;
}

// d phi0(x,y) / d nu(y) for a unit normal at y.
inline double phi0_normal_source(Vec2 x, Vec2 y, Vec2 unit_normal_y) {
  const Vec2 d = x - y;
  const double r2 = norm2(d);
  if (!(r2 > 0.0)) throw SingularityError("phi0_normal_source: coincident source and target");
  return dot(d, unit_normal_y) / (kTwoPi * r2);
}

struct DiskGreens {
  Vec2 center{};
  double radius{1.0};
};

inline DiskGreens make_disk_greens(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("DiskGreens: radius must be positive");
  return {center, radius};
}

namespace detail {

// Q = |y-c|^2 |x-c|^2 - 2 R^2 (x-c).(y-c) + R^4 = (|y-c| |x - y*|)^2 with y* the
// inversion of y; finite and equal to R^4 at y = c, so no special case is needed.
inline double image_q(const DiskGreens& g, Vec2 x, Vec2 y) {
  const Vec2 a = x - g.center;
  const Vec2 d = y - g.center;
  const double r2 = g.radius * g.radius;
  return norm2(d) * norm2(a) - 2.0 * r2 * dot(a, d) + r2 * r2;
}

inline void check_interior(const DiskGreens& g, Vec2 y, const char* who) {
  if (!(norm(y - g.center) < g.radius)) {
    throw GeometryError(std::string(who) + ": source point must lie strictly inside the disk");
  }
}

}  // namespace detail

// K(x,y) = phi0(x,y) - (1/2pi) ln(R / (|y-c| |x-y*|)); K(., y) = 0 on the circle.
inline double disk_greens(const DiskGreens& g, Vec2 x, Vec2 y) {
  detail::check_interior(g, y, "disk_greens");
  if (norm(x - g.center) > g.radius * (1.0 + 1e-12)) throw GeometryError("disk_greens: target outside the closed disk");
  const double r2 = norm2(x - y);
  if (!(r2 > 0.0)) throw SingularityError("disk_greens: coincident source and target");
  const double q = detail::image_q(g, x, y);
  return (-std::log(r2) + std::log(q / (g.radius * g.radius))) / (4.0 * kPi);
}

inline Vec2 disk_greens_grad_x(const DiskGreens& g, Vec2 x, Vec2 y) {
  const Vec2 a = x - g.center;
  const Vec2 d = y - g.center;
  const double r2 = g.radius * g.radius;
  const double q = detail::image_q(g, x, y);
  const Vec2 grad_q = 2.0 * norm2(d) * a - 2.0 * r2 * d;
  return phi0_grad_x(x, y) + (1.0 / (4.0 * kPi * q)) * grad_q;
}

// d K(x, z) / d nu(x) at the nodes of a mesh on the circle (outward normal).
inline Eigen::VectorXd greens_normal_trace(const DiskGreens& g, Vec2 z, const UniformMesh& mesh) {
  detail::check_interior(g, z, "greens_normal_trace");
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const Vec2 nu = rot_cw(mesh.d1[j]) / mesh.speed[j];
    out(static_cast<Eigen::Index>(j)) = dot(disk_greens_grad_x(g, mesh.points[j], z), nu);
  }
  return out;
}

}  // namespace cauchyfm
