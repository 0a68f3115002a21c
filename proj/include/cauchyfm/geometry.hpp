#pragma once

// Boundary parametrizations (smooth closed curves and polygons) and the
// quadrature meshes every boundary integral lives on.
//
// All angles are kept in [0, 2pi). Curves are oriented counterclockwise, so
// rot_cw(x'(t)) = (x2', -x1') points out of the enclosed domain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cauchyfm/errors.hpp"

namespace cauchyfm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
// (a2, -a1): the tangent rotated clockwise, i.e. |x'| times the outward normal.
constexpr Vec2 rot_cw(Vec2 a) { return {a.y, -a.x}; }

inline double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Smooth curves: finite Fourier series per coordinate, so every derivative is
// analytic. Covers the outer disk, circular sampling domains and kite shapes.

struct FourierMode {
  int k{1};
  double cos_x{0.0};
  double sin_x{0.0};
  double cos_y{0.0};
  double sin_y{0.0};
};

class SmoothCurve {
 public:
  SmoothCurve(Vec2 offset, std::vector<FourierMode> modes)
      : offset_(offset), modes_(std::move(modes)) {
    if (modes_.empty()) throw GeometryError("SmoothCurve: at least one Fourier mode is required");
    for (const auto& m : modes_) {
      if (m.k < 1) throw GeometryError("SmoothCurve: Fourier mode index must be >= 1");
    }
  }

  Vec2 param(double t) const { return offset_ + eval(t, 0); }
  Vec2 deriv1(double t) const { return eval(t, 1); }
  Vec2 deriv2(double t) const { return eval(t, 2); }
  Vec2 deriv3(double t) const { return eval(t, 3); }
  bool closed() const { return true; }

  Vec2 offset() const { return offset_; }
  const std::vector<FourierMode>& modes() const { return modes_; }

  // Set for curves built by circle_curve().
  std::optional<double> circle_radius() const { return circle_radius_; }

 private:
  friend SmoothCurve circle_curve(Vec2 center, double radius);

  // d-th derivative of the oscillating part.
  Vec2 eval(double t, int d) const {
    Vec2 out{};
    for (const auto& m : modes_) {
      const double k = m.k;
      const double c = std::cos(k * t);
      const double s = std::sin(k * t);
      const double kd = std::pow(k, d);
      // derivative cycle of (cos, sin): (c, s) -> (-s, c) -> (-c, -s) -> (s, -c)
      double dc = 0.0;
      double ds = 0.0;
      switch (d % 4) {
        case 0: dc = c; ds = s; break;
        case 1: dc = -s; ds = c; break;
        case 2: dc = -c; ds = -s; break;
        default: dc = s; ds = -c; break;
      }
      out.x += kd * (m.cos_x * dc + m.sin_x * ds);
      out.y += kd * (m.cos_y * dc + m.sin_y * ds);
    }
    return out;
  }

  Vec2 offset_;
  std::vector<FourierMode> modes_;
  std::optional<double> circle_radius_;
};

inline SmoothCurve circle_curve(Vec2 center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw GeometryError("circle_curve: radius must be positive, got " + std::to_string(radius));
  }
  SmoothCurve c(center, {FourierMode{1, radius, 0.0, 0.0, radius}});
  c.circle_radius_ = radius;
  return c;
}

// ---------------------------------------------------------------------------
// Polygons. Panel l (0-based) covers t in [2 l pi / N, 2 (l+1) pi / N) and is
// the affine segment from P_l to P_{l+1}, so x(2 l pi / N) = P_l.

class PolygonBoundary {
 public:
  explicit PolygonBoundary(std::vector<Vec2> corners) : corners_(std::move(corners)) {
    const std::size_t n = corners_.size();
    if (n < 3) throw GeometryError("PolygonBoundary: need at least 3 corners, got " + std::to_string(n));
    for (std::size_t l = 0; l < n; ++l) {
      const Vec2 a = corners_[l];
      const Vec2 b = corners_[(l + 1) % n];
      if (!std::isfinite(a.x) || !std::isfinite(a.y)) throw GeometryError("PolygonBoundary: non-finite corner");
      if (norm(b - a) <= 1e-12) {
        throw GeometryError("PolygonBoundary: corners " + std::to_string(l) + " and " +
                            std::to_string((l + 1) % n) + " coincide");
      }
    }
    if (signed_area() <= 0.0) throw GeometryError("PolygonBoundary: corners must be ordered counterclockwise");
  }

  std::size_t size() const { return corners_.size(); }
  const std::vector<Vec2>& corners() const { return corners_; }
  const Vec2& corner(std::size_t l) const { return corners_[l]; }

  double corner_param(std::size_t l) const { return kTwoPi * static_cast<double>(l) / static_cast<double>(size()); }

  std::size_t panel_of(double t) const {
    t = wrap_angle(t);
    const auto n = size();
    auto l = static_cast<std::size_t>(std::floor(t * static_cast<double>(n) / kTwoPi));
    return l >= n ? n - 1 : l;
  }

  // Local coordinate in [0,1) along panel l.
  double panel_fraction(double t, std::size_t l) const {
    return wrap_angle(t) * static_cast<double>(size()) / kTwoPi - static_cast<double>(l);
  }

  Vec2 param(double t) const {
    const std::size_t l = panel_of(t);
    const double lam = panel_fraction(t, l);
    const Vec2 a = corners_[l];
    const Vec2 b = corners_[(l + 1) % size()];
    return a + lam * (b - a);
  }

  Vec2 deriv1(double t) const {
    const std::size_t l = panel_of(t);
    return (static_cast<double>(size()) / kTwoPi) * (corners_[(l + 1) % size()] - corners_[l]);
  }

  Vec2 deriv2(double) const { return {}; }

  double perimeter() const {
    double p = 0.0;
    for (std::size_t l = 0; l < size(); ++l) p += norm(corners_[(l + 1) % size()] - corners_[l]);
    return p;
  }

  double signed_area() const {
    double a = 0.0;
    for (std::size_t l = 0; l < size(); ++l) a += cross(corners_[l], corners_[(l + 1) % size()]);
    return 0.5 * a;
  }

  double min_edge_length() const {
    double m = INFINITY;
    for (std::size_t l = 0; l < size(); ++l) m = std::min(m, norm(corners_[(l + 1) % size()] - corners_[l]));
    return m;
  }

 private:
  std::vector<Vec2> corners_;
};

inline Vec2 polygon_param(const PolygonBoundary& poly, double t) { return poly.param(t); }

// ---------------------------------------------------------------------------
// Corner grading. Inside a panel of length 2pi/N the local variable
// sigma = N s - 2 l pi runs over [0, 2pi) and
//   w(s) = (wt(sigma) + 2 l pi) / N,   w'(s) = wt'(sigma),
// with wt(sigma) = 2pi v^p / (v^p + (1-v)^p), v(2pi - sigma) = 1 - v(sigma).

struct GradedValue {
  double w{0.0};
  double w_prime{0.0};
};

namespace detail {

inline double grading_v(double sigma, double p) {
  const double a = (kPi - sigma) / kPi;
  return (1.0 / p - 0.5) * a * a * a + (1.0 / p) * (sigma - kPi) / kPi + 0.5;
}

inline double grading_v_prime(double sigma, double p) {
  const double a = (kPi - sigma) / kPi;
  return -3.0 / kPi * (1.0 / p - 0.5) * a * a + 1.0 / (p * kPi);
}

inline GradedValue grading_tilde(double sigma, double p) {
  const double v = grading_v(sigma, p);
  const double vr = grading_v(kTwoPi - sigma, p);
  const double dv = grading_v_prime(sigma, p);
  const double dvr = grading_v_prime(kTwoPi - sigma, p);
  const double a = std::pow(v, p);
  const double b = std::pow(vr, p);
  // d/dsigma of v(2pi - sigma)^p is -p vr^{p-1} dvr
  const double da = v > 0.0 ? p * std::pow(v, p - 1.0) * dv : 0.0;
  const double db = vr > 0.0 ? -p * std::pow(vr, p - 1.0) * dvr : 0.0;
  const double sum = a + b;
  return {kTwoPi * a / sum, kTwoPi * (da * b - a * db) / (sum * sum)};
}

}  // namespace detail

inline GradedValue graded_substitution(double s, std::size_t panels, double p) {
  if (!(p >= 2.0)) throw ConfigError("graded_substitution: grading exponent must satisfy p >= 2, got " + std::to_string(p));
  if (panels < 1) throw ConfigError("graded_substitution: panel count must be >= 1");
  s = wrap_angle(s);
  const double n = static_cast<double>(panels);
  auto l = static_cast<std::size_t>(std::floor(s * n / kTwoPi));
  if (l >= panels) l = panels - 1;
  const double shift = kTwoPi * static_cast<double>(l);
  const double sigma = std::clamp(n * s - shift, 0.0, kTwoPi);
  const auto tilde = detail::grading_tilde(sigma, p);
  return {(tilde.w + shift) / n, tilde.w_prime};
}

// ---------------------------------------------------------------------------
// Meshes.

// Equispaced nodes t_j = j pi / n_half on a smooth closed curve (the outer
// boundary), with per-node geometry caches.
struct UniformMesh {
  std::size_t n_half{0};
  std::vector<double> t;
  std::vector<Vec2> points;
  std::vector<Vec2> d1;
  std::vector<Vec2> d2;
  std::vector<Vec2> d3;
  std::vector<double> speed;  // |x'(t_j)|

  std::size_t size() const { return t.size(); }
  double spacing() const { return kPi / static_cast<double>(n_half); }
};

inline UniformMesh build_uniform_mesh(const SmoothCurve& curve, std::size_t n_half) {
  if (n_half < 1) throw ConfigError("build_uniform_mesh: n_half must be positive");
  UniformMesh m;
  m.n_half = n_half;
  const std::size_t count = 2 * n_half;
  m.t.resize(count);
  m.points.resize(count);
  m.d1.resize(count);
  m.d2.resize(count);
  m.d3.resize(count);
  m.speed.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) * kPi / static_cast<double>(n_half);
    m.t[j] = t;
    m.points[j] = curve.param(t);
    m.d1[j] = curve.deriv1(t);
    m.d2[j] = curve.deriv2(t);
    m.d3[j] = curve.deriv3(t);
    m.speed[j] = norm(m.d1[j]);
    if (!(m.speed[j] > 0.0)) throw GeometryError("build_uniform_mesh: curve is not regular at t=" + std::to_string(t));
  }
  return m;
}

// Nodes t_j = w(s_j), s_j = pi/(2n) + j pi/n on an obstacle or sampling
// boundary. For polygons w is the corner grading; for smooth curves w is the
// identity and w' = 1.
struct GradedMesh {
  std::size_t n_half{0};
  std::size_t corners_count{0};      // 0 for smooth curves
  std::optional<double> grading_p;   // empty for smooth curves
  std::vector<double> s;
  std::vector<double> t;
  std::vector<double> w_prime;
  std::vector<Vec2> points;
  std::vector<Vec2> d1;
  std::vector<Vec2> d2;
  std::vector<double> speed;   // |x'(t_j)|
  std::vector<Vec2> normals;   // unit outward normals

  std::size_t size() const { return t.size(); }
  bool graded() const { return grading_p.has_value(); }
  double spacing() const { return kPi / static_cast<double>(n_half); }
};

namespace detail {

inline GradedMesh allocate_graded(std::size_t n_half) {
  GradedMesh m;
  m.n_half = n_half;
  const std::size_t count = 2 * n_half;
  m.s.resize(count);
  m.t.resize(count);
  m.w_prime.resize(count);
  m.points.resize(count);
  m.d1.resize(count);
  m.d2.resize(count);
  m.speed.resize(count);
  m.normals.resize(count);
  return m;
}

inline double node_s(std::size_t j, std::size_t n_half) {
  const double n = static_cast<double>(n_half);
  return kPi / (2.0 * n) + static_cast<double>(j) * kPi / n;
}

}  // namespace detail

inline GradedMesh build_graded_mesh(const PolygonBoundary& poly, std::size_t n_half, double p = 2.0) {
  const std::size_t corners = poly.size();
  if (n_half < 1) throw ConfigError("build_graded_mesh: n_half must be positive");
  if (n_half % corners != 0) {
    throw ConfigError("build_graded_mesh: n_half=" + std::to_string(n_half) +
                      " is not divisible by the corner count N=" + std::to_string(corners));
  }
  auto m = detail::allocate_graded(n_half);
  m.corners_count = corners;
  m.grading_p = p;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double s = detail::node_s(j, n_half);
    const auto g = graded_substitution(s, corners, p);
    m.s[j] = s;
    m.t[j] = g.w;
    m.w_prime[j] = g.w_prime;
    m.points[j] = poly.param(g.w);
    m.d1[j] = poly.deriv1(g.w);
    m.d2[j] = poly.deriv2(g.w);
    m.speed[j] = norm(m.d1[j]);
    m.normals[j] = rot_cw(m.d1[j]) / m.speed[j];
  }
  return m;
}

inline GradedMesh build_smooth_obstacle_mesh(const SmoothCurve& curve, std::size_t n_half) {
  if (n_half < 1) throw ConfigError("build_smooth_obstacle_mesh: n_half must be positive");
  auto m = detail::allocate_graded(n_half);
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double s = detail::node_s(j, n_half);
    m.s[j] = s;
    m.t[j] = s;
    m.w_prime[j] = 1.0;
    m.points[j] = curve.param(s);
    m.d1[j] = curve.deriv1(s);
    m.d2[j] = curve.deriv2(s);
    m.speed[j] = norm(m.d1[j]);
    if (!(m.speed[j] > 0.0)) throw GeometryError("build_smooth_obstacle_mesh: curve is not regular");
    m.normals[j] = rot_cw(m.d1[j]) / m.speed[j];
  }
  return m;
}

// An obstacle (or sampling domain) is either a polygon or a smooth curve.
using Obstacle = std::variant<PolygonBoundary, SmoothCurve>;

inline GradedMesh build_obstacle_mesh(const Obstacle& obstacle, std::size_t n_half, double p = 2.0) {
  if (const auto* poly = std::get_if<PolygonBoundary>(&obstacle)) return build_graded_mesh(*poly, n_half, p);
  return build_smooth_obstacle_mesh(std::get<SmoothCurve>(obstacle), n_half);
}

// ---------------------------------------------------------------------------
// Planar helpers on closed polylines (inside tests, clearance checks).

inline std::vector<Vec2> obstacle_outline(const Obstacle& obstacle, std::size_t samples = 512) {
  if (const auto* poly = std::get_if<PolygonBoundary>(&obstacle)) return poly->corners();
  const auto& curve = std::get<SmoothCurve>(obstacle);
  std::vector<Vec2> out(samples);
  for (std::size_t j = 0; j < samples; ++j) out[j] = curve.param(kTwoPi * static_cast<double>(j) / static_cast<double>(samples));
  return out;
}

inline bool polyline_contains(std::span<const Vec2> loop, Vec2 z) {
  bool inside = false;
  const std::size_t n = loop.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = loop[i];
    const Vec2 b = loop[j];
    if ((a.y > z.y) != (b.y > z.y)) {
      const double xc = a.x + (z.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (z.x < xc) inside = !inside;
    }
  }
  return inside;
}

inline double segment_distance(Vec2 a, Vec2 b, Vec2 z) {
  const Vec2 ab = b - a;
  const double len2 = norm2(ab);
  double lam = len2 > 0.0 ? dot(z - a, ab) / len2 : 0.0;
  lam = std::clamp(lam, 0.0, 1.0);
  return norm(z - (a + lam * ab));
}

inline double polyline_distance(std::span<const Vec2> loop, Vec2 z) {
  double d = INFINITY;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) d = std::min(d, segment_distance(loop[i], loop[(i + 1) % n], z));
  return d;
}

}  // namespace cauchyfm
