#pragma once

// Empty-disk and obstacle Dirichlet solvers, discrete DtN maps, interior field
// evaluation, the regularized Neumann trace on the obstacle, and synthetic
// Cauchy data.
//
// Block unknowns are (psi_B ; W psi_D). Both rows carry the factor 2 of the
// jump relations, so a Dirichlet datum (f on the outer boundary, g on the
// obstacle) enters as the right-hand side (2f ; 2g).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyfm/errors.hpp"
#include "cauchyfm/geometry.hpp"
#include "cauchyfm/nystrom.hpp"
#include "cauchyfm/potential_kernels.hpp"

namespace cauchyfm {

enum class DtnKind { Empty, Obstacle, Sampler };

struct DtnMatrix {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd quad_weights;  // (pi/n) |x'(t_j)|
  DtnKind tag{DtnKind::Empty};
};

inline Eigen::VectorXd quadrature_weights(const UniformMesh& mesh) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t j = 0; j < mesh.size(); ++j) w(static_cast<Eigen::Index>(j)) = mesh.spacing() * mesh.speed[j];
  return w;
}

inline Eigen::VectorXd speeds(const UniformMesh& mesh) {
  return Eigen::Map<const Eigen::VectorXd>(mesh.speed.data(), static_cast<Eigen::Index>(mesh.speed.size()));
}

inline Eigen::VectorXd speeds(const GradedMesh& mesh) {
  return Eigen::Map<const Eigen::VectorXd>(mesh.speed.data(), static_cast<Eigen::Index>(mesh.speed.size()));
}

inline Eigen::VectorXd w_primes(const GradedMesh& mesh) {
  return Eigen::Map<const Eigen::VectorXd>(mesh.w_prime.data(), static_cast<Eigen::Index>(mesh.w_prime.size()));
}

inline constexpr double kSingularRcond = 1e-14;

namespace detail {

template <class Lu>
void check_conditioning(const Lu& lu, const char* who) {
  const double rc = lu.rcond();
  if (!(rc > kSingularRcond)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: block system is numerically singular (reciprocal condition estimate %.3e)", who, rc);
    throw NumericalError(buf);
  }
}

inline double max_step(const std::vector<Vec2>& pts) {
  double h = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) h = std::max(h, norm(pts[(j + 1) % pts.size()] - pts[j]));
  return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------

class EmptyDiskSolver {
 public:
  explicit EmptyDiskSolver(UniformMesh mesh)
      : mesh_(std::move(mesh)),
        L_(assemble_double_layer_B(mesh_)),
        T_(assemble_hypersingular_B(mesh_)) {
    Eigen::MatrixXd a = L_.entries;
    a.diagonal().array() -= 1.0;
    lu_.compute(a);
    detail::check_conditioning(lu_, "EmptyDiskSolver");
  }

  const UniformMesh& mesh() const { return mesh_; }
  const OperatorMatrix& double_layer() const { return L_; }
  const OperatorMatrix& hypersingular() const { return T_; }

  // psi_B with (L - I) psi_B = 2 f.
  Eigen::VectorXd density(const Eigen::VectorXd& f) const {
    check_size(f);
    return lu_.solve(2.0 * f);
  }

  Eigen::VectorXd apply_dtn(const Eigen::VectorXd& f) const {
    return (0.5 * (T_.entries * density(f)).array() / speeds(mesh_).array()).matrix();
  }

  DtnMatrix dtn() const {
    const auto n = static_cast<Eigen::Index>(mesh_.size());
    Eigen::MatrixXd x = lu_.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd m = speeds(mesh_).cwiseInverse().asDiagonal() * (T_.entries * x);
    return {std::move(m), quadrature_weights(mesh_), DtnKind::Empty};
  }

  // u0(x) from the double-layer density; x strictly inside, outside the band.
  double field(const Eigen::VectorXd& psi, Vec2 x) const {
    check_point(x);
    double u = 0.0;
    for (std::size_t j = 0; j < mesh_.size(); ++j) {
      const Vec2 nu = rot_cw(mesh_.d1[j]) / mesh_.speed[j];
      u += phi0_normal_source(x, mesh_.points[j], nu) * mesh_.speed[j] * psi(static_cast<Eigen::Index>(j));
    }
    return mesh_.spacing() * u;
  }

 private:
  void check_size(const Eigen::VectorXd& f) const {
    if (f.size() != static_cast<Eigen::Index>(mesh_.size())) throw ConfigError("EmptyDiskSolver: data size does not match mesh");
  }
  void check_point(Vec2 x) const {
    if (!polyline_contains(mesh_.points, x)) throw GeometryError("field evaluation point outside the outer boundary");
    if (polyline_distance(mesh_.points, x) < 2.0 * detail::max_step(mesh_.points)) {
      throw AccuracyError("field evaluation point inside the quadrature clearance band of the outer boundary");
    }
  }

  UniformMesh mesh_;
  OperatorMatrix L_;
  OperatorMatrix T_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// ---------------------------------------------------------------------------

struct Densities {
  Eigen::VectorXd psi_B;
  Eigen::VectorXd wpsi_D;  // W psi_D
};

class ObstacleSolver {
 public:
  ObstacleSolver(UniformMesh outer, GradedMesh obstacle, DtnKind kind = DtnKind::Obstacle)
      : outer_(std::move(outer)),
        obstacle_(std::move(obstacle)),
        kind_(kind),
        L_(assemble_double_layer_B(outer_)),
        T_(assemble_hypersingular_B(outer_)),
        M_(assemble_single_layer_D(obstacle_)),
        cross_(assemble_cross_blocks(outer_, obstacle_)) {
    for (const auto& p : obstacle_.points) {
      if (!polyline_contains(outer_.points, p)) throw GeometryError("ObstacleSolver: obstacle is not inside the outer boundary");
    }
    const Eigen::Index nb = nb_();
    const Eigen::Index nd = nd_();
    Eigen::MatrixXd a(nb + nd, nb + nd);
    a.topLeftCorner(nb, nb) = L_.entries - Eigen::MatrixXd::Identity(nb, nb);
    a.topRightCorner(nb, nd) = cross_.M_DB.entries;
    a.bottomLeftCorner(nd, nb) = cross_.L_BD.entries;
    a.bottomRightCorner(nd, nd) = M_.entries;
    lu_.compute(a);
    detail::check_conditioning(lu_, "ObstacleSolver");
  }

  const UniformMesh& outer_mesh() const { return outer_; }
  const GradedMesh& obstacle_mesh() const { return obstacle_; }
  const CrossBlocks& cross_blocks() const { return cross_; }
  const OperatorMatrix& single_layer() const { return M_; }
  const OperatorMatrix& hypersingular() const { return T_; }

  // Dirichlet data f on the outer boundary and g on the obstacle.
  Densities solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    if (f.size() != nb_() || g.size() != nd_()) throw ConfigError("ObstacleSolver: data size does not match meshes");
    Eigen::VectorXd rhs(nb_() + nd_());
    rhs << 2.0 * f, 2.0 * g;
    Eigen::VectorXd x = lu_.solve(rhs);
    return {x.head(nb_()), x.tail(nd_())};
  }

  Densities solve(const Eigen::VectorXd& f) const { return solve(f, Eigen::VectorXd::Zero(nd_())); }

  // Normal derivative on the outer boundary of the field with densities d.
  Eigen::VectorXd outer_neumann(const Densities& d) const {
    Eigen::VectorXd v = T_.entries * d.psi_B + cross_.H_DB.entries * d.wpsi_D;
    return (0.5 * v.array() / speeds(outer_).array()).matrix();
  }

  Eigen::VectorXd apply_dtn(const Eigen::VectorXd& f) const { return outer_neumann(solve(f)); }

  DtnMatrix dtn() const {
    const Eigen::Index nb = nb_();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb + nb_d(), nb);
    rhs.topRows(nb).setIdentity();
    Eigen::MatrixXd x = lu_.solve(rhs);
    Eigen::MatrixXd m = T_.entries * x.topRows(nb) + cross_.H_DB.entries * x.bottomRows(nb_d());
    m = speeds(outer_).cwiseInverse().asDiagonal() * m;
    return {std::move(m), quadrature_weights(outer_), kind_};
  }

  // Column k: W psi_D for outer Dirichlet data e_k and zero obstacle data.
  Eigen::MatrixXd unit_data_densities() const {
    const Eigen::Index nb = nb_();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb + nb_d(), nb);
    rhs.topRows(nb).diagonal().setConstant(2.0);
    return lu_.solve(rhs).bottomRows(nb_d());
  }

  // Regularized nodal normal derivative du/dnu on the obstacle (outward from
  // the obstacle) for a solution vanishing there.
  Eigen::VectorXd neumann_trace(const Densities& d, double alpha0, bool from_density = false) const {
    if (!(alpha0 > 0.0)) throw ConfigError("neumann_trace: alpha0 must be positive");
    const Eigen::VectorXd w = w_primes(obstacle_);
    if (from_density) return (-d.wpsi_D.array() / (alpha0 + w.array())).matrix();
    const Eigen::VectorXd y = speeds(obstacle_);
    // Y W U = W T_BD psi_B + W H_D (W psi_D) - Y (W psi_D), with U = 2 du/dnu
    Eigen::VectorXd ywu = (w.array() * (cross_.T_BD.entries * d.psi_B + cross_.H_D.entries * d.wpsi_D).array()).matrix() -
                          (y.array() * d.wpsi_D.array()).matrix();
    Eigen::VectorXd u = (ywu.array() / y.array() / (alpha0 + w.array())).matrix();
    return 0.5 * u;
  }

  double field(const Densities& d, Vec2 x) const {
    check_point(x);
    double u_b = 0.0;
    for (std::size_t j = 0; j < outer_.size(); ++j) {
      const Vec2 nu = rot_cw(outer_.d1[j]) / outer_.speed[j];
      u_b += phi0_normal_source(x, outer_.points[j], nu) * outer_.speed[j] * d.psi_B(static_cast<Eigen::Index>(j));
    }
    double u_d = 0.0;
    for (std::size_t j = 0; j < obstacle_.size(); ++j) {
      u_d += phi0(x, obstacle_.points[j]) * obstacle_.speed[j] * d.wpsi_D(static_cast<Eigen::Index>(j));
    }
    return outer_.spacing() * u_b + obstacle_.spacing() * u_d;
  }

 private:
  Eigen::Index nb_() const { return static_cast<Eigen::Index>(outer_.size()); }
  Eigen::Index nd_() const { return static_cast<Eigen::Index>(obstacle_.size()); }
  Eigen::Index nb_d() const { return nd_(); }

  void check_point(Vec2 x) const {
    if (!polyline_contains(outer_.points, x)) throw GeometryError("field evaluation point outside the outer boundary");
    if (polyline_contains(obstacle_.points, x)) throw GeometryError("field evaluation point inside the obstacle");
    if (polyline_distance(outer_.points, x) < 2.0 * detail::max_step(outer_.points) ||
        polyline_distance(obstacle_.points, x) < 2.0 * detail::max_step(obstacle_.points)) {
      throw AccuracyError("field evaluation point inside a quadrature clearance band");
    }
  }

  UniformMesh outer_;
  GradedMesh obstacle_;
  DtnKind kind_;
  OperatorMatrix L_;
  OperatorMatrix T_;
  OperatorMatrix M_;
  CrossBlocks cross_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// ---------------------------------------------------------------------------
// Real trigonometric interpolation of equispaced samples on [0, 2pi).
// The Nyquist mode uses cos only, so the interpolant reproduces the samples.

inline Eigen::VectorXd trig_interpolate(const Eigen::VectorXd& samples, std::size_t fine_count) {
  const auto m = static_cast<std::size_t>(samples.size());
  if (m == 0 || m % 2 != 0) throw ConfigError("trig_interpolate: sample count must be even and positive");
  const std::size_t half = m / 2;
  std::vector<double> a(half + 1, 0.0), b(half + 1, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    double ca = 0.0, sb = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double th = kTwoPi * static_cast<double>(j * k % m) / static_cast<double>(m);
      ca += samples(static_cast<Eigen::Index>(j)) * std::cos(th);
      sb += samples(static_cast<Eigen::Index>(j)) * std::sin(th);
    }
    a[k] = 2.0 * ca / static_cast<double>(m);
    b[k] = 2.0 * sb / static_cast<double>(m);
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(fine_count));
  for (std::size_t i = 0; i < fine_count; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(fine_count);
    double v = 0.5 * a[0];
    for (std::size_t k = 1; k < half; ++k) v += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
    v += 0.5 * a[half] * std::cos(static_cast<double>(half) * t);
    out(static_cast<Eigen::Index>(i)) = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cauchy data.

struct CauchyPair {
  Eigen::VectorXd t;          // outer nodes
  Eigen::VectorXd dirichlet;  // f
  Eigen::VectorXd neumann;    // gamma du/dnu, possibly noisy
  double outer_radius{0.0};
  std::size_t n_half{0};
  std::optional<double> gamma_true;
  double noise_ratio{0.0};
  std::uint64_t rng_seed{0};
  std::size_t refine{1};  // synthesis mesh factor; 1 means same-mesh data
};

struct SynthesisSetup {
  Vec2 outer_center{};
  double outer_radius{5.0};
  Obstacle obstacle{circle_curve({0.0, 0.0}, 1.0)};
  std::size_t n_outer{64};
  std::size_t n_obstacle{64};
  double grading_p{2.0};
  double gamma{1.0};
  std::size_t refine{2};
};

// Uniform deviate on [-1, 1] from the top 53 bits.
inline double symmetric_uniform(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

inline void apply_multiplicative_noise(Eigen::VectorXd& g, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw ConfigError("noise ratio must be nonnegative");
  if (delta == 0.0) return;
  std::mt19937_64 rng(seed);
  for (Eigen::Index j = 0; j < g.size(); ++j) g(j) *= 1.0 + delta * symmetric_uniform(rng);
}

// f is given at the 2*n_outer nodes of the reconstruction mesh.
inline CauchyPair synthesize_cauchy(const SynthesisSetup& s, const Eigen::VectorXd& f, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw ConfigError("synthesize_cauchy: noise ratio must be nonnegative");
  if (s.refine < 1) throw ConfigError("synthesize_cauchy: refinement factor must be >= 1");
  if (f.size() != static_cast<Eigen::Index>(2 * s.n_outer)) throw ConfigError("synthesize_cauchy: f size does not match mesh");
  const auto curve = circle_curve(s.outer_center, s.outer_radius);
  const std::size_t r = s.refine;
  ObstacleSolver solver(build_uniform_mesh(curve, s.n_outer * r), build_obstacle_mesh(s.obstacle, s.n_obstacle * r, s.grading_p));
  const Eigen::VectorXd f_fine = r == 1 ? f : trig_interpolate(f, 2 * s.n_outer * r);
  const Eigen::VectorXd g_fine = solver.apply_dtn(f_fine);

  CauchyPair out;
  out.n_half = s.n_outer;
  out.outer_radius = s.outer_radius;
  out.t.resize(f.size());
  out.neumann.resize(f.size());
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    out.t(j) = static_cast<double>(j) * kPi / static_cast<double>(s.n_outer);
    out.neumann(j) = s.gamma * g_fine(j * static_cast<Eigen::Index>(r));
  }
  out.dirichlet = f;
  out.gamma_true = s.gamma;
  out.noise_ratio = delta;
  out.rng_seed = seed;
  out.refine = r;
  apply_multiplicative_noise(out.neumann, delta, seed);
  return out;
}

}  // namespace cauchyfm
